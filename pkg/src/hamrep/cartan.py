"""The non-graded Hamiltonian Lie algebra H(2;(1,1);Phi(1)) and its p-envelope.

Constructions, all inside W(2;(1,1)) = Der(O(2;(1,1))):

* ``build_W2``: the full derivation algebra, dimension 2p^2.
* ``build_H``: the simple Hamiltonian subalgebra, dimension p^2, spanned by
  two families: y^(j-1)dx - x^(p-1)y^(j)dy for 0 <= j < p, and
  x^(i-1)y^(j)dy - x^(i)y^(j-1)dx for 1 <= i < p, 0 <= j < p (negative
  divided powers read as zero).
* ``build_p_envelope``: the minimal p-envelope, H plus the toral element
  x dx + y dy, with structure constants, p-map and filtration.
* subalgebra utilities: filtration components, the gl2 identification of the
  degree-0 head, bracket-generated subalgebras, and the rank-one Witt
  subalgebra spanned by dy and y^(j)dy - x y^(j-1)dx.

Brackets are computed operationally ([D,E] applied through coefficient
functions) and the p-map as a p-fold operator power, so both are
self-validating against the derivation property.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import dividedpowers as dp
from .primefield import matmul_mod, reduce_rows, rref, validate_prime


class Derivation(NamedTuple):
    """f*d/dx + g*d/dy with divided-power coefficient functions."""

    fx: dp.DPElement
    fy: dp.DPElement


def deriv(fx: dp.DPElement | None = None, fy: dp.DPElement | None = None) -> Derivation:
    return Derivation(fx or {}, fy or {})


def d_add(d1: Derivation, d2: Derivation, p: int) -> Derivation:
    return Derivation(dp.dp_add(d1.fx, d2.fx, p), dp.dp_add(d1.fy, d2.fy, p))


def d_scale(d: Derivation, c: int, p: int) -> Derivation:
    return Derivation(dp.dp_scale(d.fx, c, p), dp.dp_scale(d.fy, c, p))


def d_apply(d: Derivation, f: dp.DPElement, p: int) -> dp.DPElement:
    return dp.apply_derivation((d.fx, d.fy), f, p)


def bracket(d1: Derivation, d2: Derivation, p: int) -> Derivation:
    """[d1, d2] as a derivation: (d1(h) - d2(f), d1(l) - d2(g))."""
    fx = dp.dp_add(d_apply(d1, d2.fx, p), dp.dp_scale(d_apply(d2, d1.fx, p), -1, p), p)
    fy = dp.dp_add(d_apply(d1, d2.fy, p), dp.dp_scale(d_apply(d2, d1.fy, p), -1, p), p)
    return Derivation(fx, fy)


def p_power(d: Derivation, p: int) -> Derivation:
    """D^[p] = D^p as an operator; a derivation again in characteristic p.

    A derivation of k[x,y]/(x^p, y^p) is determined by its values on x^(1)
    and y^(1), so the p-fold composite is read off from those two images.
    """
    x1: dp.DPElement = {(1, 0): 1}
    y1: dp.DPElement = {(0, 1): 1}
    for _ in range(p):
        x1 = d_apply(d, x1, p)
        y1 = d_apply(d, y1, p)
    return Derivation(x1, y1)


def d_to_vector(d: Derivation, p: int) -> np.ndarray:
    return np.concatenate([dp.dp_to_vector(d.fx, p), dp.dp_to_vector(d.fy, p)])


def vector_to_derivation(vec: np.ndarray, p: int) -> Derivation:
    n = p * p
    fx = {(i // p, i % p): int(vec[i]) for i in range(n) if vec[i] % p}
    fy = {(i // p, i % p): int(vec[n + i]) for i in range(n) if vec[n + i] % p}
    return Derivation({m: c % p for m, c in fx.items()}, {m: c % p for m, c in fy.items()})


def depth(d: Derivation, p: int) -> int | None:
    """Filtration depth: min of a+b-1 over monomial terms; None for zero."""
    degs = [a + b - 1 for (a, b) in d.fx] + [a + b - 1 for (a, b) in d.fy]
    return min(degs) if degs else None


def render_derivation(d: Derivation) -> str:
    fx = dp.render(d.fx)
    fy = dp.render(d.fy)
    parts = []
    if fx != "0":
        parts.append(f"({fx})*d/dx")
    if fy != "0":
        parts.append(f"({fy})*d/dy")
    return " + ".join(parts) if parts else "0"


@dataclass
class RestrictedAlgebra:
    """An ordered-basis Lie subalgebra of W(2;(1,1)) closed under the p-map."""

    p: int
    basis: list[Derivation]
    named: dict[str, Derivation]
    filtration_depth: list[int]
    _basis_matrix: np.ndarray = field(repr=False)
    _pivots: np.ndarray = field(repr=False)
    _solver: np.ndarray = field(repr=False)
    _struct: np.ndarray | None = field(default=None, repr=False)
    _p_map: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords_many(self, vecs: np.ndarray) -> np.ndarray:
        """Coordinates (rows) of ambient row vectors; raises if any is outside."""
        vecs = np.atleast_2d(vecs) % self.p
        coords = matmul_mod(vecs[:, self._pivots], self._solver.T, self.p)
        if np.any(matmul_mod(coords, self._basis_matrix, self.p) != vecs):
            raise ValueError("element does not lie in the algebra span")
        return coords

    def coords(self, d: Derivation) -> np.ndarray:
        return self.coords_many(d_to_vector(d, self.p)[None, :])[0]

    def contains(self, d: Derivation) -> bool:
        try:
            self.coords(d)
            return True
        except ValueError:
            return False

    def element(self, coords: np.ndarray) -> Derivation:
        vec = matmul_mod(np.asarray(coords, dtype=np.int64)[None, :] % self.p,
                         self._basis_matrix, self.p)[0]
        return vector_to_derivation(vec, self.p)

    def bracket_coords(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        du = self.element(u)
        dv = self.element(v)
        return self.coords(bracket(du, dv, self.p))

    def structure_constants(self) -> np.ndarray:
        """Dense table S[i, j] = coordinates of [b_i, b_j]; built on demand."""
        if self._struct is None:
            n = self.dim
            vecs = np.zeros((n * n, 2 * self.p * self.p), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    br = bracket(self.basis[i], self.basis[j], self.p)
                    vecs[i * n + j] = d_to_vector(br, self.p)
            self._struct = self.coords_many(vecs).reshape(n, n, n)
        return self._struct

    def p_map(self) -> np.ndarray:
        """Row i = coordinates of basis[i]^[p]; membership is asserted."""
        if self._p_map is None:
            vecs = np.stack([d_to_vector(p_power(b, self.p), self.p) for b in self.basis])
            self._p_map = self.coords_many(vecs)
        return self._p_map

    def ad_matrix(self, d: Derivation) -> np.ndarray:
        """Matrix of ad(d) on the algebra in basis coordinates."""
        cols = np.stack([d_to_vector(bracket(d, b, self.p), self.p) for b in self.basis])
        return self.coords_many(cols).T


@dataclass
class SubalgebraSpan:
    """A subspace of a RestrictedAlgebra given by rref coordinate rows."""

    parent: RestrictedAlgebra
    rows: np.ndarray
    pivots: np.ndarray
    is_subalgebra: bool = False
    labels: list[str] | None = None

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def contains_coords(self, coords: np.ndarray) -> bool:
        residue = reduce_rows(np.atleast_2d(coords), self.rows, self.pivots, self.parent.p)
        return not residue.any()

    def contains(self, d: Derivation) -> bool:
        try:
            coords = self.parent.coords(d)
        except ValueError:
            return False
        return self.contains_coords(coords)

    def elements(self) -> list[Derivation]:
        return [self.parent.element(row) for row in self.rows]


def _make_algebra(p: int, basis: list[Derivation], named: dict[str, Derivation]) -> RestrictedAlgebra:
    mat = np.stack([d_to_vector(b, p) for b in basis])
    _, rank, piv = rref(mat, p)
    if rank != len(basis):
        raise ValueError("algebra basis is linearly dependent")
    # the rref pivot columns make mat[:, piv] invertible
    sub = mat[:, piv]
    # invert sub^T: solve sub^T X = I via rref of [sub^T | I]
    aug = np.concatenate([sub.T, np.eye(rank, dtype=np.int64)], axis=1)
    red, r2, _ = rref(aug, p)
    if r2 != rank:
        raise ValueError("pivot submatrix is singular")
    solver = red[:rank, rank:]
    depths = []
    for b in basis:
        dpt = depth(b, p)
        depths.append(dpt if dpt is not None else 0)
    return RestrictedAlgebra(p, basis, named, depths, mat, piv, solver)


def _first_family(p: int, j: int) -> Derivation:
    # y^(j-1)dx - x^(p-1)y^(j)dy, with y^(-1) = 0
    fx = {(0, j - 1): 1} if j >= 1 else {}
    fy = {(p - 1, j): p - 1}
    return Derivation(fx, fy)


def _second_family(p: int, i: int, j: int) -> Derivation:
    # x^(i-1)y^(j)dy - x^(i)y^(j-1)dx, with y^(-1) = 0
    fy = {(i - 1, j): 1}
    fx = {(i, j - 1): p - 1} if j >= 1 else {}
    return Derivation(fx, fy)


def _named_elements(p: int) -> dict[str, Derivation]:
    named = {
        "dxp": _first_family(p, 1),                      # dx - x^(p-1)y dy
        "dy": _second_family(p, 1, 0),
        "X": _second_family(p, 2, 0),                    # x dy
        "Y": _first_family(p, 2),                        # y dx - x^(p-1)y^(2) dy
        "hdiff": _second_family(p, 1, 1),                # y dy - x dx
        "tsum": deriv({(1, 0): 1}, {(0, 1): 1}),         # x dx + y dy
        "xdx": deriv({(1, 0): 1}, {}),
        "ydy": deriv({}, {(0, 1): 1}),
        "H": deriv({(1, 0): 1}, {(0, 1): p - 1}),        # x dx - y dy
        "A": _second_family(p, 1, 2),                    # y^(2) dy - x y dx
        "B": _second_family(p, 2, 1),                    # x y dy - x^(2) dx
        "C": _first_family(p, 3),                        # y^(2) dx - x^(p-1)y^(3) dy
        "D": _second_family(p, 3, 1),                    # x^(2)y dy - x^(3) dx
        "F": _second_family(p, 2, p - 1),
        "J": _second_family(p, p - 1, p - 1),
        "L": _second_family(p, 1, p - 1),
        "x2dy": _second_family(p, 3, 0),
        "xp1dy": deriv({}, {(p - 1, 0): 1}),
    }
    return named


@functools.lru_cache(maxsize=None)
def build_W2(p: int) -> RestrictedAlgebra:
    """All of Der(O(2;(1,1))): monomial-coefficient derivations, dim 2p^2."""
    p = validate_prime(p)
    basis = []
    for part in range(2):
        for a in range(p):
            for b in range(p):
                mono = {(a, b): 1}
                basis.append(Derivation(mono, {}) if part == 0 else Derivation({}, mono))
    return _make_algebra(p, basis, _named_elements(p))


def hamiltonian_basis(p: int) -> list[Derivation]:
    """The p^2 spanning elements of H in (family, index) order."""
    elems = [_first_family(p, j) for j in range(p)]
    elems += [_second_family(p, i, j) for i in range(1, p) for j in range(p)]
    return elems


@functools.lru_cache(maxsize=None)
def build_H(p: int) -> SubalgebraSpan:
    """The simple Hamiltonian subalgebra as a span inside W(2;(1,1))."""
    p = validate_prime(p)
    w2 = build_W2(p)
    elems = hamiltonian_basis(p)
    coords = np.stack([w2.coords(e) for e in elems])
    reduced, rank, piv = rref(coords, p)
    if rank != p * p:
        raise AssertionError("Hamiltonian span has wrong dimension")
    span = SubalgebraSpan(w2, reduced[:rank], piv)
    # closure on the spanning set suffices by bilinearity
    brackets = np.stack(
        [w2.coords(bracket(e1, e2, p)) for e1 in elems for e2 in elems]
    )
    if reduce_rows(brackets, span.rows, span.pivots, p).any():
        raise AssertionError("Hamiltonian span is not bracket-closed")
    span.is_subalgebra = True
    return span


def _envelope_basis(p: int) -> tuple[list[Derivation], list[int]]:
    head = [
        _first_family(p, 1),        # dx' (depth -1)
        _second_family(p, 1, 0),    # dy  (depth -1)
        _second_family(p, 2, 0),    # x dy
        _first_family(p, 2),        # Y
        _second_family(p, 1, 1),    # y dy - x dx
        deriv({(1, 0): 1}, {(0, 1): 1}),  # x dx + y dy (envelope element)
    ]
    deep: list[tuple[tuple[int, int, int], Derivation]] = []
    for j in list(range(3, p)) + [0]:
        e = _first_family(p, j)
        deep.append(((depth(e, p), 1, j), e))
    for i in range(1, p):
        for j in range(p):
            if (i, j) in {(1, 0), (2, 0), (1, 1)}:
                continue
            e = _second_family(p, i, j)
            deep.append(((depth(e, p), 2, i * p + j), e))
    deep.sort(key=lambda item: item[0])
    basis = head + [e for _, e in deep]
    depths = [-1, -1, 0, 0, 0, 0] + [key[0] for key, _ in deep]
    return basis, depths


@functools.lru_cache(maxsize=None)
def build_p_envelope(p: int) -> RestrictedAlgebra:
    """The minimal p-envelope: H plus x dx + y dy, dimension p^2 + 1.

    Basis order: dx', dy, x dy, Y, (y dy - x dx), (x dx + y dy), then the
    depth >= 1 elements by increasing filtration depth. The first p^2 + 1
    coordinates minus slot 5 span H; slots 2..5 project onto gl2.
    """
    p = validate_prime(p)
    basis, depths = _envelope_basis(p)
    alg = _make_algebra(p, basis, _named_elements(p))
    alg.filtration_depth = depths
    if alg.dim != p * p + 1:
        raise AssertionError("p-envelope has wrong dimension")
    # p-map closure: raises if any basis p-th power escapes the span
    alg.p_map()
    return alg


def h_span_in_envelope(p: int) -> SubalgebraSpan:
    """H as a span inside the envelope: every slot except the toral sum."""
    alg = build_p_envelope(p)
    rows = np.zeros((alg.dim - 1, alg.dim), dtype=np.int64)
    idx = [i for i in range(alg.dim) if i != 5]
    rows[np.arange(alg.dim - 1), idx] = 1
    return SubalgebraSpan(alg, rows, np.asarray(idx, dtype=np.int64), is_subalgebra=True)


def filtration_component(alg: RestrictedAlgebra, n: int) -> SubalgebraSpan:
    """Span of the basis elements of filtration depth >= n (a coordinate span)."""
    idx = [i for i in range(alg.dim) if alg.filtration_depth[i] >= n]
    rows = np.zeros((len(idx), alg.dim), dtype=np.int64)
    rows[np.arange(len(idx)), idx] = 1
    return SubalgebraSpan(alg, rows, np.asarray(idx, dtype=np.int64), is_subalgebra=True)


GL2_SLOTS = (2, 3, 4, 5)  # x dy, Y, y dy - x dx, x dx + y dy


def gl2_projection(alg: RestrictedAlgebra, coords: np.ndarray) -> np.ndarray:
    """Image of a degree->=0 element in gl2 = head of the filtration.

    Sends x dx, y dy, x dy, Y to E11, E22, E12, E21; kernel is the depth >= 1
    part. Elements with a dx' or dy component are rejected.
    """
    coords = np.asarray(coords, dtype=np.int64) % alg.p
    if coords[0] or coords[1]:
        raise ValueError("element is not in the nonnegative filtration part")
    c_x, c_y, c_diff, c_sum = (int(coords[s]) for s in GL2_SLOTS)
    return np.array(
        [[(c_sum - c_diff) % alg.p, c_x], [c_y, (c_sum + c_diff) % alg.p]],
        dtype=np.int64,
    )


def spin_subalgebra(alg: RestrictedAlgebra, gens: list[Derivation]) -> SubalgebraSpan:
    """Smallest bracket-closed subspace of ``alg`` containing ``gens``."""
    p = alg.p
    S = alg.structure_constants().astype(np.float64)
    rows = np.stack([alg.coords(g) for g in gens])
    reduced, rank, piv = rref(rows, p)
    basis = reduced[:rank]
    frontier = basis
    while frontier.shape[0]:
        # brackets of the new directions against the whole current span
        # (antisymmetry covers the other order)
        new = np.einsum(
            "fi,ijk,bj->fbk",
            frontier.astype(np.float64), S, basis.astype(np.float64),
            optimize=True,
        )
        new = np.rint(new).astype(np.int64).reshape(-1, alg.dim) % p
        residue = reduce_rows(new, basis, piv, p)
        residue = residue[residue.any(axis=1)]
        if not residue.shape[0]:
            break
        fred, frank, _ = rref(residue, p)
        frontier = fred[:frank]
        merged, mrank, piv = rref(np.concatenate([basis, frontier]), p)
        basis = merged[:mrank]
    return SubalgebraSpan(alg, basis, piv, is_subalgebra=True)


WITT_ROLES = ["d"] + [f"x{j}d" if j > 1 else "xd" for j in range(1, 32)]


@functools.lru_cache(maxsize=None)
def build_W1_subalgebra(p: int) -> SubalgebraSpan:
    """The rank-one Witt subalgebra of the envelope, with role labels.

    Slot j plays the role of x^(j)d in W(1;1): slot 0 is dy, slot j >= 1 is
    y^(j)dy - x y^(j-1)dx. Closed under bracket and p-map.
    """
    alg = build_p_envelope(p)
    elems = [_second_family(p, 1, j) for j in range(p)]
    coords = np.stack([alg.coords(e) for e in elems])
    reduced, rank, piv = rref(coords, p)
    if rank != p:
        raise AssertionError("Witt subalgebra has wrong dimension")
    span = SubalgebraSpan(alg, reduced[:rank], piv, labels=WITT_ROLES[:p])
    # closure under bracket and p-power on the spanning elements
    for i, e1 in enumerate(elems):
        for e2 in elems[i + 1:]:
            if not span.contains_coords(alg.coords(bracket(e1, e2, p))):
                raise AssertionError("Witt span is not bracket-closed")
        if not span.contains_coords(alg.coords(p_power(e1, p))):
            raise AssertionError("Witt span is not p-map closed")
    span.is_subalgebra = True
    return span


def witt_elements(p: int) -> list[Derivation]:
    """The Witt basis in role order: dy, then y^(j)dy - x y^(j-1)dx."""
    return [_second_family(p, 1, j) for j in range(p)]
