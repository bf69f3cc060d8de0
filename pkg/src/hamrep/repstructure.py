"""Structure analysis for modules over the Hamiltonian p-envelope.

Everything here works with explicit matrices over F_p: weight spaces are
read off diagonal toral matrices, maximal vectors are kernels of the
annihilating generators, submodules are spun up from seed vectors, and
composition series come from recursive spin/quotient splitting.  Simple
factors are labelled by the lexicographically largest weight of their
maximal vectors; remaining maximal weights are kept as aliases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering

import numpy as np

from .cartan import RestrictedAlgebra, build_p_envelope, d_apply
from .dividedpowers import dp_terms
from .induction import InducedModule, build_induced
from .kernels import matmul_mod, reduce_rows, rref
from .primefield import nullspace, validate_prime

__all__ = [
    "WeightPair",
    "exceptional_weights",
    "MatrixModule",
    "SubSpan",
    "span_from_rows",
    "span_sum",
    "maximal_vectors",
    "maximal_lines",
    "spin_submodule",
    "submodule_module",
    "quotient_module",
    "dual_module",
    "socle_span",
    "radical_span",
    "radical_series",
    "is_simple",
    "CompositionFactor",
    "composition_series",
    "series_for_weight",
    "CatalogEntry",
    "catalog",
    "simple_realization",
    "intertwiner_space",
    "iso_test",
    "build_O_module",
]

# named elements that annihilate maximal vectors; they generate the
# positive part of the triangular decomposition (checked at p = 5, 7, 11)
MAXIMAL_KILLERS = ("X", "xp1dy", "A", "C", "J")

# generating set used to spin up submodules (full generation is checked
# against the whole basis after the loop stabilises)
SPIN_GENS = ("X", "xp1dy", "A", "C", "J", "Y", "dxp", "dy", "hdiff", "tsum")


@total_ordering
@dataclass(frozen=True)
class WeightPair:
    """A weight of the two-dimensional torus, stored canonically in [0, p)."""

    l1: int
    l2: int
    p: int

    @classmethod
    def of(cls, p: int, pair) -> "WeightPair":
        l1, l2 = int(pair[0]) % p, int(pair[1]) % p
        return cls(l1, l2, p)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.l1, self.l2)

    @property
    def diff(self) -> int:
        return (self.l1 - self.l2) % self.p

    @property
    def is_exceptional(self) -> bool:
        """Weights whose induced module fails to be simple."""
        return self.diff == 1 or self.pair in {(0, 0), (self.p - 1, self.p - 1)}

    def __str__(self) -> str:
        return f"({self.l1},{self.l2})"

    def __lt__(self, other: "WeightPair") -> bool:
        return (self.l1, self.l2) < (other.l1, other.l2)


def exceptional_weights(p: int) -> set[tuple[int, int]]:
    out = {(0, 0), (p - 1, p - 1)}
    out.update({(a, (a - 1) % p) for a in range(p)})
    return out


@dataclass
class MatrixModule:
    """A module given by one matrix per envelope basis element."""

    p: int
    alg: RestrictedAlgebra
    mats: list[np.ndarray]
    wt_x: np.ndarray
    wt_y: np.ndarray
    label: str
    _named: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return 0 if not self.mats else int(self.mats[0].shape[0])

    def action_from_coords(self, coords: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for c, mat in zip(np.asarray(coords) % self.p, self.mats):
            if c:
                out += int(c) * mat
        return out % self.p

    def named_matrix(self, name: str) -> np.ndarray:
        if name not in self._named:
            self._named[name] = self.action_from_coords(
                self.alg.coords(self.alg.named[name]))
        return self._named[name]


ModuleLike = InducedModule | MatrixModule


@dataclass
class SubSpan:
    """A subspace in reduced row form, tied to its ambient module."""

    module: ModuleLike
    rows: np.ndarray
    pivots: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.rows.shape[0])

    def contains(self, vecs: np.ndarray) -> bool:
        vecs = np.atleast_2d(vecs) % self.module.p
        if self.dim == 0:
            return not vecs.any()
        return not reduce_rows(vecs, self.rows, self.pivots, self.module.p).any()


def span_from_rows(module: ModuleLike, rows: np.ndarray) -> SubSpan:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64)) % module.p
    reduced, rank, piv = rref(rows, module.p)
    return SubSpan(module, reduced[:rank], piv[:rank] if len(piv) > rank else piv)


def span_sum(*spans: SubSpan) -> SubSpan:
    module = spans[0].module
    rows = np.concatenate([s.rows for s in spans], axis=0)
    return span_from_rows(module, rows)


def _weight_groups(module: ModuleLike) -> dict[tuple[int, int], np.ndarray]:
    groups: dict[tuple[int, int], list[int]] = {}
    for col in range(module.dim):
        groups.setdefault((int(module.wt_x[col]), int(module.wt_y[col])),
                          []).append(col)
    return {wt: np.asarray(cols, dtype=np.int64)
            for wt, cols in groups.items()}


def maximal_vectors(module: ModuleLike):
    """All weight vectors killed by the annihilating generators.

    Returns a list of (weight, rows) pairs, weights in descending order,
    rows spanning the solution space at that weight.  An empty list would
    flag a degenerate module, so it raises instead: every nonzero module
    has a maximal vector.
    """
    p = module.p
    kills = [module.named_matrix(k) for k in MAXIMAL_KILLERS]
    groups = _weight_groups(module)
    out = []
    for wt in sorted(groups, reverse=True):
        cols = groups[wt]
        stacked = np.concatenate([k[:, cols] for k in kills], axis=0)
        basis = nullspace(stacked, p)
        if basis.shape[0]:
            vecs = np.zeros((basis.shape[0], module.dim), dtype=np.int64)
            vecs[:, cols] = basis
            out.append((wt, vecs))
    if module.dim and not out:
        raise AssertionError("module has no maximal vector")
    return out


def _lines_of_space(rows: np.ndarray, p: int) -> list[np.ndarray]:
    """Representatives of the one-dimensional subspaces of a row space."""
    k = rows.shape[0]
    if k == 1:
        return [rows[0]]
    if k > 3:
        raise AssertionError("maximal vector space too large to enumerate")
    reps = []
    for flat in range(1, p ** k):
        coeffs = np.array([(flat // p ** i) % p for i in range(k)],
                          dtype=np.int64)
        lead = np.nonzero(coeffs)[0][0]
        if coeffs[lead] != 1:
            continue
        reps.append(coeffs @ rows % p)
    return reps


def maximal_lines(module: ModuleLike):
    """(weight, vector) for every line of maximal vectors, weights descending."""
    out = []
    for wt, rows in maximal_vectors(module):
        for vec in _lines_of_space(rows, module.p):
            out.append((wt, vec))
    return out


def spin_submodule(module: ModuleLike, seeds: np.ndarray) -> SubSpan:
    """Smallest submodule containing the seed rows.

    Spins with the generating set, then certifies closure under every
    basis element of the envelope.
    """
    p = module.p
    gens = [module.named_matrix(k) for k in SPIN_GENS]
    seeds = np.atleast_2d(np.asarray(seeds, dtype=np.int64)) % p
    reduced, rank, pivots = rref(seeds, p)
    basis = reduced[:rank]
    frontier = basis
    while frontier.shape[0] and basis.shape[0] < module.dim:
        cand = np.concatenate(
            [matmul_mod(frontier, g.T, p) for g in gens], axis=0)
        resid = reduce_rows(cand, basis, pivots, p)
        resid = resid[resid.any(axis=1)]
        if not resid.shape[0]:
            break
        fred, frank, _ = rref(resid, p)
        frontier = fred[:frank]
        merged, rank, pivots = rref(
            np.concatenate([basis, frontier], axis=0), p)
        basis = merged[:rank]
    span = SubSpan(module, basis, pivots)
    for mat in module.mats:
        if not span.contains(matmul_mod(basis, mat.T, p)):
            raise AssertionError("spin result is not closed under the algebra")
    return span


def _check_weight_rows(module: ModuleLike, span: SubSpan):
    """Each reduced row must be weight-homogeneous; return its weights."""
    wts = []
    for row, piv in zip(span.rows, span.pivots):
        cols = np.nonzero(row)[0]
        wx = set(int(module.wt_x[c]) for c in cols)
        wy = set(int(module.wt_y[c]) for c in cols)
        if len(wx) != 1 or len(wy) != 1:
            raise AssertionError("subspace is not weight-graded")
        wts.append((int(module.wt_x[piv]), int(module.wt_y[piv])))
    return wts


def submodule_module(module: ModuleLike, span: SubSpan,
                     label: str | None = None) -> MatrixModule:
    """The span as a module in its own right, in the row basis of the span."""
    p = module.p
    s_t = span.rows.T
    piv = span.pivots
    mats = []
    for mat in module.mats:
        image = matmul_mod(mat, s_t, p)
        coords = image[piv, :] % p
        if not np.array_equal(matmul_mod(s_t, coords, p), image):
            raise AssertionError("span is not invariant under the algebra")
        mats.append(coords)
    wts = _check_weight_rows(module, span)
    sub = MatrixModule(
        p=p, alg=module.alg, mats=mats,
        wt_x=np.array([w[0] for w in wts], dtype=np.int64),
        wt_y=np.array([w[1] for w in wts], dtype=np.int64),
        label=label or f"sub[{span.dim}] of {module.label}")
    _check_torus_diag(sub)
    return sub


def quotient_module(module: ModuleLike, span: SubSpan,
                    label: str | None = None) -> MatrixModule:
    """The quotient by an invariant span, on the non-pivot coordinates."""
    p = module.p
    _check_weight_rows(module, span)
    piv = span.pivots
    rest = np.setdiff1d(np.arange(module.dim), piv)
    s_t = span.rows.T
    mats = []
    for mat in module.mats:
        if not span.contains(matmul_mod(span.rows, mat.T, p)):
            raise AssertionError("span is not invariant under the algebra")
        image = mat[:, rest] % p
        reduced = (image - matmul_mod(s_t, image[piv, :], p)) % p
        mats.append(reduced[rest, :])
    quo = MatrixModule(
        p=p, alg=module.alg, mats=mats,
        wt_x=module.wt_x[rest].copy(), wt_y=module.wt_y[rest].copy(),
        label=label or f"{module.label} / [{span.dim}]")
    _check_torus_diag(quo)
    return quo


def _check_torus_diag(module: MatrixModule):
    p = module.p
    want_diff = np.diag((module.wt_y - module.wt_x) % p)
    want_sum = np.diag((module.wt_x + module.wt_y) % p)
    if not (np.array_equal(module.named_matrix("hdiff"), want_diff)
            and np.array_equal(module.named_matrix("tsum"), want_sum)):
        raise AssertionError("toral action is not the expected diagonal")


def dual_module(module: ModuleLike) -> MatrixModule:
    """Contragredient module: b acts by minus the transpose."""
    p = module.p
    return MatrixModule(
        p=p, alg=module.alg,
        mats=[(-m.T) % p for m in module.mats],
        wt_x=(-np.asarray(module.wt_x)) % p,
        wt_y=(-np.asarray(module.wt_y)) % p,
        label=f"dual({module.label})")


def socle_span(module: ModuleLike) -> SubSpan:
    """Sum of all simple submodules (each is spun from a maximal line)."""
    pieces = []
    saw_full = False
    for _, vec in maximal_lines(module):
        span = spin_submodule(module, vec[None, :])
        if span.dim == module.dim:
            saw_full = True
            continue
        if is_simple(submodule_module(module, span)):
            pieces.append(span)
    if pieces:
        return span_sum(*pieces)
    if saw_full:
        # every maximal line generates the module, so it is simple
        return span_from_rows(module, np.eye(module.dim, dtype=np.int64))
    raise AssertionError("socle search found no simple submodule")


def radical_span(module: ModuleLike) -> SubSpan:
    """Smallest submodule with semisimple quotient, via the dual socle."""
    soc = socle_span(dual_module(module))
    rows = nullspace(soc.rows, module.p)
    return span_from_rows(module, rows)


def radical_series(module: ModuleLike) -> list[int]:
    """Dimensions of the radical layers, head first."""
    layers = []
    current: ModuleLike = module
    while current.dim:
        rad = radical_span(current)
        layers.append(current.dim - rad.dim)
        if rad.dim == 0:
            break
        current = submodule_module(current, rad)
    return layers


def is_simple(module: ModuleLike, generator_index: int | None = None) -> bool:
    """True iff every maximal vector generates the whole module."""
    if module.dim == 0:
        return False
    lines = maximal_lines(module)
    if generator_index is not None:
        only_gen = all(
            not np.any(np.delete(vec, generator_index))
            for _, vec in lines)
        if only_gen:
            return True
    for _, vec in lines:
        if spin_submodule(module, vec[None, :]).dim < module.dim:
            return False
    return True


@dataclass(frozen=True)
class CompositionFactor:
    """A simple factor: canonical label, dimension, alias weights."""

    weight: tuple[int, int]
    dim: int
    aliases: tuple[tuple[int, int], ...] = ()

    def __str__(self) -> str:
        return f"L{self.weight} [dim {self.dim}]"


def _factor_of(module: ModuleLike) -> CompositionFactor:
    wts = sorted({wt for wt, _ in maximal_vectors(module)}, reverse=True)
    return CompositionFactor(weight=wts[0], dim=module.dim,
                             aliases=tuple(wts[1:]))


def _series_factors(module: ModuleLike,
                    rng: np.random.Generator | None) -> list[CompositionFactor]:
    lines = maximal_lines(module)
    if rng is not None:
        lines = [lines[i] for i in rng.permutation(len(lines))]
    for _, vec in lines:
        span = spin_submodule(module, vec[None, :])
        if 0 < span.dim < module.dim:
            sub = submodule_module(module, span)
            quo = quotient_module(module, span)
            return _series_factors(sub, rng) + _series_factors(quo, rng)
    return [_factor_of(module)]


def composition_series(module: ModuleLike,
                       rng: np.random.Generator | None = None
                       ) -> list[CompositionFactor]:
    """Simple factors with multiplicity, sorted by descending label then dim."""
    factors = _series_factors(module, rng)
    return sorted(factors, key=lambda f: (f.weight, f.dim), reverse=True)


def series_for_weight(p: int, weight: tuple[int, int],
                      rng: np.random.Generator | None = None
                      ) -> list[CompositionFactor]:
    return composition_series(build_induced(p, weight), rng)


@dataclass(frozen=True)
class CatalogEntry:
    weight: tuple[int, int]
    dim: int
    aliases: tuple[tuple[int, int], ...]
    realization: str


def simple_realization(p: int, weight: tuple[int, int]) -> ModuleLike:
    """An explicit copy of the simple module with the given catalog label."""
    p = validate_prime(p)
    w = WeightPair.of(p, weight)
    if not w.is_exceptional:
        return build_induced(p, w.pair)
    if w.pair == (0, p - 1):
        host = build_induced(p, (0, 0))
        seed = np.zeros(host.dim, dtype=np.int64)
        seed[host.flat_index(0, 1)] = 1
        return submodule_module(host, spin_submodule(host, seed),
                                label=f"L({w.l1},{w.l2})")
    if w.pair == (0, 0):
        host = build_induced(p, (0, 0))
        seed = np.zeros(host.dim, dtype=np.int64)
        seed[host.flat_index(0, 1)] = 1
        return quotient_module(host, spin_submodule(host, seed),
                               label="L(0,0)")
    if w.pair == (p - 1, p - 1):
        host = build_induced(p, (p - 1, p - 1))
        seed = np.zeros(host.dim, dtype=np.int64)
        seed[host.flat_index(p - 1, p - 1)] = 1
        return quotient_module(host, spin_submodule(host, seed),
                               label=f"L({p - 1},{p - 1})")
    # remaining exceptional weights have difference one: the simple head
    # is the quotient by the radical
    host = build_induced(p, w.pair)
    return quotient_module(host, radical_span(host),
                           label=f"L({w.l1},{w.l2})")


def catalog(p: int, verify: bool = True) -> list[CatalogEntry]:
    """All simple restricted modules: one entry per isomorphism class.

    Representatives are the weights with difference != 1 plus (0, p-1).
    With verify=True each non-exceptional induced module is checked to be
    simple and each exceptional simple is explicitly constructed.
    """
    p = validate_prime(p)
    entries = []
    for l1 in range(p - 1, -1, -1):
        for l2 in range(p - 1, -1, -1):
            w = WeightPair.of(p, (l1, l2))
            if w.diff == 1 and w.pair != (0, p - 1):
                continue
            if w.pair == (0, 0):
                dim, realization = 1, "head of Z(0,0)"
            elif w.pair == (p - 1, p - 1):
                dim, realization = p * p - 1, f"head of Z({p - 1},{p - 1})"
            elif w.pair == (0, p - 1):
                dim, realization = p * p - 1, "cyclic submodule of Z(0,0)"
            else:
                dim, realization = p * p * (w.diff + 1), f"Z({l1},{l2})"
            aliases = ()
            if w.diff == 0 and l1 != 0:
                aliases = ((l1, (l2 - 1) % p),)
            if verify:
                if w.is_exceptional:
                    real = simple_realization(p, w.pair)
                    if real.dim != dim or not is_simple(real):
                        raise AssertionError(
                            f"realization of L{w} is not the expected simple")
                else:
                    mod = build_induced(p, w.pair)
                    if not is_simple(mod, generator_index=mod.flat_index(
                            0, 0, mod.n)):
                        raise AssertionError(f"Z{w} is unexpectedly non-simple")
            entries.append(CatalogEntry(weight=w.pair, dim=dim,
                                        aliases=aliases,
                                        realization=realization))
    return entries


def _weight_shift(module: ModuleLike, mat: np.ndarray) -> tuple[int, int] | None:
    rows, cols = np.nonzero(mat)
    if len(rows) == 0:
        return None
    p = module.p
    sx = (module.wt_x[rows] - module.wt_x[cols]) % p
    sy = (module.wt_y[rows] - module.wt_y[cols]) % p
    if len(set(sx.tolist())) != 1 or len(set(sy.tolist())) != 1:
        raise AssertionError("generator is not weight-homogeneous")
    return int(sx[0]), int(sy[0])


def intertwiner_space(m1: ModuleLike, m2: ModuleLike) -> list[np.ndarray]:
    """Basis of Hom over the envelope, as full matrices T with T a1 = a2 T.

    Solves the commutation equations blockwise per weight against the
    generating set, then certifies each solution against every basis
    element.
    """
    p = m1.p
    g1 = _weight_groups(m1)
    g2 = _weight_groups(m2)
    if {wt: len(c) for wt, c in g1.items()} != {wt: len(c) for wt, c in g2.items()}:
        return []
    weights = sorted(g1)
    offset: dict[tuple[int, int], int] = {}
    total = 0
    for wt in weights:
        offset[wt] = total
        total += len(g2[wt]) * len(g1[wt])
    eq_rows = []
    for name in SPIN_GENS:
        a1 = m1.named_matrix(name)
        a2 = m2.named_matrix(name)
        s1 = _weight_shift(m1, a1)
        s2 = _weight_shift(m2, a2)
        if s1 is None and s2 is None:
            continue
        if s1 is None or s2 is None:
            return []
        if s1 != s2:
            return []
        for wt in weights:
            tgt = ((wt[0] + s1[0]) % p, (wt[1] + s1[1]) % p)
            if tgt not in g1:
                continue
            blk1 = a1[np.ix_(g1[tgt], g1[wt])]
            blk2 = a2[np.ix_(g2[tgt], g2[wt])]
            d1 = len(g1[wt])
            d1t = len(g1[tgt])
            # unknowns: T_tgt (d1t x d1t) and T_wt (d1 x d1); equation
            # T_tgt blk1 - blk2 T_wt = 0, entrywise (r, c)
            for r in range(d1t):
                for c in range(d1):
                    row = np.zeros(total, dtype=np.int64)
                    base_t = offset[tgt]
                    for k in range(d1t):
                        row[base_t + r * d1t + k] += blk1[k, c]
                    base_s = offset[wt]
                    for k in range(d1):
                        row[base_s + k * d1 + c] -= blk2[r, k]
                    eq_rows.append(row % p)
    if eq_rows:
        sols = nullspace(np.stack(eq_rows), p)
    else:
        sols = np.eye(total, dtype=np.int64)
    out = []
    for sol in sols:
        t_full = np.zeros((m2.dim, m1.dim), dtype=np.int64)
        for wt in weights:
            d1 = len(g1[wt])
            blk = sol[offset[wt]:offset[wt] + d1 * d1].reshape(d1, d1)
            t_full[np.ix_(g2[wt], g1[wt])] = blk
        ok = all(
            np.array_equal(matmul_mod(t_full, b1, p), matmul_mod(b2, t_full, p))
            for b1, b2 in zip(m1.mats, m2.mats))
        if ok and t_full.any():
            out.append(t_full)
    return out


def iso_test(m1: ModuleLike, m2: ModuleLike) -> bool:
    """Decide isomorphism of two simple modules via an explicit intertwiner."""
    if m1.dim != m2.dim:
        return False
    maps = intertwiner_space(m1, m2)
    if not maps:
        return False
    t = maps[0]
    _, rank, _ = rref(t, m1.p)
    if rank != m1.dim:
        raise AssertionError("nonzero intertwiner between simples is singular")
    return True


def build_O_module(p: int) -> MatrixModule:
    """Truncated divided power functions modulo constants, dim p^2 - 1."""
    p = validate_prime(p)
    alg = build_p_envelope(p)
    monos = [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]
    index = {m: i for i, m in enumerate(monos)}
    dim = len(monos)
    mats = []
    for d in alg.basis:
        mat = np.zeros((dim, dim), dtype=np.int64)
        for col, mono in enumerate(monos):
            img = d_apply(d, dp_terms((*mono, 1)), p)
            for tgt, coeff in img.items():
                if tgt != (0, 0) and coeff % p:
                    mat[index[tgt], col] = coeff % p
        mats.append(mat)
    mod = MatrixModule(
        p=p, alg=alg, mats=mats,
        wt_x=np.array([m[0] for m in monos], dtype=np.int64),
        wt_y=np.array([m[1] for m in monos], dtype=np.int64),
        label="O/k")
    _check_torus_diag(mod)
    return mod
