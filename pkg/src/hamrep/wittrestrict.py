"""Restriction of modules to the rank-one Witt subalgebra.

The envelope contains a copy of W(1;1) spanned by dy and the elements
y^(j)dy - x y^(j-1)dx, playing the roles of d, xd, x^(2)d, ...  This
module computes how any of our matrix modules decomposes over that copy,
by two independent routes:

* a direct route: spin/quotient recursion on the restricted matrices,
  labelling each simple factor by dimension and maximal-vector weight;
* a graded route: the weight-list peeling algorithm for graded modules,
  run on explicit coordinate filtrations of the induced modules.

Both are compared against the closed-form restriction multiplicities.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .cartan import RestrictedAlgebra, build_p_envelope, p_power, witt_elements
from .dividedpowers import binom_mod
from .induction import InducedModule, build_induced
from .kernels import matmul_mod, matpow_mod, reduce_rows, rref
from .primefield import nullspace, validate_prime
from .repstructure import ModuleLike, WeightPair, simple_realization

__all__ = [
    "WittModule",
    "witt_bracket_coeff",
    "verify_witt_module",
    "chang_module",
    "witt_simple",
    "restrict_module",
    "check_grading",
    "weight_lists",
    "algorithm_on_lists",
    "graded_factors",
    "direct_factors",
    "closed_form_restriction",
    "guided_restriction",
    "catalog_rep",
    "BalancedReport",
    "balanced_toral_check",
]


def witt_bracket_coeff(a: int, b: int, p: int) -> int:
    """[x^(a)d, x^(b)d] = c * x^(a+b-1)d with c = C(a+b-1,a) - C(a+b-1,b)."""
    if a + b - 1 < 0 or a + b - 1 >= p:
        return 0
    return (binom_mod(a + b - 1, a, p) - binom_mod(a + b - 1, b, p)) % p


@dataclass
class WittModule:
    """A W(1;1)-module: one matrix per basis role x^(j)d, j = 0..p-1."""

    p: int
    mats: list[np.ndarray]
    label: str

    @property
    def dim(self) -> int:
        return int(self.mats[0].shape[0])

    @property
    def weights(self) -> np.ndarray:
        """Eigenvalues of the toral role element xd; requires it diagonal."""
        xd = self.mats[1]
        if np.any(xd != np.diag(np.diagonal(xd))):
            raise AssertionError("xd does not act diagonally")
        return np.diagonal(xd) % self.p


def verify_witt_module(wm: WittModule) -> WittModule:
    """Certify the bracket table and the p-th power behaviour, or raise."""
    p = wm.p
    for a in range(p):
        for b in range(a + 1, p):
            lhs = (matmul_mod(wm.mats[a], wm.mats[b], p)
                   - matmul_mod(wm.mats[b], wm.mats[a], p)) % p
            rhs = np.zeros_like(lhs)
            if a + b - 1 < p:
                rhs = (witt_bracket_coeff(a, b, p) * wm.mats[a + b - 1]) % p
            if not np.array_equal(lhs, rhs):
                raise AssertionError(
                    f"bracket mismatch for roles x^({a})d, x^({b})d in {wm.label}")
    for j in range(p):
        want = wm.mats[1] if j == 1 else np.zeros_like(wm.mats[1])
        if not np.array_equal(matpow_mod(wm.mats[j], p, p), want):
            raise AssertionError(f"p-th power of role x^({j})d is wrong in {wm.label}")
    return wm


def chang_module(p: int, r: int) -> WittModule:
    """The rank-one Verma module of highest weight r, dimension p.

    Basis d^i (x) v for 0 <= i < p; the role element x^(j)d sends it to
    (-1)^(j-1) (C(i,j-1) r - C(i,j)) d^(i-j+1) (x) v, with d itself the
    plain shift i -> i+1.
    """
    p = validate_prime(p)
    r %= p
    mats = []
    for j in range(p):
        mat = np.zeros((p, p), dtype=np.int64)
        for i in range(p):
            if j == 0:
                if i + 1 < p:
                    mat[i + 1, i] = 1
                continue
            tgt = i - j + 1
            if tgt < 0:
                continue
            c = (binom_mod(i, j - 1, p) * r - binom_mod(i, j, p)) % p
            if (j - 1) % 2:
                c = -c % p
            mat[tgt, i] = c
        mats.append(mat)
    return verify_witt_module(WittModule(p=p, mats=mats, label=f"Z+({r})"))


def witt_simple(p: int, r: int) -> WittModule:
    """The simple module L_W(r): the Verma module or its named quotient."""
    p = validate_prime(p)
    r %= p
    if r == 0:
        mats = [np.zeros((1, 1), dtype=np.int64) for _ in range(p)]
        return verify_witt_module(WittModule(p=p, mats=mats, label="L_W(0)"))
    full = chang_module(p, r)
    if r != p - 1:
        return full
    # the line d^(p-1) (x) v is a submodule; the simple quotient drops it
    keep = np.arange(p - 1)
    mats = []
    for mat in full.mats:
        if mat[np.ix_(keep, [p - 1])].any():
            raise AssertionError("top line of Z+(p-1) is not invariant")
        mats.append(mat[np.ix_(keep, keep)].copy())
    return verify_witt_module(WittModule(p=p, mats=mats, label="L_W(p-1)"))


def restrict_module(module: ModuleLike, verify: bool = True) -> WittModule:
    """Forget down to the Witt subalgebra inside the envelope."""
    mats = [module.action_from_coords(module.alg.coords(e))
            for e in witt_elements(module.p)]
    wm = WittModule(p=module.p, mats=mats, label=f"{module.label}|W")
    return verify_witt_module(wm) if verify else wm


# ---------------------------------------------------------------------------
# graded route


def check_grading(wm: WittModule, grades: np.ndarray):
    """Witness the grading conditions: d raises the grade by exactly 2 and
    xd preserves each graded piece (it must be diagonal here)."""
    grades = np.asarray(grades)
    rows, cols = np.nonzero(wm.mats[0])
    bad = np.nonzero(grades[rows] != grades[cols] + 2)[0]
    if bad.size:
        k = bad[0]
        raise AssertionError(
            f"d maps grade {grades[cols[k]]} to grade {grades[rows[k]]} "
            f"(basis {cols[k]} -> {rows[k]}) in {wm.label}")
    wm.weights  # raises unless xd is diagonal


def weight_lists(wm: WittModule, grades: np.ndarray) -> dict[int, Counter]:
    """Multiset of xd-weights per grade."""
    weights = wm.weights
    out: dict[int, Counter] = {}
    for idx, g in enumerate(np.asarray(grades)):
        out.setdefault(int(g), Counter())[int(weights[idx])] += 1
    return out


def algorithm_on_lists(ell: dict[int, Counter], p: int,
                       rng: np.random.Generator | None = None) -> Counter:
    """Peel composition factors off graded weight lists.

    Repeatedly: take the top nonempty grade, pick a weight mu there, record
    L_W(mu-1) (L_W(p-1) for mu=1, L_W(0) for mu=0), and remove the implied
    weight ladder from descending grades.  A missing weight means the input
    was not a valid graded module, and raises.
    """
    ell = {g: Counter(c) for g, c in ell.items() if sum(c.values())}
    factors: Counter = Counter()
    while ell:
        top = max(ell)
        avail = sorted(ell[top].elements())
        if rng is None:
            mu = avail[-1]
        else:
            mu = avail[int(rng.integers(len(avail)))]
        if mu == 0:
            factors[0] += 1
            ladder = [(top, 0)]
        elif mu == 1:
            factors[p - 1] += 1
            ladder = [(top - 2 * k, 1 + k) for k in range(p - 1)]
        else:
            factors[(mu - 1) % p] += 1
            ladder = [(top - 2 * k, (mu + k) % p) for k in range(p)]
        for g, w in ladder:
            bucket = ell.get(g)
            if bucket is None or bucket[w] <= 0:
                raise AssertionError(
                    f"needed weight {w} at grade {g} but it is absent")
            bucket[w] -= 1
            if not sum(bucket.values()):
                del ell[g]
    return factors


def graded_factors(wm: WittModule, grades: np.ndarray,
                   rng: np.random.Generator | None = None) -> Counter:
    check_grading(wm, grades)
    return algorithm_on_lists(weight_lists(wm, grades), wm.p, rng)


# ---------------------------------------------------------------------------
# direct route: socle peeling via explicit homomorphism spaces


def _witt_weight_groups(wm: WittModule) -> dict[int, np.ndarray]:
    weights = wm.weights
    return {int(w): np.nonzero(weights == w)[0]
            for w in sorted(set(weights.tolist()))}


def _witt_hom_basis(src: WittModule, dst: WittModule) -> list[np.ndarray]:
    """Basis of Hom_W(src, dst) as matrices T with T a_src = a_dst T.

    Unknowns are blocked per xd-weight (T preserves weights); every
    solution is certified against all p role matrices before return.
    """
    p = src.p
    gs = _witt_weight_groups(src)
    gd = _witt_weight_groups(dst)
    common = sorted(set(gs) & set(gd))
    offset: dict[int, int] = {}
    total = 0
    for w in common:
        offset[w] = total
        total += len(gd[w]) * len(gs[w])
    if total == 0:
        return []
    eq_rows = []
    for j in range(p):
        shift = (j - 1) % p  # role x^(j)d raises the xd-weight by j-1
        a = src.mats[j]
        b = dst.mats[j]
        for w in set(gs) | set(gd):
            tgt = (w + shift) % p
            # block equation T_tgt A|w - B|w T_w = 0 with absent blocks zero
            scols = gs.get(w, np.array([], dtype=np.int64))
            srows = gs.get(tgt, np.array([], dtype=np.int64))
            dcols = gd.get(w, np.array([], dtype=np.int64))
            drows = gd.get(tgt, np.array([], dtype=np.int64))
            blk_a = a[np.ix_(srows, scols)] if srows.size and scols.size else None
            blk_b = b[np.ix_(drows, dcols)] if drows.size and dcols.size else None
            has_t_tgt = tgt in offset and blk_a is not None
            has_t_w = w in offset and blk_b is not None
            if not (has_t_tgt or has_t_w):
                continue
            for r in range(len(drows)):
                for c in range(len(scols)):
                    row = np.zeros(total, dtype=np.int64)
                    if has_t_tgt:
                        base = offset[tgt]
                        k_dim = len(srows)
                        for k in range(k_dim):
                            row[base + r * k_dim + k] += blk_a[k, c]
                    if has_t_w:
                        base = offset[w]
                        ds_w = len(gs[w])
                        for k in range(len(dcols)):
                            row[base + k * ds_w + c] -= blk_b[r, k]
                    if row.any():
                        eq_rows.append(row % p)
    sols = (nullspace(np.stack(eq_rows), p) if eq_rows
            else np.eye(total, dtype=np.int64))
    out = []
    for sol in sols:
        t_full = np.zeros((dst.dim, src.dim), dtype=np.int64)
        for w in common:
            ds, dd = len(gs[w]), len(gd[w])
            blk = sol[offset[w]:offset[w] + dd * ds].reshape(dd, ds)
            t_full[np.ix_(gd[w], gs[w])] = blk
        ok = all(
            np.array_equal(matmul_mod(t_full, src.mats[j], p),
                           matmul_mod(dst.mats[j], t_full, p))
            for j in range(p))
        if not ok:
            raise AssertionError("hom solver produced a non-intertwiner")
        if t_full.any():
            out.append(t_full)
    return out


def _witt_quotient(wm: WittModule, rows: np.ndarray) -> WittModule:
    """Quotient by the row-span (must be invariant; rows weight-homogeneous)."""
    p = wm.p
    reduced, rank, pivots = rref(np.atleast_2d(rows) % p, p)
    basis = reduced[:rank]
    weights = wm.weights
    for row in basis:
        if len(set(weights[np.nonzero(row)[0]].tolist())) != 1:
            raise AssertionError("socle basis row mixes xd-weights")
    rest = np.setdiff1d(np.arange(wm.dim), pivots)
    s_t = basis.T
    quo_mats = []
    for mat in wm.mats:
        if reduce_rows(matmul_mod(basis, mat.T, p), basis, pivots, p).any():
            raise AssertionError("socle span is not invariant")
        img = mat[:, rest] % p
        red = (img - matmul_mod(s_t, img[pivots, :], p)) % p
        quo_mats.append(red[rest, :])
    return WittModule(p=p, mats=quo_mats, label=f"{wm.label}/soc")


def direct_factors(wm: WittModule,
                   rng: np.random.Generator | None = None) -> Counter:
    """Composition factors by socle peeling; Counter {r: multiplicity}.

    Each round solves Hom(L_W(r), M) for every r: the images sum to the
    socle, and the solution-space dimension is the multiplicity of L_W(r)
    in it (endomorphism rings are one-dimensional, which is asserted).
    The rng reorders the reference simples; the result must not depend
    on it.
    """
    p = wm.p
    simples = [witt_simple(p, r) for r in range(p)]
    for r, s in enumerate(simples):
        if len(_witt_hom_basis(s, s)) != 1:
            raise AssertionError(f"End of L_W({r}) is not one-dimensional")
    factors: Counter = Counter()
    current = wm
    while current.dim:
        order = list(range(p))
        if rng is not None:
            order = [order[i] for i in rng.permutation(p)]
        soc_rows = []
        for r in order:
            homs = _witt_hom_basis(simples[r], current)
            if homs:
                factors[r] += len(homs)
                soc_rows.extend(t.T for t in homs)
        if not soc_rows:
            raise AssertionError("nonzero module with empty socle")
        current = _witt_quotient(current, np.concatenate(soc_rows, axis=0))
    return factors


# ---------------------------------------------------------------------------
# closed-form expectation and the guided graded pipeline


def catalog_rep(p: int, weight) -> tuple[int, int]:
    """Canonical catalog label of the simple with the given highest weight."""
    w = WeightPair.of(p, weight)
    if w.diff == 1 and w.pair != (0, p - 1):
        return (w.l1, w.l1)
    return w.pair


def closed_form_restriction(p: int, weight) -> Counter:
    """Expected multiset of Witt factors for the simple labelled by weight."""
    p = validate_prime(p)
    rep = catalog_rep(p, weight)
    w = WeightPair.of(p, rep)
    if rep == (0, 0):
        return Counter({0: 1})
    if rep in {(p - 1, p - 1), (0, p - 1)}:
        out = Counter({j: 1 for j in range(p - 1)})
        out[p - 1] = 2
        return out
    r = w.diff
    out = Counter({j: r + 1 for j in range(1, p - 1)})
    out[0] = 2 * (r + 1)
    out[p - 1] = 2 * (r + 1)
    return out


def _coordinate_subquotient(wm: WittModule, inside: np.ndarray,
                            modded: np.ndarray) -> tuple[WittModule, np.ndarray]:
    """Subquotient spanned by coordinate vectors inside \\ modded.

    Both index sets must be invariant; violations raise with a witness.
    """
    inside_set = set(inside.tolist())
    modded_set = set(modded.tolist())
    if not modded_set <= inside_set:
        raise ValueError("modded indices must lie inside")
    sel = np.array(sorted(inside_set - modded_set), dtype=np.int64)
    for j, mat in enumerate(wm.mats):
        for name, idx_set, idx in (("inside", inside_set, inside),
                                   ("modded", modded_set, modded)):
            if idx.size == 0:
                continue
            leaked = [int(r) for r in np.unique(np.nonzero(mat[:, idx])[0])
                      if int(r) not in idx_set]
            if leaked:
                raise AssertionError(
                    f"role x^({j})d leaks {name} span at rows {leaked[:4]} "
                    f"in {wm.label}")
    piece = WittModule(p=wm.p, mats=[m[np.ix_(sel, sel)].copy() for m in wm.mats],
                       label=f"{wm.label}[{len(sel)}]")
    return piece, sel


def _flat_indices(z: InducedModule, a1_range, comps) -> np.ndarray:
    out = [z.flat_index(a1, a2, c)
           for a1 in a1_range for a2 in range(z.p) for c in comps]
    return np.array(sorted(out), dtype=np.int64)


def guided_restriction(p: int, weight,
                       rng: np.random.Generator | None = None
                       ) -> tuple[Counter, list[tuple[str, Counter]]]:
    """Witt factors of the simple labelled by weight, via graded pieces.

    Follows an explicit coordinate filtration of the relevant induced
    module; each piece is graded by twice the dy-exponent and peeled with
    the list algorithm.  Returns the total and the per-piece factors.
    """
    p = validate_prime(p)
    rep = catalog_rep(p, weight)
    if rep == (0, 0):
        # the trivial module restricts to the trivial Witt module
        piece = verify_witt_module(restrict_module(simple_realization(p, rep)))
        if piece.dim != 1 or any(m.any() for m in piece.mats):
            raise AssertionError("head of Z(0,0) is not trivial over W")
        return Counter({0: 1}), [("trivial", Counter({0: 1}))]

    pieces: list[tuple[str, Counter]] = []
    total: Counter = Counter()

    def peel(name: str, wm: WittModule, inside: np.ndarray,
             modded: np.ndarray, grades_by_flat) -> None:
        piece, sel = _coordinate_subquotient(wm, inside, modded)
        verify_witt_module(piece)
        grades = np.array([grades_by_flat(int(f)) for f in sel], dtype=np.int64)
        fac = graded_factors(piece, grades, rng)
        pieces.append((name, fac))
        total.update(fac)

    if rep == (p - 1, p - 1):
        z = build_induced(p, rep)
        wm = restrict_module(z)
        corner = np.array([z.flat_index(p - 1, p - 1)], dtype=np.int64)
        low = _flat_indices(z, range(p - 1), [0])
        m1 = np.array(sorted(set(low.tolist()) | set(corner.tolist())),
                      dtype=np.int64)
        grade2b = lambda f: 2 * z.index_tuple(f)[1]
        # the corner line is killed in the simple quotient, so peel the
        # low block modulo it, then the top dx'-layer minus the corner
        peel("low block", wm, m1, corner, grade2b)
        allidx = np.arange(z.dim, dtype=np.int64)
        peel("top layer", wm, allidx, m1, grade2b)
        return total, pieces

    if rep == (0, p - 1):
        z = build_induced(p, (0, 0))
        wm = restrict_module(z)
        origin = np.array([z.flat_index(0, 0)], dtype=np.int64)
        sub = np.array([i for i in range(z.dim)
                        if i != int(origin[0])], dtype=np.int64)
        low = np.array([i for i in _flat_indices(z, range(p - 1), [0])
                        if i != int(origin[0])], dtype=np.int64)
        grade2b = lambda f: 2 * z.index_tuple(f)[1]
        peel("low block", wm, low, np.array([], dtype=np.int64), grade2b)
        peel("top layer", wm, sub, low, grade2b)
        return total, pieces

    # non-exceptional: peel the filtration by gl2 components, lowest
    # xd-weight component first, then the top dx'-layer
    z = build_induced(p, rep)
    wm = restrict_module(z)
    grade2b = lambda f: 2 * z.index_tuple(f)[1]
    prev = np.array([], dtype=np.int64)
    for k in range(z.n + 1):
        cur = _flat_indices(z, range(p - 1), range(k + 1))
        peel(f"component {k}", wm, cur, prev, grade2b)
        prev = cur
    allidx = np.arange(z.dim, dtype=np.int64)
    peel("top layer", wm, allidx, prev, grade2b)
    return total, pieces


# ---------------------------------------------------------------------------
# balanced toral elements


@dataclass(frozen=True)
class BalancedReport:
    p: int
    is_toral: bool
    eigendims: dict[int, int]
    nonzero_common: int | None
    is_balanced: bool
    d: int


def balanced_toral_check(alg: RestrictedAlgebra, h_coords: np.ndarray,
                         d: int = 1) -> BalancedReport:
    """Eigenspace dimensions of ad h and the d-balance property.

    h is toral when h^[p] = h; balanced when all nonzero-eigenvalue spaces
    have equal dimension divisible by d.
    """
    p = alg.p
    h_coords = np.asarray(h_coords, dtype=np.int64) % p
    h = alg.element(h_coords)
    toral = np.array_equal(alg.coords(p_power(h, p)), h_coords)
    ad = alg.ad_matrix(h)
    dims: dict[int, int] = {}
    for c in range(p):
        shifted = ad.copy()
        idx = np.arange(alg.dim)
        shifted[idx, idx] = (shifted[idx, idx] - c) % p
        _, rank, _ = rref(shifted, p)
        dims[c] = alg.dim - rank
    if toral and sum(dims.values()) != alg.dim:
        # a toral element is ad-semisimple, so this cannot happen
        raise AssertionError("ad h is not diagonalizable over F_p")
    nonzero = [dims[c] for c in range(1, p)]
    common = nonzero[0] if len(set(nonzero)) == 1 else None
    balanced = bool(toral and common is not None and common % d == 0
                    and common > 0)
    return BalancedReport(p=p, is_toral=toral, eigendims=dims,
                          nonzero_common=common, is_balanced=balanced, d=d)
