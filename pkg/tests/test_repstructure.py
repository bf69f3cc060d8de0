"""Submodule lattice machinery: series, catalog, isomorphism testing."""

import numpy as np
import pytest

from hamrep.induction import build_induced
from hamrep.repstructure import (WeightPair, build_O_module, catalog,
                                 composition_series, dual_module,
                                 exceptional_weights, intertwiner_space,
                                 is_simple, iso_test, maximal_vectors,
                                 quotient_module, radical_series,
                                 radical_span, series_for_weight,
                                 simple_realization, socle_span,
                                 span_from_rows, span_sum, spin_submodule,
                                 submodule_module)

P = 5

# composition factors of Z(weight) as (label, dim) multisets
SERIES_P5 = {
    (0, 0): [((0, 4), 24), ((0, 0), 1)],
    (4, 4): [((4, 4), 24), ((0, 0), 1)],
    (1, 0): [((1, 1), 25), ((0, 4), 24), ((0, 0), 1)],
    (0, 4): [((4, 4), 24), ((0, 4), 24), ((0, 0), 1), ((0, 0), 1)],
    (4, 3): [((4, 4), 24), ((3, 3), 25), ((0, 0), 1)],
    (2, 1): [((2, 2), 25), ((1, 1), 25)],
    (3, 2): [((3, 3), 25), ((2, 2), 25)],
    (3, 1): [((3, 1), 75)],
}


def _pairs(factors):
    return sorted((f.weight, f.dim) for f in factors)


def test_frozen_series_tables_p5():
    for weight, want in SERIES_P5.items():
        got = _pairs(series_for_weight(P, weight))
        assert got == sorted(want), weight


def test_frozen_series_tables_p7():
    assert _pairs(series_for_weight(7, (0, 0))) == sorted(
        [((0, 6), 48), ((0, 0), 1)])
    assert _pairs(series_for_weight(7, (6, 5))) == sorted(
        [((6, 6), 48), ((5, 5), 49), ((0, 0), 1)])


def test_series_stable_under_reshuffling():
    for weight in [(0, 4), (1, 0)]:
        base = _pairs(series_for_weight(P, weight))
        for seed in range(5):
            rng = np.random.default_rng(seed)
            assert _pairs(series_for_weight(P, weight, rng=rng)) == base


def test_exceptional_set():
    assert exceptional_weights(P) == {
        (0, 0), (4, 4), (1, 0), (2, 1), (3, 2), (4, 3), (0, 4)}


def test_weightpair_normalization():
    w = WeightPair.of(P, (-1, -2))
    assert w.pair == (4, 3)
    assert w.diff == 1
    assert w.is_exceptional
    assert not WeightPair.of(P, (3, 1)).is_exceptional


def test_catalog_shape():
    entries = catalog(P, verify=False)
    assert len(entries) == P * P - P + 1
    by_weight = {e.weight: e for e in entries}
    assert by_weight[(0, 0)].dim == 1
    assert by_weight[(4, 4)].dim == 24
    assert by_weight[(4, 4)].aliases == ((4, 3),)
    assert by_weight[(0, 4)].realization == "cyclic submodule of Z(0,0)"
    assert by_weight[(2, 2)].aliases == ((2, 1),)
    assert by_weight[(3, 1)].dim == 75
    # descending order by weight
    weights = [e.weight for e in entries]
    assert weights == sorted(weights, reverse=True)


def test_alias_heads_are_isomorphic():
    # the head of Z(a, a-1) is the simple labeled (a, a)
    for a in range(1, P):
        head = simple_realization(P, (a, (a - 1) % P))
        target = simple_realization(P, (a, a))
        assert head.dim == target.dim
        assert iso_test(head, target)


def test_catalog_entries_pairwise_distinct():
    entries = catalog(P, verify=False)
    mods = {e.weight: simple_realization(P, e.weight) for e in entries}
    items = list(mods.items())
    for i, (w1, m1) in enumerate(items):
        for w2, m2 in items[i + 1:]:
            assert not iso_test(m1, m2), (w1, w2)


def test_socle_and_radical_of_host():
    z = build_induced(P, (0, 0))
    seed = np.zeros(z.dim, dtype=np.int64)
    seed[z.flat_index(0, 1)] = 1
    soc = socle_span(z)
    assert soc.dim == 24
    assert spin_submodule(z, seed[None, :]).dim == 24
    rad = radical_span(z)
    assert rad.dim == 24
    # simple module: zero radical, full socle
    simple = build_induced(P, (3, 1))
    assert radical_span(simple).dim == 0
    assert socle_span(simple).dim == simple.dim


def test_double_dual_restores_action():
    z = build_induced(P, (2, 1))
    dd = dual_module(dual_module(z))
    for a, b in zip(z.mats, dd.mats):
        assert np.array_equal(a, b)


def test_submodule_lattice_of_z04():
    z = build_induced(P, (0, 4))
    lines = {wt: rows for wt, rows in maximal_vectors(z)}
    v = lines[(4, 4)]
    assert v.shape == (1, z.dim)
    spin_v = spin_submodule(z, v)
    rad = radical_span(z)
    assert spin_v.dim == 24 and rad.dim == 26
    assert rad.contains(spin_v.rows)
    theta = np.zeros(z.dim, dtype=np.int64)
    theta[z.flat_index(0, 4, 1)] = 1
    phi = np.zeros(z.dim, dtype=np.int64)
    phi[z.flat_index(4, 0, 0)] = 1
    for extra in (theta, phi):
        assert rad.contains(extra[None, :])
        assert not spin_v.contains(extra[None, :])
    joined = span_sum(spin_v, span_from_rows(z, np.stack([theta, phi])))
    assert joined.dim == rad.dim and rad.contains(joined.rows)
    assert radical_series(z) == [24, 2, 24]


def test_quotient_and_submodule_dims_add_up():
    z = build_induced(P, (1, 0))
    soc = socle_span(z)
    sub = submodule_module(z, soc)
    quo = quotient_module(z, soc)
    assert sub.dim + quo.dim == z.dim
    assert is_simple(sub)


def test_intertwiners_certify_schur():
    simple = build_induced(P, (3, 1))
    assert iso_test(simple, simple)
    maps = intertwiner_space(simple, simple)
    assert len(maps) == 1  # End = k for an absolutely simple module


def test_o_module_weights_match_monomials():
    om = build_O_module(P)
    assert om.dim == P * P - 1
    # weights enumerate the nonconstant monomial exponents
    pairs = sorted(zip(om.wt_x.tolist(), om.wt_y.tolist()))
    want = sorted((a, b) for a in range(P) for b in range(P)
                  if (a, b) != (0, 0))
    assert pairs == want


def test_is_simple_spots_every_exceptional():
    for weight in [(1, 0), (0, 4), (0, 0), (4, 4)]:
        assert not is_simple(build_induced(P, weight))


def test_generic_module_has_only_the_top_maximal_vector():
    z = build_induced(P, (3, 1))
    out = maximal_vectors(z)
    assert [wt for wt, _ in out] == [(3, 1)]
    rows = out[0][1]
    want = np.zeros(z.dim, dtype=np.int64)
    want[z.flat_index(0, 0, z.n)] = 1
    assert rows.shape == (1, z.dim) and np.array_equal(rows[0], want)


def test_vector_mapped_into_submodule_without_joining_it():
    # In Z(-1,-2) the vector dx'^(p-1) dy^(p-2) (x) m2 is not inside the
    # submodule spun from the interior maximal vector, yet the whole
    # algebra maps it there.  Its image in the quotient spans a
    # one-dimensional submodule.
    from hamrep.kernels import matmul_mod
    z = build_induced(P, (P - 1, P - 2))
    rows = dict(maximal_vectors(z))[(P - 2, P - 2)]
    assert rows.shape[0] == 1
    sub = spin_submodule(z, rows[0])
    assert sub.dim == P * P
    gamma = np.zeros(z.dim, dtype=np.int64)
    gamma[z.flat_index(P - 1, P - 2, 1)] = 1
    assert not sub.contains(gamma)
    images = np.stack(
        [matmul_mod(m, gamma[:, None], P)[:, 0] for m in z.mats])
    assert sub.contains(images)
