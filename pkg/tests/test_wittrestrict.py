"""Restriction to the rank-one Witt subalgebra, three independent routes."""

from collections import Counter

import numpy as np
import pytest

import hamrep.wittrestrict as wr
from hamrep.repstructure import simple_realization

P = 5


def test_witt_bracket_coeff():
    # [x^(a)d, x^(b)d] lives at x^(a+b-1)d; the table is antisymmetric
    for p in (5, 7):
        for a in range(p):
            for b in range(p):
                lhs = wr.witt_bracket_coeff(a, b, p)
                rhs = wr.witt_bracket_coeff(b, a, p)
                assert (lhs + rhs) % p == 0
        assert wr.witt_bracket_coeff(1, 0, p) == p - 1  # [xd, d] = -d


def test_chang_modules_self_verify():
    for p in (5, 7):
        for r in range(p):
            zm = wr.chang_module(p, r)
            assert zm.dim == p
            assert np.array_equal(zm.weights, (r - np.arange(p)) % p)


def test_witt_simples_dims():
    for p in (5, 7):
        dims = [wr.witt_simple(p, r).dim for r in range(p)]
        assert dims == [1] + [p] * (p - 2) + [p - 1]


def test_direct_factors_recognize_the_simples():
    for r in range(P):
        lw = wr.witt_simple(P, r)
        assert wr.direct_factors(lw) == Counter({r: 1})


def test_closed_form_restriction_shapes():
    assert wr.closed_form_restriction(P, (0, 0)) == Counter({0: 1})
    both = Counter({0: 1, 1: 1, 2: 1, 3: 1, 4: 2})
    assert wr.closed_form_restriction(P, (4, 4)) == both
    assert wr.closed_form_restriction(P, (0, 4)) == both
    assert wr.closed_form_restriction(P, (3, 1)) == Counter(
        {0: 6, 1: 3, 2: 3, 3: 3, 4: 6})
    # alias weights restrict like their catalog label
    assert wr.closed_form_restriction(P, (1, 0)) == wr.closed_form_restriction(
        P, (1, 1))
    assert wr.catalog_rep(P, (1, 0)) == (1, 1)
    assert wr.catalog_rep(P, (0, 4)) == (0, 4)


@pytest.mark.parametrize("weight", [(0, 0), (4, 4), (0, 4), (2, 2), (3, 1),
                                    (4, 0)])
def test_three_routes_agree(weight):
    want = wr.closed_form_restriction(P, weight)
    wm = wr.restrict_module(simple_realization(P, weight))
    assert wr.direct_factors(wm) == want
    total, pieces = wr.guided_restriction(P, weight)
    assert total == want
    assert sum((Counter(f) for _, f in pieces), Counter()) == want


def test_routes_are_reshuffle_invariant():
    weight = (0, 4)
    wm = wr.restrict_module(simple_realization(P, weight))
    base_d = wr.direct_factors(wm)
    base_g = wr.guided_restriction(P, weight)[0]
    for seed in range(5):
        assert wr.direct_factors(wm, rng=np.random.default_rng(seed)) == base_d
        got = wr.guided_restriction(P, weight,
                                    rng=np.random.default_rng(seed))[0]
        assert got == base_g


def test_guided_pieces_snapshot_for_31():
    total, pieces = wr.guided_restriction(P, (3, 1))
    got = {name: dict(sorted(fac.items())) for name, fac in pieces}
    assert got == {
        "component 0": {0: 2, 2: 1, 3: 1, 4: 2},
        "component 1": {0: 1, 1: 1, 2: 1, 3: 1, 4: 1},
        "component 2": {0: 2, 1: 1, 3: 1, 4: 2},
        "top layer": {0: 1, 1: 1, 2: 1, 4: 1},
    }
    assert total == Counter({0: 6, 1: 3, 2: 3, 3: 3, 4: 6})


def test_middle_multiplicities_are_equal():
    for weight in [(3, 1), (4, 0), (2, 2)]:
        fac = wr.closed_form_restriction(P, weight)
        assert len({fac[j] for j in range(1, P - 1)}) == 1


def test_peeling_rejects_impossible_lists():
    # a lone weight-2 entry needs a ladder through absent grades
    ell = {0: Counter({2: 1})}
    with pytest.raises(AssertionError):
        wr.algorithm_on_lists(ell, P)


def test_balanced_toral_check_flags():
    from hamrep.cartan import build_p_envelope
    alg = build_p_envelope(P)
    h = alg.coords(alg.named["hdiff"])
    rep = wr.balanced_toral_check(alg, h)
    assert rep.is_toral and rep.is_balanced
    assert rep.eigendims == {0: 6, 1: 5, 2: 5, 3: 5, 4: 5}
    assert rep.nonzero_common == 5
    # the same element fails d=2 balance because 5 is odd
    assert not wr.balanced_toral_check(alg, h, d=2).is_balanced
    # a nilpotent element is not toral
    rep2 = wr.balanced_toral_check(alg, alg.coords(alg.named["dy"]))
    assert not rep2.is_toral and not rep2.is_balanced
