"""The Hamiltonian algebra, its p-envelope, and the Witt subalgebra."""

import numpy as np
import pytest

from hamrep import dividedpowers as dp
from hamrep.cartan import (GL2_SLOTS, bracket, build_H, build_p_envelope,
                           build_W1_subalgebra, build_W2, d_scale,
                           d_to_vector, depth, deriv, filtration_component,
                           gl2_projection, p_power, witt_elements)

PRIMES = (5, 7)


def test_dimensions():
    for p in PRIMES:
        assert build_W2(p).dim == 2 * p * p
        assert build_H(p).dim == p * p
        assert build_p_envelope(p).dim == p * p + 1


def test_envelope_contains_h():
    for p in PRIMES:
        alg = build_p_envelope(p)
        h = build_H(p)
        for d in h.elements():
            assert alg.contains(d)


def test_frozen_brackets():
    p = 5
    alg = build_p_envelope(p)
    named = alg.named
    dy, dxp, X, tsum, hdiff = (named[k] for k in
                               ("dy", "dxp", "X", "tsum", "hdiff"))
    # [y dy - x dx, dy] = -dy and the degree operator grades dy at -1
    assert np.array_equal(d_to_vector(bracket(hdiff, dy, p), p),
                          (-d_to_vector(dy, p)) % p)
    assert np.array_equal(d_to_vector(bracket(tsum, dy, p), p),
                          (-d_to_vector(dy, p)) % p)
    # [dx - x^(p-1)y dy, x dy] = dy exactly: the correction term dies
    assert np.array_equal(d_to_vector(bracket(dxp, X, p), p),
                          d_to_vector(dy, p))
    # x dy is degree-homogeneous of degree 0
    assert not d_to_vector(bracket(tsum, X, p), p).any()


def test_antisymmetry_and_jacobi_sampled():
    rng = np.random.default_rng(7)
    for p in PRIMES:
        alg = build_p_envelope(p)
        n = alg.dim
        for _ in range(40):
            i, j, k = rng.integers(0, n, size=3)
            a, b, c = alg.basis[int(i)], alg.basis[int(j)], alg.basis[int(k)]
            ab = bracket(a, b, p)
            assert np.array_equal(d_to_vector(ab, p),
                                  (-d_to_vector(bracket(b, a, p), p)) % p)
            total = (d_to_vector(bracket(ab, c, p), p)
                     + d_to_vector(bracket(bracket(b, c, p), a, p), p)
                     + d_to_vector(bracket(bracket(c, a, p), b, p), p))
            assert not (total % p).any()


def test_filtration_is_bracket_compatible():
    p = 5
    alg = build_p_envelope(p)
    for i in range(alg.dim):
        for j in range(alg.dim):
            di = alg.filtration_depth[i]
            dj = alg.filtration_depth[j]
            br = bracket(alg.basis[i], alg.basis[j], p)
            d = depth(br, p)
            if d is not None:
                assert d >= di + dj


def test_filtration_component_dims():
    for p in PRIMES:
        alg = build_p_envelope(p)
        assert filtration_component(alg, 0).dim == p * p - 1
        assert filtration_component(alg, 1).dim == p * p - 5


def test_degree_zero_quotient_acts_like_gl2():
    p = 5
    alg = build_p_envelope(p)
    cX = alg.coords(alg.named["X"])
    cY = alg.coords(alg.named["Y"])
    ch = alg.coords(alg.named["hdiff"])
    cz = alg.coords(alg.named["tsum"])
    e12 = np.array([[0, 1], [0, 0]])
    e21 = np.array([[0, 0], [1, 0]])
    # images as 2x2 matrices acting on span{x, y}
    assert np.array_equal(gl2_projection(alg, cX), e12)
    assert np.array_equal(gl2_projection(alg, cY), e21)
    assert np.array_equal(gl2_projection(alg, ch), np.diag([p - 1, 1]))
    assert np.array_equal(gl2_projection(alg, cz), np.eye(2, dtype=np.int64))
    # gl2 relations hold modulo the depth-one part
    assert np.array_equal(gl2_projection(alg, alg.bracket_coords(cX, cY)),
                          np.diag([1, p - 1]))
    assert np.array_equal(gl2_projection(alg, alg.bracket_coords(ch, cX)),
                          ((p - 2) * e12) % p)
    assert np.array_equal(gl2_projection(alg, alg.bracket_coords(ch, cY)),
                          (2 * e21) % p)
    assert not gl2_projection(alg, alg.bracket_coords(cz, cX)).any()
    assert len(GL2_SLOTS) == 4


def test_p_map_closure_and_semilinearity():
    rng = np.random.default_rng(8)
    for p in PRIMES:
        alg = build_p_envelope(p)
        alg.p_map()  # asserts membership of every basis p-th power
        for _ in range(10):
            i = int(rng.integers(0, alg.dim))
            c = int(rng.integers(1, p))
            d = alg.basis[i]
            lhs = d_to_vector(p_power(d_scale(d, c, p), p), p)
            rhs = (c * d_to_vector(p_power(d, p), p)) % p
            assert np.array_equal(lhs, rhs)


def test_p_map_fixed_points():
    p = 5
    alg = build_p_envelope(p)
    dy = alg.named["dy"]
    tsum = alg.named["tsum"]
    assert not d_to_vector(p_power(dy, p), p).any()
    assert np.array_equal(d_to_vector(p_power(tsum, p), p),
                          d_to_vector(tsum, p))
    # -dx + x^(p-1)y dy squares (p-fold) to y dy
    eta = d_scale(alg.named["dxp"], p - 1, p)
    ydy = deriv(fy=dp.dp_terms((0, 1, 1)))
    assert np.array_equal(d_to_vector(p_power(eta, p), p),
                          d_to_vector(ydy, p))


def test_restrictedness_via_ad():
    # ad(D^[p]) equals ad(D)^p on the envelope
    from hamrep.kernels import matpow_mod
    p = 5
    alg = build_p_envelope(p)
    rng = np.random.default_rng(9)
    for i in map(int, rng.integers(0, alg.dim, size=6)):
        d = alg.basis[i]
        ad_d = alg.ad_matrix(d)
        ad_dp = alg.ad_matrix(p_power(d, p))
        assert np.array_equal(matpow_mod(ad_d, p, p), ad_dp)


def test_witt_subalgebra_roles():
    for p in PRIMES:
        span = build_W1_subalgebra(p)
        assert span.dim == p
        assert span.labels[0] == "d" and span.labels[1] == "xd"
        elems = witt_elements(p)
        alg = span.parent
        assert np.array_equal(d_to_vector(elems[0], p),
                              d_to_vector(alg.named["dy"], p))
        assert np.array_equal(d_to_vector(elems[1], p),
                              d_to_vector(alg.named["hdiff"], p))
        for e in elems:
            assert span.contains(e)


def test_witt_generation_from_two_roles():
    from hamrep.cartan import spin_subalgebra
    p = 5
    alg = build_p_envelope(p)
    elems = witt_elements(p)
    # d and x^(2)d only close up an sl2; d with the top role spans everything
    assert spin_subalgebra(alg, [elems[0], elems[2]]).dim == 3
    assert spin_subalgebra(alg, [elems[0], elems[p - 1]]).dim == p


@pytest.mark.parametrize("p", [4, 6, 3])
def test_bad_primes_rejected(p):
    with pytest.raises(ValueError):
        build_p_envelope(p)
