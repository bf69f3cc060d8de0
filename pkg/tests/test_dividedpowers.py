"""Divided power arithmetic on k[x,y] truncated at exponent p."""

import math

import numpy as np

from hamrep import dividedpowers as dp


def test_binom_mod_matches_math_comb():
    for p in (5, 7):
        for n in range(2 * p):
            for k in range(2 * p):
                assert dp.binom_mod(n, k, p) == math.comb(n, k) % p


def test_product_carries_binomial_weights():
    p = 5
    # x^(a) x^(b) = C(a+b, a) x^(a+b), truncated at exponent p
    for a in range(p):
        for b in range(p):
            u = dp.dp_terms((a, 0, 1))
            v = dp.dp_terms((b, 0, 1))
            got = dp.dp_mul(u, v, p)
            if a + b < p:
                assert got == dp.dp_terms((a + b, 0, math.comb(a + b, a) % p))
            else:
                assert got == dp.dp_terms()


def test_product_is_commutative_and_associative():
    rng = np.random.default_rng(5)
    p = 5
    monos = dp.all_monomials(p)

    def random_elem():
        picks = rng.integers(0, len(monos), size=3)
        return dp.dp_terms(*((*monos[i], int(rng.integers(1, p)))
                             for i in picks))

    for _ in range(25):
        u, v, w = random_elem(), random_elem(), random_elem()
        assert dp.dp_mul(u, v, p) == dp.dp_mul(v, u, p)
        assert dp.dp_mul(dp.dp_mul(u, v, p), w, p) == \
            dp.dp_mul(u, dp.dp_mul(v, w, p), p)


def test_partials_satisfy_leibniz():
    rng = np.random.default_rng(6)
    p = 7
    monos = dp.all_monomials(p)

    def random_elem():
        picks = rng.integers(0, len(monos), size=4)
        return dp.dp_terms(*((*monos[i], int(rng.integers(1, p)))
                             for i in picks))

    for op in (dp.deriv_x, dp.deriv_y):
        for _ in range(20):
            u, v = random_elem(), random_elem()
            lhs = op(dp.dp_mul(u, v, p), p)
            rhs = dp.dp_add(dp.dp_mul(op(u, p), v, p),
                            dp.dp_mul(u, op(v, p), p), p)
            assert lhs == rhs


def test_partial_shifts_divided_exponents():
    p = 5
    # d/dx sends x^(a)y^(b) to x^(a-1)y^(b): no binomial factor appears
    for a in range(1, p):
        assert dp.deriv_x(dp.dp_terms((a, 2, 1)), p) == dp.dp_terms((a - 1, 2, 1))
    assert dp.deriv_x(dp.dp_terms((0, 2, 1)), p) == dp.dp_terms()


def test_vector_embedding_sums_coefficients():
    p = 5
    u = dp.dp_terms((1, 2, 3), (0, 0, 4))
    vec = dp.dp_to_vector(u, p)
    assert vec.shape == (p * p,)
    total = int(vec.sum()) % p
    assert total == (3 + 4) % p
