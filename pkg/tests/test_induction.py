"""Induced modules: engine matrices against independent hand formulas."""

import numpy as np
import pytest

from hamrep.induction import (EXACT_ORACLES, MAXIMAL_ONLY_ORACLES,
                              build_induced, gl2_simple, oracle_action,
                              oracle_matrix)
from hamrep.kernels import matmul_mod

P5_WEIGHTS = [(0, 0), (1, 0), (2, 1), (3, 1), (4, 4), (0, 4)]


def test_gl2_simple_shapes():
    for p in (5, 7):
        for l1 in range(p):
            for l2 in range(p):
                g = gl2_simple(p, (l1, l2))
                n = (l1 - l2) % p
                assert g.n == n
                assert g.wt_x.shape == (n + 1,)
                # highest component carries the defining weight
                assert (g.wt_x[n], g.wt_y[n]) == (l1, l2)
                # x dx + y dy acts by the same scalar on every component
                total = (g.wt_x + g.wt_y) % p
                assert len(set(total.tolist())) == 1


def test_dimensions_and_index_roundtrip():
    p = 5
    for weight in P5_WEIGHTS:
        z = build_induced(p, weight)
        assert z.dim == p * p * (z.n + 1)
        for flat in range(z.dim):
            a1, a2, comp = z.index_tuple(flat)
            assert z.flat_index(a1, a2, comp) == flat
            assert 0 <= a1 < p and 0 <= a2 < p and 0 <= comp <= z.n


def test_weight_arrays_follow_the_grading():
    p = 5
    z = build_induced(p, (3, 1))
    for flat in range(z.dim):
        a1, a2, comp = z.index_tuple(flat)
        assert z.wt_x[flat] == (z.gl2.wt_x[comp] - a1) % p
        assert z.wt_y[flat] == (z.gl2.wt_y[comp] - a2) % p


def test_full_self_verification():
    # bracket compatibility on every basis pair and every p-th power
    build_induced(5, (0, 0), verify="full")
    build_induced(5, (2, 1), verify="full")


def test_oracle_matrices_exact():
    for p, weights in ((5, P5_WEIGHTS), (7, [(0, 0), (3, 1)])):
        for weight in weights:
            z = build_induced(p, weight)
            for name in EXACT_ORACLES:
                assert np.array_equal(z.named_matrix(name),
                                      oracle_matrix(name, p, weight)), \
                    (p, weight, name)


def test_oracle_actions_on_random_vectors():
    rng = np.random.default_rng(11)
    p = 5
    for weight in [(0, 0), (2, 1), (4, 4)]:
        z = build_induced(p, weight)
        for name in ("X", "dy", "Y", "xp1dy", "L", "J"):
            mat = z.named_matrix(name)
            for _ in range(60):
                v = rng.integers(0, p, size=z.dim)
                assert np.array_equal((mat @ v) % p,
                                      oracle_action(name, z, v))


def test_torus_matrices_are_diagonal():
    z = build_induced(5, (2, 1))
    for name, wt in (("hdiff", (z.wt_y - z.wt_x) % 5),
                     ("tsum", (z.wt_x + z.wt_y) % 5)):
        assert np.array_equal(z.named_matrix(name), np.diag(wt))


def test_top_vector_generates():
    from hamrep.repstructure import spin_submodule
    p = 5
    for weight in [(3, 1), (2, 1)]:
        z = build_induced(p, weight)
        seed = np.zeros(z.dim, dtype=np.int64)
        seed[z.flat_index(0, 0, z.n)] = 1
        assert spin_submodule(z, seed[None, :]).dim == z.dim


def test_render_vector_names_basis_lines():
    z = build_induced(5, (2, 1))
    v = np.zeros(z.dim, dtype=np.int64)
    v[z.flat_index(1, 2, 1)] = 3
    text = z.render_vector(v)
    assert "dx'" in text and "dy^2" in text and "m2" in text and "3*" in text


def test_rejects_bad_prime():
    with pytest.raises(ValueError):
        build_induced(6, (0, 0))


def test_characteristic_five_element_terms_are_frozen():
    # J = x^(3)y^(4)dy - x^(4)y^(3)dx exists only as a generator concern at
    # p = 5; freeze its full term table there so edits to the general-p code
    # cannot silently change the specialization.  Coefficients mod 5.
    from hamrep.induction import _term_stream

    def norm(term):
        a1, a2, c1, c2, op, (c11, c22, c0) = term
        return (a1, a2, c1, c2, op, (c11 % 5, c22 % 5, c0 % 5))

    got = sorted(norm(t) for t in _term_stream("J", 5))
    want = sorted([
        (2, 4, 0, 0, "X", (0, 0, 1)),
        (3, 3, 0, 0, "I", (4, 1, 0)),
        (3, 4, 1, 0, "X", (0, 0, 3)),
        (3, 4, 0, 1, "I", (1, 4, 4)),
        (4, 2, 0, 0, "Y", (0, 0, 4)),
        (4, 3, 0, 1, "Y", (0, 0, 2)),
        (4, 3, 1, 0, "I", (1, 4, 1)),
        (4, 4, 1, 1, "I", (4, 1, 0)),
        (4, 4, 2, 0, "X", (0, 0, 1)),
        (4, 4, 0, 2, "Y", (0, 0, 4)),
    ])
    assert got == want


def test_depth_one_element_kills_maximal_vectors():
    # L = y^(p-1)dy - x y^(p-2)dx sits in the depth-1 filtration piece, so
    # it must annihilate every solved maximal vector.
    from hamrep.repstructure import maximal_vectors
    p = 5
    for weight in [(0, 0), (4, 4), (2, 1), (3, 1), (0, 4)]:
        z = build_induced(p, weight)
        eng = z.named_matrix("L")
        for _, rows in maximal_vectors(z):
            cols = rows.T % p
            assert not matmul_mod(eng, cols, p).any()
            assert not oracle_action("L", z, cols).any()


def test_simplified_forms_agree_on_maximal_vectors():
    # The short forms drop wrap-around terms sourced at x'-exponent p-1.
    # They are wrong as whole matrices but exact on maximal vectors.
    from hamrep.repstructure import maximal_vectors
    p = 5
    for short, full in (("A_simplified", "A"), ("C_simplified", "C")):
        assert not np.array_equal(oracle_matrix(short, p, (3, 1)),
                                  oracle_matrix(full, p, (3, 1)))
    assert set(MAXIMAL_ONLY_ORACLES) == {"A_simplified", "C_simplified"}
    for weight in [(0, 0), (4, 4), (2, 1), (3, 1), (0, 4)]:
        z = build_induced(p, weight)
        for short, full in (("A_simplified", "A"), ("C_simplified", "C")):
            eng = z.named_matrix(full)
            for _, rows in maximal_vectors(z):
                cols = rows.T % p
                assert np.array_equal(oracle_action(short, z, cols),
                                      matmul_mod(eng, cols, p))
