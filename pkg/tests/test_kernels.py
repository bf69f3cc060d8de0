"""Linear algebra kernels: backend parity and exactness."""

import numpy as np
import pytest

from hamrep import _kernels_py, kernels

try:
    from hamrep import _kernels as _compiled
except ImportError:
    _compiled = None

PRIMES = (5, 7, 11)


def test_backend_is_reported():
    assert kernels.backend_name() in ("c", "py")


@pytest.mark.skipif(_compiled is None, reason="compiled extension not built")
def test_rref_backend_parity():
    rng = np.random.default_rng(0)
    for p in PRIMES:
        for rows, cols in [(1, 1), (3, 7), (7, 3), (20, 20), (40, 13)]:
            for _ in range(5):
                mat = rng.integers(0, p, size=(rows, cols))
                red_c, rank_c, piv_c = _compiled.rref(mat.copy(), p)
                red_p, rank_p, piv_p = _kernels_py.rref(mat.copy(), p)
                assert rank_c == rank_p
                assert np.array_equal(red_c, red_p)
                assert np.array_equal(piv_c, piv_p)


def test_rref_postconditions():
    rng = np.random.default_rng(1)
    for p in PRIMES:
        mat = rng.integers(0, p, size=(12, 18))
        red, rank, piv = kernels.rref(mat, p)
        assert red.shape == mat.shape
        assert len(piv) == rank
        # pivot columns are unit vectors
        for k, c in enumerate(piv):
            col = red[:, c]
            assert col[k] == 1 and np.count_nonzero(col) == 1
        # rref is idempotent on its nonzero rows
        again, rank2, piv2 = kernels.rref(red[:rank], p)
        assert rank2 == rank
        assert np.array_equal(again, red[:rank])
        assert np.array_equal(piv2, piv)
        # row space is preserved: original rows reduce to zero
        residue = kernels.reduce_rows(mat % p, red[:rank], piv, p)
        assert not residue.any()


def test_matmul_mod_matches_integer_product():
    rng = np.random.default_rng(2)
    for p in PRIMES:
        a = rng.integers(0, p, size=(9, 14))
        b = rng.integers(0, p, size=(14, 6))
        assert np.array_equal(kernels.matmul_mod(a, b, p), (a @ b) % p)


def test_matpow_mod_matches_repeated_product():
    rng = np.random.default_rng(3)
    p = 7
    a = rng.integers(0, p, size=(8, 8))
    acc = np.eye(8, dtype=np.int64)
    for e in range(6):
        assert np.array_equal(kernels.matpow_mod(a, e, p), acc)
        acc = (acc @ a) % p


def test_reduce_rows_annihilates_span_members():
    rng = np.random.default_rng(4)
    p = 5
    basis_src = rng.integers(0, p, size=(4, 10))
    red, rank, piv = kernels.rref(basis_src, p)
    basis = red[:rank]
    combo = (rng.integers(0, p, size=(6, rank)) @ basis) % p
    assert not kernels.reduce_rows(combo, basis, piv, p).any()
    # vectors outside the span keep a nonzero residue
    outside = np.zeros((1, 10), dtype=np.int64)
    free_cols = [c for c in range(10) if c not in set(int(x) for x in piv)]
    outside[0, free_cols[0]] = 1
    residue = kernels.reduce_rows(outside, basis, piv, p)
    assert residue.any()
