"""Prime-field helpers: validation, inverses, solution spaces."""

import numpy as np
import pytest

from hamrep.kernels import matmul_mod, rref
from hamrep.primefield import eigenspace, inv_mod, nullspace, validate_prime


def test_validate_prime_accepts_odd_primes_from_five():
    for p in (5, 7, 11, 13):
        assert validate_prime(p) == p


@pytest.mark.parametrize("bad", [0, 1, 2, 3, 4, 6, 9, 15, -5])
def test_validate_prime_rejects(bad):
    with pytest.raises(ValueError):
        validate_prime(bad)


def test_inv_mod_is_a_true_inverse():
    for p in (5, 7, 11):
        for a in range(1, p):
            assert (a * inv_mod(a, p)) % p == 1
    with pytest.raises(ZeroDivisionError):
        inv_mod(0, 5)


def test_nullspace_spans_the_kernel():
    rng = np.random.default_rng(10)
    for p in (5, 7):
        mat = rng.integers(0, p, size=(9, 13))
        basis = nullspace(mat, p)
        # every basis row is killed, and rank-nullity accounts for all of it
        assert not matmul_mod(mat % p, basis.T % p, p).any()
        _, r, _ = rref(mat, p)
        assert basis.shape == (13 - r, 13)
        _, nr, _ = rref(basis, p)
        assert nr == basis.shape[0]


def test_eigenspace_vectors_are_eigenvectors():
    p = 5
    mat = np.diag([0, 1, 1, 3]).astype(np.int64)
    for c in range(p):
        vs = eigenspace(mat, c, p)
        want = {0: 1, 1: 2, 3: 1}.get(c, 0)
        assert vs.shape[0] == want
        for v in vs:
            assert np.array_equal(matmul_mod(mat, v[:, None], p)[:, 0],
                                  (c * v) % p)
