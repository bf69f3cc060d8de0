"""Exact linear algebra over the prime field F_p.

Scalars are plain ints in [0, p); matrices are numpy int64 arrays with entries
in [0, p). Every eigenvalue this package ever needs (weights of toral elements
acting on restricted modules) already lies in F_p, so no field extensions are
involved, and dimensions stay small enough (at most ~p^3) that dense
elimination is the right tool.
"""

from __future__ import annotations

import numpy as np

from .kernels import matmul_mod, matpow_mod, reduce_rows, rref

__all__ = [
    "validate_prime",
    "inv_mod",
    "rref",
    "nullspace",
    "eigenspace",
    "matmul_mod",
    "matpow_mod",
    "reduce_rows",
]


def validate_prime(p: int) -> int:
    """Return ``p`` if it is a prime >= 5, else raise ValueError."""
    if not isinstance(p, (int, np.integer)) or p < 5:
        raise ValueError(f"modulus must be a prime >= 5, got {p!r}")
    n = int(p)
    d = 2
    while d * d <= n:
        if n % d == 0:
            raise ValueError(f"modulus must be prime, got {n}")
        d += 1
    return n


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in F_p")
    return pow(a, p - 2, p)


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel of ``mat`` over F_p, as rows.

    Returns a (cols - rank) x cols array; empty (0 x cols) for injective maps.
    """
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    cols = mat.shape[1]
    reduced, rank, pivots = rref(mat, p)
    free = np.setdiff1d(np.arange(cols), pivots)
    basis = np.zeros((free.size, cols), dtype=np.int64)
    if free.size:
        basis[np.arange(free.size), free] = 1
        # pivot coordinates are forced: x_pivot = -R[row, free] * x_free
        basis[:, pivots] = (-reduced[:rank, free].T) % p
    return basis


def eigenspace(mat: np.ndarray, c: int, p: int) -> np.ndarray:
    """Basis (rows) of ker(mat - c*I) over F_p; ``mat`` must be square."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("eigenspace expects a square matrix")
    shifted = mat.copy()
    idx = np.arange(mat.shape[0])
    shifted[idx, idx] = (shifted[idx, idx] - c) % p
    return nullspace(shifted, p)
