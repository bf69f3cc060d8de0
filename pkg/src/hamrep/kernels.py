"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

``HAMREP_KERNELS=py`` forces the fallback, ``HAMREP_KERNELS=c`` demands the
extension (import error if missing). Matrix products are shared between
backends: entries live in [0, p) with p <= 11 here, so float64 BLAS products
are exact (row length x (p-1)^2 is far below 2^53) and faster than anything
hand-written.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_choice = os.environ.get("HAMREP_KERNELS", "").strip().lower()
if _choice == "py":
    _impl = _kernels_py
elif _choice == "c":
    from . import _kernels as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

rref = _impl.rref


def backend_name() -> str:
    return _impl.BACKEND


# Largest dot-product length for which float64 accumulation of products of
# residues is exact. Dimensions in this package stay far below it.
def _exact_len_bound(p: int) -> int:
    return (1 << 53) // ((p - 1) * (p - 1))


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b`` over F_p for int64 arrays with entries in [0, p)."""
    if a.shape[-1] > _exact_len_bound(p):
        raise ValueError("matrix too large for exact float64 accumulation")
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.rint(prod).astype(np.int64) % p


def matpow_mod(a: np.ndarray, e: int, p: int) -> np.ndarray:
    """``a`` to the ``e``-th power over F_p by binary powering."""
    if e < 0:
        raise ValueError("negative matrix power")
    n = a.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = a % p
    while e:
        if e & 1:
            result = matmul_mod(result, base, p)
        base = matmul_mod(base, base, p)
        e >>= 1
    return result


def reduce_rows(vecs: np.ndarray, basis: np.ndarray, pivots: np.ndarray, p: int) -> np.ndarray:
    """Reduce row vectors against an rref basis (pivot columns cleared)."""
    if basis.shape[0] == 0 or vecs.shape[0] == 0:
        return vecs % p
    coeff = vecs[:, pivots]
    return (vecs - matmul_mod(coeff, basis, p)) % p
