"""Pure-numpy fallback for the mod-p elimination kernel.

Same contract as the compiled extension in ``_kernels.pyx``: row reduction of
int64 matrices with entries in [0, p). Kept dependency-free beyond numpy so the
package works without a C toolchain.
"""

from __future__ import annotations

import numpy as np

BACKEND = "py"


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, int, np.ndarray]:
    """Reduced row echelon form of ``mat`` over F_p.

    Returns ``(reduced, rank, pivot_columns)``. ``reduced`` has the same shape
    as the input with all non-pivot rows zeroed and sits in a fresh array.
    """
    m = np.ascontiguousarray(mat, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        if inv != 1:
            m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
        pivots.append(c)
        r += 1
    return m, r, np.asarray(pivots, dtype=np.int64)
