"""Truncated divided-power algebra O(2;(1,1)) = k[x,y]/(x^p, y^p) over F_p.

Basis monomials are written x^(a)y^(b) with 0 <= a, b < p and multiply by
x^(a)*x^(c) = binom(a+c, a) x^(a+c), truncating whenever an exponent reaches p.
Elements are sparse maps {(a, b): coefficient} with no stored zeros.

A derivation is a pair (fx, fy) of elements meaning fx*d/dx + fy*d/dy, where
d/dx lowers a divided power without a factor: d/dx x^(a) = x^(a-1).
"""

from __future__ import annotations

import numpy as np

DPElement = dict[tuple[int, int], int]


def binom_mod(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p by Lucas' theorem (valid for all n, k >= 0)."""
    if k < 0 or k > n:
        return 0
    result = 1
    while n or k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        num = den = 1
        for i in range(kd):
            num = num * (nd - i) % p
            den = den * (i + 1) % p
        result = result * num * pow(den, p - 2, p) % p
        n //= p
        k //= p
    return result


def dp_terms(*terms: tuple[int, int, int]) -> DPElement:
    """Build an element from (a, b, coeff) triples (coeff taken as-is)."""
    out: DPElement = {}
    for a, b, c in terms:
        if c:
            out[(a, b)] = out.get((a, b), 0) + c
    return {m: c for m, c in out.items() if c}


def dp_add(u: DPElement, v: DPElement, p: int) -> DPElement:
    out = dict(u)
    for m, c in v.items():
        s = (out.get(m, 0) + c) % p
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def dp_scale(u: DPElement, c: int, p: int) -> DPElement:
    c %= p
    if c == 0:
        return {}
    return {m: (k * c) % p for m, k in u.items()}


def dp_mul(u: DPElement, v: DPElement, p: int) -> DPElement:
    out: DPElement = {}
    for (a1, b1), c1 in u.items():
        for (a2, b2), c2 in v.items():
            a, b = a1 + a2, b1 + b2
            if a >= p or b >= p:
                continue
            c = c1 * c2 * binom_mod(a, a1, p) % p * binom_mod(b, b1, p) % p
            if c:
                s = (out.get((a, b), 0) + c) % p
                if s:
                    out[(a, b)] = s
                else:
                    del out[(a, b)]
    return out


def deriv_x(u: DPElement, p: int) -> DPElement:
    return {(a - 1, b): c for (a, b), c in u.items() if a > 0}


def deriv_y(u: DPElement, p: int) -> DPElement:
    return {(a, b - 1): c for (a, b), c in u.items() if b > 0}


def apply_derivation(D: tuple[DPElement, DPElement], f: DPElement, p: int) -> DPElement:
    """Apply fx*d/dx + fy*d/dy to f."""
    fx, fy = D[0], D[1]
    return dp_add(dp_mul(fx, deriv_x(f, p), p), dp_mul(fy, deriv_y(f, p), p), p)


def all_monomials(p: int) -> list[tuple[int, int]]:
    """The p^2 basis monomials in a fixed (a, b)-lexicographic order."""
    return [(a, b) for a in range(p) for b in range(p)]


def dp_to_vector(u: DPElement, p: int) -> np.ndarray:
    """Coordinates of ``u`` in the all_monomials order."""
    vec = np.zeros(p * p, dtype=np.int64)
    for (a, b), c in u.items():
        vec[a * p + b] = c % p
    return vec


def render(u: DPElement) -> str:
    """Plain-text form, e.g. ``2*x^(1)y^(3) + x^(2)``; '0' for zero."""
    if not u:
        return "0"
    parts = []
    for (a, b) in sorted(u):
        c = u[(a, b)]
        piece = ""
        if a:
            piece += f"x^({a})"
        if b:
            piece += f"y^({b})"
        if not piece:
            piece = "1"
        parts.append(piece if c == 1 else f"{c}*{piece}")
    return " + ".join(parts)
