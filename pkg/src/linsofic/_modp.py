"""Vectorized exact linear algebra over F_p with numpy int64.

All routines require ``p < 2**31`` so that a product of two residues fits in
int64 before reduction.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError

MAX_P = 2**31


def as_array(rows, p: int) -> np.ndarray:
    a = np.array(rows, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(len(rows), -1)
    return a % p


def echelon(a: np.ndarray, p: int, reduced: bool = False):
    """Row echelon form (first nonzero pivot per column).

    Returns ``(E, pivot_cols)``; pivot rows are normalized to 1.  With
    ``reduced`` the pivot columns are cleared above as well (RREF).
    """
    a = np.array(a, dtype=np.int64, copy=True)
    m, n = a.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = a[r, c:] * inv % p
        if reduced:
            mask = a[:, c] != 0
            mask[r] = False
            idx = np.flatnonzero(mask)
        else:
            idx = r + 1 + np.flatnonzero(a[r + 1 :, c])
        if idx.size:
            a[idx, c:] = (a[idx, c:] - np.outer(a[idx, c], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(a: np.ndarray, p: int) -> int:
    return len(echelon(a, p)[1])


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a % p, np.eye(n, dtype=np.int64)], axis=1)
    e, pivots = echelon(aug, p, reduced=True)
    if len(pivots) < n or pivots[n - 1] >= n:
        raise SingularMatrixError("matrix is singular")
    return e[:, n:]


def det(a: np.ndarray, p: int) -> int:
    a = np.array(a, dtype=np.int64, copy=True) % p
    n = a.shape[0]
    d = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            a[[c, i]] = a[[i, c]]
            d = -d
        piv = int(a[c, c])
        d = d * piv % p
        inv = pow(piv, -1, p)
        idx = c + 1 + np.flatnonzero(a[c + 1 :, c])
        if idx.size:
            f = a[idx, c] * inv % p
            a[idx, c:] = (a[idx, c:] - np.outer(f, a[c, c:])) % p
    return d % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    k = a.shape[1]
    if k * (p - 1) ** 2 < 2**53:
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(out).astype(np.int64) % p
    # split each operand into 16-bit halves; every partial product is exact in float64
    a_hi, a_lo = np.divmod(a, 1 << 16)
    b_hi, b_lo = np.divmod(b, 1 << 16)

    def part(x, y):
        return np.rint(x.astype(np.float64) @ y.astype(np.float64)).astype(np.int64) % p

    hh = part(a_hi, b_hi)
    mid = (part(a_hi, b_lo) + part(a_lo, b_hi)) % p
    ll = part(a_lo, b_lo)
    s = (1 << 16) % p
    return ((hh * s % p) * s % p + mid * s % p + ll) % p


def kernel_basis(a: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of the right kernel, one vector per free column."""
    e, pivots = echelon(a, p, reduced=True)
    n = a.shape[1]
    pivset = set(pivots)
    basis = []
    for j in range(n):
        if j in pivset:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[j] = 1
        for r, c in enumerate(pivots):
            v[c] = -e[r, j] % p
        basis.append(v)
    return basis


def charpoly(a: np.ndarray, p: int) -> np.ndarray:
    """Coefficients (ascending) of ``det(x - a)`` mod p, via Hessenberg form."""
    h = np.array(a, dtype=np.int64, copy=True) % p
    n = h.shape[0]
    for m in range(1, n - 1):
        nz = np.flatnonzero(h[m:, m - 1])
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            h[[m, i]] = h[[i, m]]
            h[:, [m, i]] = h[:, [i, m]]
        inv = pow(int(h[m, m - 1]), -1, p)
        idx = m + 1 + np.flatnonzero(h[m + 1 :, m - 1])
        if idx.size == 0:
            continue
        u = h[idx, m - 1] * inv % p
        h[idx, :] = (h[idx, :] - np.outer(u, h[m, :]) % p) % p
        for j, uj in zip(idx, u):
            h[:, m] = (h[:, m] + h[:, j] * uj) % p
    polys = [np.zeros(n + 1, dtype=np.int64)]
    polys[0][0] = 1
    for m in range(1, n + 1):
        prev = polys[m - 1]
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1:] = prev[:-1]
        cur = (cur - h[m - 1, m - 1] * prev) % p
        t = 1
        for i in range(1, m):
            t = t * int(h[m - i, m - i - 1]) % p
            if t == 0:
                break
            c = t * int(h[m - i - 1, m - 1]) % p
            if c:
                cur = (cur - c * polys[m - i - 1]) % p
        polys.append(cur)
    return polys[n]


def poly_eval(coeffs: np.ndarray, xs: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a polynomial mod p at many points (Horner)."""
    xs = np.asarray(xs, dtype=np.int64) % p
    acc = np.zeros_like(xs)
    for c in coeffs[::-1]:
        acc = (acc * xs + int(c)) % p
    return acc

