"""Exact linear algebra over Q on integer-scaled matrices.

Small inputs use fraction-free (Bareiss) elimination.  Large inputs go through
a word-size prime and are then *certified* over the integers: a rank is
accepted only after the reconstructed kernel basis is checked exactly, an
inverse only after ``A @ X == I`` is checked exactly.  A failed certificate
falls back to the next prime and finally to Bareiss / Gauss-Jordan.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm

import numpy as np
import sympy

from . import _modp
from .errors import SingularMatrixError
from .fields import qnorm

# primes just below 2**31
PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549)


@lru_cache(maxsize=None)
def nth_prime_below_2_31(k: int) -> int:
    if k < len(PRIMES):
        return PRIMES[k]
    return int(sympy.prevprime(nth_prime_below_2_31(k - 1)))


def hadamard_bound(M: list[list[int]]) -> int:
    """Upper bound for |det| of any square submatrix of ``M``."""
    b = 1
    for row in M:
        b *= isqrt(sum(x * x for x in row)) + 1
    return b

SMALL = 24  # below this dimension Bareiss beats the modular route


def scale_rows(rows) -> tuple[list[list[int]], list[int]]:
    """Clear denominators row by row: ``rows[i] == out[i] / scales[i]``."""
    out, scales = [], []
    for row in rows:
        d = 1
        for x in row:
            if type(x) is not int and x.denominator != 1:
                d = lcm(d, x.denominator)
        if d == 1:
            out.append([int(x) for x in row])
        else:
            out.append([x * d if type(x) is int else x.numerator * (d // x.denominator)
                        for x in row])
        scales.append(d)
    return out, scales


def common_denominator(rows) -> tuple[list[list[int]], int]:
    d = 1
    for row in rows:
        for x in row:
            if type(x) is not int and x.denominator != 1:
                d = lcm(d, x.denominator)
    if d == 1:
        return [[int(x) for x in row] for row in rows], 1
    return [[x * d if type(x) is int else x.numerator * (d // x.denominator) for x in row]
            for row in rows], d


def _fits_int64(a_max: int, b_max: int, k: int) -> bool:
    return a_max * b_max * max(k, 1) < 2**62


def int_matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    if not A or not B:
        return [[] for _ in A]
    a_max = max((abs(x) for row in A for x in row), default=0)
    b_max = max((abs(x) for row in B for x in row), default=0)
    if _fits_int64(a_max, b_max, len(B)):
        out = np.array(A, dtype=np.int64) @ np.array(B, dtype=np.int64)
        return out.tolist()
    out = np.array(A, dtype=object).dot(np.array(B, dtype=object))
    return [[int(x) for x in row] for row in out]


def matmul(A_rows, B_rows) -> list[list[Fraction]]:
    MA, sa = scale_rows(A_rows)
    MB, db = common_denominator(B_rows)
    prod = int_matmul(MA, MB)
    out = []
    for row, s in zip(prod, sa):
        q = s * db
        if q == 1:
            out.append(row)
        else:
            out.append([x // q if x % q == 0 else Fraction(x, q) for x in row])
    return out


# --- fraction-free elimination ---------------------------------------------


def bareiss_rank(M: list[list[int]]) -> int:
    a = [row[:] for row in M]
    m = len(a)
    n = len(a[0]) if m else 0
    prev = 1
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        pv = pr[c]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                for j in range(c + 1, n):
                    row[j] = (row[j] * pv - f * pr[j]) // prev
            else:
                for j in range(c + 1, n):
                    row[j] = row[j] * pv // prev
            row[c] = 0
        prev = pv
        r += 1
        if r == m:
            break
    return r


def bareiss_det(M: list[list[int]]) -> int:
    a = [row[:] for row in M]
    n = len(a)
    sign = 1
    prev = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        pr = a[c]
        pv = pr[c]
        for i in range(c + 1, n):
            row = a[i]
            f = row[c]
            for j in range(c + 1, n):
                row[j] = (row[j] * pv - f * pr[j]) // prev
            row[c] = 0
        prev = pv
    return sign * a[n - 1][n - 1] if n else 1


def det(rows) -> Fraction:
    M, scales = scale_rows(rows)
    d = bareiss_det(M)
    s = 1
    for x in scales:
        s *= x
    return qnorm(Fraction(d, s))


# --- modular route with certificates ----------------------------------------


def ratrecon(a: int, m: int) -> Fraction | None:
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if gcd(r1, s1) != 1:
        return None
    return Fraction(r1, s1)


def _mod_array(M: list[list[int]], p: int) -> np.ndarray:
    try:
        return np.array(M, dtype=np.int64) % p
    except OverflowError:
        return np.array([[x % p for x in row] for row in M], dtype=np.int64)


def _certify_kernel(M: list[list[int]], basis_mod: list[np.ndarray], p: int) -> bool:
    if not basis_mod:
        return True
    vecs = []
    for v in basis_mod:
        fr = []
        for x in v.tolist():
            q = ratrecon(int(x), p)
            if q is None:
                return False
            fr.append(q)
        d = 1
        for q in fr:
            d = lcm(d, q.denominator)
        vecs.append([int(q * d) for q in fr])
    # M @ V == 0 over Z, V has one column per kernel vector
    V = [list(col) for col in zip(*vecs)]
    prod = int_matmul(M, V)
    return all(x == 0 for row in prod for x in row)


def rank(rows) -> int:
    M, _ = scale_rows(rows)
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0 or n == 0:
        return 0
    if max(m, n) < SMALL:
        return bareiss_rank(M)
    for p in PRIMES[:3]:
        a = _mod_array(M, p)
        e, pivots = _modp.echelon(a, p, reduced=True)
        r = len(pivots)
        if r == min(m, n):
            return r  # rank over Q is at least the rank mod p
        if _certify_kernel(M, _modp.kernel_basis(a, p), p):
            return r
    return bareiss_rank(M)


def _gauss_jordan_inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        pr = a[c]
        inv = 1 / pr[c]
        pr = a[c] = [x * inv for x in pr]
        for i in range(n):
            if i != c:
                f = a[i][c]
                if f:
                    row = a[i]
                    a[i] = [x - f * y for x, y in zip(row, pr)]
    return [[qnorm(x) for x in row[n:]] for row in a]


def inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    if n < SMALL:
        return _gauss_jordan_inverse(rows)
    M, scales = scale_rows(rows)
    # A = diag(1/s) M  =>  A^{-1} = M^{-1} diag(s); entries of M^{-1} are
    # cofactor/det, both bounded by the Hadamard bound h, so a modulus above
    # 2 h^2 always reconstructs them.
    h = hadamard_bound(M)
    residues = []
    modulus = 1
    k = 0
    attempt_at = 1
    while True:
        p = nth_prime_below_2_31(k)
        k += 1
        a = _mod_array(M, p)
        try:
            inv = _modp.inverse(a, p)
        except SingularMatrixError:
            if bareiss_det(M) == 0:
                raise
            continue
        residues.append((inv, p))
        modulus *= p
        final = modulus > 2 * h * h
        if len(residues) < attempt_at and not final:
            continue
        attempt_at *= 2
        X = _crt_reconstruct(residues, modulus)
        if X is not None:
            Xi, d = common_denominator(X)
            prod_ = int_matmul(M, Xi)
            if all(prod_[i][j] == (d if i == j else 0) for i in range(n) for j in range(n)):
                return [[qnorm(x * s) for x, s in zip(row, scales)] for row in X]
        if final:
            return _gauss_jordan_inverse(rows)


def _crt_reconstruct(residues, modulus) -> list[list[Fraction]] | None:
    if len(residues) == 1:
        combined = residues[0][0].astype(object)
    else:
        combined = None
        m = 1
        for arr, p in residues:
            arr = arr.astype(object)
            if combined is None:
                combined, m = arr, p
                continue
            inv = pow(m, -1, p)
            t = ((arr - combined) * inv) % p
            combined = combined + m * t
            m *= p
    out = []
    for row in combined.tolist():
        fr = []
        for x in row:
            q = ratrecon(int(x), modulus)
            if q is None:
                return None
            fr.append(q)
        out.append(fr)
    return out
