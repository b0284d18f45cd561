"""Length functions on GL_n(K) and Jordan-block invariants.

All values are exact :class:`fractions.Fraction` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _modp, _qq
from .errors import ShapeError, SingularMatrixError
from .fields import FieldElement, RationalField, qnorm
from .matrix import NUMPY_MIN_DIM, Matrix, Permutation, _backend, charpoly
from .poly import Polynomial, ext_make, factor_with_hints

SCAN_MAX_ORDER = 64  # finite fields up to this size find eigenvalues by scanning K^x
CHARPOLY_MAX_DIM = 40


def _require_gl(A: Matrix) -> int:
    if not A.is_square:
        raise ShapeError(f"expected a square matrix, got {A.shape}")
    if A.rank() != A.nrows:
        raise SingularMatrixError("length functions are defined on invertible matrices")
    return A.nrows


# --- eigenvalues in K ---------------------------------------------------------


def _scan_eigenvalues(P: Matrix, Z: Matrix | None) -> list:
    """Nonzero ``a`` in K with ``a*Z - P`` singular (``Z`` defaults to 1)."""
    F = P.field
    n = P.nrows
    if _backend(F) == "modp" and n >= NUMPY_MIN_DIM:
        q = F.p
        pa = _modp.as_array(P.rows, q)
        units = np.arange(1, q, dtype=np.int64)
        if Z is None:
            vals = _modp.poly_eval(_modp.charpoly(pa, q), units, q)
            return [F.convert(int(a)) for a in units[vals == 0]]
        za = _modp.as_array(Z.rows, q)
        return [F.convert(int(a)) for a in units if _modp.rank((a * za - pa) % q, q) < n]
    out = []
    for a in F.units():
        M = P.scalar_minus(a) if Z is None else Z.scale(a) - P
        if M.rank() < n:
            out.append(a)
    return out


def _integer_eigenvalues_qq(A: Matrix) -> list[Fraction]:
    """Rational eigenvalues of a large matrix over Q.

    With ``M = d*A`` integral, every rational eigenvalue of ``A`` is ``k/d`` for
    an integer ``k`` with ``|k| <= ||M||_inf``.  All candidates are screened at
    once by evaluating the characteristic polynomial of ``M`` modulo a prime
    larger than the candidate range; survivors are confirmed by a certified
    exact rank.
    """
    M, d = _qq.common_denominator(A.rows)
    n = len(M)
    bound = max(sum(abs(x) for x in row) for row in M)
    p = _qq.PRIMES[0]
    if 2 * bound + 1 >= p:
        return None  # caller falls back to the characteristic polynomial
    cp = _modp.charpoly(_qq._mod_array(M, p), p)
    ks = np.arange(-bound, bound + 1, dtype=np.int64)
    hits = ks[_modp.poly_eval(cp, ks, p) == 0]
    out = []
    for k in hits.tolist():
        if k == 0:
            continue
        cand = [[(k if i == j else 0) - x for j, x in enumerate(row)] for i, row in enumerate(M)]
        if _qq.rank(cand) < n:
            out.append(qnorm(Fraction(k, d)))
    return sorted(out)


def eigenvalues(A: Matrix, hints: Sequence[Polynomial] | None = None) -> list:
    """Distinct nonzero eigenvalues of ``A`` lying in its field, as payloads."""
    F = A.field
    n = A.nrows
    if F.is_finite and (F.order <= SCAN_MAX_ORDER or n > CHARPOLY_MAX_DIM):
        return _scan_eigenvalues(A, None)
    if isinstance(F, RationalField) and n > CHARPOLY_MAX_DIM:
        found = _integer_eigenvalues_qq(A)
        if found is not None:
            return found
    f = charpoly(A)
    roots = []
    for g, _ in factor_with_hints(f, hints):
        if g.degree == 1:
            r = F.neg(g.coeffs[0])
            if not F.is_zero(r):
                roots.append(r)
    return roots


def _quotient_eigenvalues(P: Matrix, Z: Matrix, hints=None) -> tuple[list, Matrix | None]:
    F = P.field
    if F.is_finite and (F.order <= SCAN_MAX_ORDER or P.nrows > CHARPOLY_MAX_DIM):
        return _scan_eigenvalues(P, Z), None
    T = P @ Z.inverse()
    return eigenvalues(T, hints), T


# --- lengths -----------------------------------------------------------------


def len_rank(A: Matrix, check: bool = True) -> Fraction:
    """``rank(1 - A) / n``."""
    n = _require_gl(A) if check else A.nrows
    return Fraction(A.scalar_minus(A.field.one).rank(), n)


def len_jordan(
    A: Matrix, hints: Sequence[Polynomial] | None = None, check: bool = True
) -> tuple[Fraction, FieldElement | None]:
    """``min_a rank(a - A)/n`` over ``a`` in K^x, with an attaining ``a``.

    Non-eigenvalues give rank ``n``, so only eigenvalues in K are tried.
    Among attaining scalars the first in the field's order is returned.
    """
    n = _require_gl(A) if check else A.nrows
    best, arg = Fraction(1), None
    for a in eigenvalues(A, hints):
        v = Fraction(A.scalar_minus(a).rank(), n)
        if v < best:
            best, arg = v, a
    return best, (FieldElement(A.field, arg) if arg is not None else None)


def len_rank_quotient(P: Matrix, Z: Matrix) -> Fraction:
    """``len_rank(P Z^{-1})`` computed as ``rank(Z - P)/n``."""
    return Fraction((Z - P).rank(), P.nrows)


def len_jordan_quotient(P: Matrix, Z: Matrix, hints=None) -> Fraction:
    """``len_jordan(P Z^{-1})`` without forming the inverse when possible."""
    n = P.nrows
    cands, T = _quotient_eigenvalues(P, Z, hints)
    best = Fraction(1)
    for a in cands:
        M = (Z.scale(a) - P) if T is None else T.scalar_minus(a)
        best = min(best, Fraction(M.rank(), n))
    return best


def len_hamming(pi: Permutation) -> Fraction:
    return Fraction(pi.n - pi.fixed_points(), pi.n)


# --- Jordan structure -------------------------------------------------------


def kernel_dims(A: Matrix, a) -> list[int]:
    """``[d_0, d_1, ...]`` with ``d_j = dim ker (A - a)^j``, until it stabilizes."""
    n = A.nrows
    B = A.scalar_minus(a)  # a - A has the same kernels as A - a
    dims = [0]
    P = B
    while True:
        d = n - P.rank()
        if d == dims[-1]:
            return dims
        dims.append(d)
        if d == n:
            return dims
        P = P @ B


def blocks_from_kernel_dims(dims: Sequence[int]) -> tuple[int, ...]:
    """Block sizes (descending) from the kernel-dimension sequence."""
    at_least = [dims[j] - dims[j - 1] for j in range(1, len(dims))] + [0]
    sizes = []
    for j in range(len(at_least) - 1):
        sizes += [j + 1] * (at_least[j] - at_least[j + 1])
    return tuple(sorted(sizes, reverse=True))


def iota_alpha(A: Matrix, a) -> Fraction:
    """Fraction of 1x1 Jordan blocks at eigenvalue ``a``: ``(2 d_1 - d_2)/n``."""
    n = A.nrows
    B = A.scalar_minus(a)
    d1 = n - B.rank()
    if d1 == 0:
        return Fraction(0)
    d2 = n - (B @ B).rank()
    return Fraction(2 * d1 - d2, n)


@dataclass(frozen=True)
class JordanComponent:
    factor: Polynomial
    multiplicity: int
    separable: bool
    inseparability_degree: int
    distinct_roots: int
    blocks: tuple[int, ...]

    @property
    def ones(self) -> int:
        return sum(1 for s in self.blocks if s == 1)

    def to_json(self) -> dict:
        F = self.factor.field
        return {
            "factor": [F.encode(c) for c in self.factor.coeffs],
            "multiplicity": self.multiplicity,
            "separable": self.separable,
            "inseparability_degree": self.inseparability_degree,
            "distinct_roots": self.distinct_roots,
            "blocks": list(self.blocks),
        }


@dataclass(frozen=True)
class JordanType:
    n: int
    components: tuple[JordanComponent, ...]

    def component(self, factor: Polynomial) -> JordanComponent:
        for c in self.components:
            if c.factor == factor.monic():
                return c
        raise KeyError(str(factor))

    def block_count(self) -> int:
        return sum(c.distinct_roots * len(c.blocks) for c in self.components)

    def inseparable_violations(self) -> list[str]:
        """Blocks at inseparable roots whose size is not a multiple of ``p^k``.

        Each cyclic summand ``K[x]/(f^e)`` contributes one block of size
        ``e * p^k``, so sizes are multiples of ``p^k``; they are powers of
        ``p`` only when ``f`` divides the minimal polynomial once.
        """
        bad = []
        for c in self.components:
            q = c.inseparability_degree
            if not c.separable and any(s % q for s in c.blocks):
                bad.append(f"factor {c.factor}: blocks {list(c.blocks)} not multiples of {q}")
        return bad

    def to_json(self) -> dict:
        return {"n": self.n, "components": [c.to_json() for c in self.components]}


def jordan_type(A: Matrix, hints: Sequence[Polynomial] | None = None) -> JordanType:
    """Jordan block sizes per irreducible factor of the characteristic polynomial.

    For each factor ``f`` the matrix is moved to ``L = K[x]/(f)`` and block
    sizes at the designated root are read off the kernel dimensions of powers
    of ``A - a``.
    """
    n = _require_gl(A)
    K = A.field
    comps = []
    for f, e in factor_with_hints(charpoly(A), hints):
        ext = ext_make(K, f, assume_irreducible=True)
        L = ext.field
        AL = A if L == K else A.map(L, ext.embed)
        dims = kernel_dims(AL, ext.root)
        comps.append(
            JordanComponent(
                factor=f,
                multiplicity=e,
                separable=ext.separable,
                inseparability_degree=ext.inseparability_degree,
                distinct_roots=ext.distinct_roots,
                blocks=blocks_from_kernel_dims(dims),
            )
        )
    jt = JordanType(n, tuple(comps))
    total = sum(c.distinct_roots * sum(c.blocks) for c in comps)
    if total != n:
        raise AssertionError(f"Jordan type accounts for {total} of {n} dimensions")
    bad = jt.inseparable_violations()
    if bad:
        raise AssertionError("; ".join(bad))
    return jt


def iota(A: Matrix, hints=None, check: bool = True) -> tuple[Fraction, FieldElement | None]:
    """``max_a iota_a(A)`` over eigenvalues in K^x (0 if there are none)."""
    if check:
        _require_gl(A)
    best, arg = Fraction(0), None
    for a in eigenvalues(A, hints):
        v = iota_alpha(A, a)
        if v > best:
            best, arg = v, a
    return best, (FieldElement(A.field, arg) if arg is not None else None)


def iota_one(A: Matrix) -> Fraction:
    return iota_alpha(A, A.field.one)


def kappa(jt: JordanType) -> Fraction:
    return Fraction(
        sum(c.factor.degree * c.ones for c in jt.components if c.separable), jt.n
    )


def _frac_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class LengthReport:
    n: int
    ell_r: Fraction
    ell_J: Fraction
    iota1: Fraction
    iota: Fraction
    kappa: Fraction
    alpha_star: FieldElement | None = None
    jordan: JordanType | None = field(default=None, compare=False)

    def check_invariants(self) -> list[str]:
        """Return the violated inequalities (empty when all hold)."""
        half = Fraction(1, 2)
        bad = []
        if not (half * (1 - self.iota1) <= self.ell_r <= 1 - self.iota1):
            bad.append("rank length outside [(1-iota1)/2, 1-iota1]")
        if not (half * (1 - self.iota) <= self.ell_J <= 1 - self.iota):
            bad.append("Jordan length outside [(1-iota)/2, 1-iota]")
        if not (0 <= self.ell_J <= self.ell_r <= 1):
            bad.append("0 <= ell_J <= ell_r <= 1 fails")
        if not (self.iota1 <= self.iota <= self.kappa <= 1):
            bad.append("iota1 <= iota <= kappa <= 1 fails")
        return bad

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "ell_r": _frac_json(self.ell_r),
            "ell_J": _frac_json(self.ell_J),
            "iota1": _frac_json(self.iota1),
            "iota": _frac_json(self.iota),
            "kappa": _frac_json(self.kappa),
            "alpha_star": self.alpha_star.encode() if self.alpha_star is not None else None,
        }
        if self.jordan is not None:
            out["jordan_type"] = self.jordan.to_json()
        return out


def iota_report(A: Matrix, hints: Sequence[Polynomial] | None = None) -> LengthReport:
    n = _require_gl(A)
    jt = jordan_type(A, hints)
    ell_J, alpha = len_jordan(A, hints, check=False)
    io, _ = iota(A, hints, check=False)
    return LengthReport(
        n=n,
        ell_r=len_rank(A, check=False),
        ell_J=ell_J,
        iota1=iota_one(A),
        iota=io,
        kappa=kappa(jt),
        alpha_star=alpha,
        jordan=jt,
    )


# --- the amplification schedule -------------------------------------------


def f_map(x: Fraction) -> Fraction:
    """``x^2 + (1 - x)^2``."""
    x = Fraction(x)
    return x * x + (1 - x) * (1 - x)


def f_iterate(x: Fraction, m: int) -> Fraction:
    for _ in range(m):
        x = f_map(x)
    return x


def _schedule_dyadic(r: Fraction, bound: Fraction, bits: int, max_steps: int):
    """Smallest ``m`` with ``r^(2^m) <= bound`` using ``[lo, hi]`` dyadic enclosures.

    Returns ``None`` if the enclosure straddles ``bound`` at this precision.
    """
    scale = 1 << bits
    lo = (r.numerator * scale) // r.denominator
    hi = -((-r.numerator * scale) // r.denominator)
    bn, bd = bound.numerator, bound.denominator
    for m in range(max_steps + 1):
        # compare lo/scale and hi/scale against bound
        if hi * bd <= bn * scale:
            return m
        if lo * bd <= bn * scale:
            return None
        lo = (lo * lo) >> bits
        hi = -((-(hi * hi)) >> bits)
    raise ValueError("schedule did not converge")


def f_schedule(delta, eps) -> int:
    """Smallest ``m >= 0`` with ``f^m(1 - delta) <= 1/2 + 2*eps``.

    Uses ``f(1/2 + u) = 1/2 + 2u^2``, i.e. ``f^m(x) = 1/2 + (2x - 1)^(2^m)/2``,
    and exact comparisons on dyadic enclosures of the iterates.
    """
    delta, eps = Fraction(delta), Fraction(eps)
    if not (0 < delta <= 1):
        raise ValueError("delta must lie in (0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = 1 - delta
    target = Fraction(1, 2) + 2 * eps
    if x <= target:
        return 0
    r = 2 * x - 1  # in (0, 1)
    bound = 4 * eps  # need r^(2^m) <= bound
    # exact while the numbers stay small
    y, m = r, 0
    while y.denominator.bit_length() < 2048:
        if y <= bound:
            return m
        y, m = y * y, m + 1
    bits = 4096
    while True:
        res = _schedule_dyadic(r, bound, bits, max_steps=256)
        if res is not None:
            return res
        bits *= 2
