"""Univariate polynomials over the supported fields.

Factorization over finite fields is squarefree decomposition, distinct-degree
splitting and Cantor-Zassenhaus equal-degree splitting with an explicit seed.
Over Q the factorization is delegated to SymPy.  Over F_p(t) only hinted
factors and linear factors are found (linear factors via the divisors of the
constant term after making the polynomial monic and integral over F_p[t]).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import polyarith as pa
from .errors import FieldError, PolynomialError
from .fields import (
    ExtensionField,
    Field,
    FieldElement,
    PrimeField,
    RationalField,
    RationalFunctionField,
    _fmt_poly,
)


class Polynomial:
    """Immutable dense polynomial; ``coeffs`` ascending, stripped."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence = ()):
        self.field = field
        self.coeffs = pa.strip(field, tuple(field.convert(c) for c in coeffs))

    @classmethod
    def _raw(cls, field, coeffs):
        p = object.__new__(cls)
        p.field = field
        p.coeffs = coeffs
        return p

    @classmethod
    def x(cls, field: Field):
        return cls._raw(field, (field.zero, field.one))

    @classmethod
    def constant(cls, field: Field, c):
        return cls(field, (c,))

    @classmethod
    def from_roots(cls, field: Field, roots):
        f = cls._raw(field, (field.one,))
        for r in roots:
            f = f * cls._raw(field, (field.neg(field.convert(r)), field.one))
        return f

    # basic properties ----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        if not self.coeffs:
            raise PolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.field.is_one(self.coeffs[-1])

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            raise PolynomialError("zero polynomial cannot be made monic")
        return Polynomial._raw(self.field, pa.monic(self.field, self.coeffs))

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise FieldError(f"polynomials over {self.field} and {other.field}")
            return other.coeffs
        return pa.strip(self.field, (self.field.convert(other),))

    def __add__(self, other):
        return Polynomial._raw(self.field, pa.add(self.field, self.coeffs, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial._raw(self.field, pa.sub(self.field, self.coeffs, self._coerce(other)))

    def __rsub__(self, other):
        return Polynomial._raw(self.field, pa.sub(self.field, self._coerce(other), self.coeffs))

    def __neg__(self):
        return Polynomial._raw(self.field, pa.neg(self.field, self.coeffs))

    def __mul__(self, other):
        return Polynomial._raw(self.field, pa.mul(self.field, self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Polynomial._raw(self.field, (self.field.one,))
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __divmod__(self, other):
        q, r = pa.divmod_(self.field, self.coeffs, self._coerce(other))
        return Polynomial._raw(self.field, q), Polynomial._raw(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self.coeffs == other.coeffs
        try:
            return self.coeffs == self._coerce(other)
        except FieldError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __call__(self, x):
        """Evaluate at an element of the coefficient field."""
        if isinstance(x, FieldElement):
            x = self.field.convert(x)
        return FieldElement(self.field, pa.evaluate(self.field, self.coeffs, x))

    def evaluate_payload(self, x):
        return pa.evaluate(self.field, self.coeffs, x)

    def derivative(self) -> "Polynomial":
        return Polynomial._raw(self.field, pa.deriv(self.field, self.coeffs))

    def gcd(self, other: "Polynomial") -> "Polynomial":
        return Polynomial._raw(self.field, pa.gcd(self.field, self.coeffs, other.coeffs))

    def powmod(self, e: int, m: "Polynomial") -> "Polynomial":
        return Polynomial._raw(self.field, pa.powmod(self.field, self.coeffs, e, m.coeffs))

    def map_coeffs(self, field: Field, fn: Callable) -> "Polynomial":
        return Polynomial._raw(field, pa.strip(field, tuple(fn(c) for c in self.coeffs)))

    def __repr__(self):
        return f"Polynomial({_fmt_poly(self.field, self.coeffs) or '0'} over {self.field})"

    def __str__(self):
        return _fmt_poly(self.field, self.coeffs) or "0"

    def encode(self) -> list:
        return [self.field.encode(c) for c in self.coeffs]

    @classmethod
    def decode(cls, field: Field, obj) -> "Polynomial":
        return cls._raw(field, pa.strip(field, tuple(field.decode(c) for c in obj)))

    def sort_key(self):
        return (len(self.coeffs), repr(self.coeffs))


# ---------------------------------------------------------------------------
# finite fields


def _require_finite(F: Field):
    if not F.is_finite:
        raise PolynomialError(f"{F} is not a finite field")


def pth_root(F: Field, a):
    """The unique p-th root of ``a`` in a finite field of characteristic p."""
    return F.pow(a, F.order // F.characteristic)


def _pth_root_poly(f: Polynomial) -> Polynomial:
    F = f.field
    p = F.characteristic
    return Polynomial._raw(F, tuple(pth_root(F, c) for c in f.coeffs[::p]))


def squarefree_decomposition(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Monic squarefree parts ``(h, e)`` with ``f = prod h**e`` (``f`` monic)."""
    F = f.field
    p = F.characteristic
    one = Polynomial._raw(F, (F.one,))
    out = []
    if f.degree < 1:
        return out
    fp = f.derivative()
    if not fp.is_zero():
        c = f.gcd(fp)
        w = f // c
        i = 1
        while w.degree > 0:
            y = w.gcd(c)
            z = w // y
            if z.degree > 0:
                out.append((z, i))
            i += 1
            w = y
            c = c // y
        if c != one and c.degree > 0:
            out.extend((h, e * p) for h, e in squarefree_decomposition(_pth_root_poly(c)))
    else:
        out.extend((h, e * p) for h, e in squarefree_decomposition(_pth_root_poly(f)))
    return out


def distinct_degree_factorization(f: Polynomial) -> list[tuple[Polynomial, int]]:
    F = f.field
    q = F.order
    x = Polynomial.x(F)
    out = []
    i = 1
    rest = f
    h = x % rest
    while rest.degree >= 2 * i:
        h = h.powmod(q, rest)
        g = rest.gcd(h - x)
        if g.degree > 0:
            out.append((g, i))
            rest = rest // g
            h = h % rest
        i += 1
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def equal_degree_factorization(f: Polynomial, d: int, rng: random.Random) -> list[Polynomial]:
    F = f.field
    q = F.order
    n = f.degree
    if n == d:
        return [f]
    r = n // d
    factors = [f]
    if q % 2:
        exponent = (q**d - 1) // 2
    else:
        squarings = d * (q.bit_length() - 1)
    one = Polynomial._raw(F, (F.one,))
    while len(factors) < r:
        a = Polynomial._raw(F, pa.strip(F, tuple(F.random(rng) for _ in range(n))))
        if a.degree < 1:
            continue
        if q % 2:
            b = a.powmod(exponent, f) - one
        else:
            b = a
            t = a
            for _ in range(squarings - 1):
                t = (t * t) % f
                b = b + t
        nxt = []
        for u in factors:
            if u.degree > d:
                g = u.gcd(b % u) if not b.is_zero() else u
                if 0 < g.degree < u.degree:
                    nxt.extend([g, u // g])
                    continue
            nxt.append(u)
        factors = nxt
    return factors


def poly_factor(f: Polynomial, seed: int = 0) -> list[tuple[Polynomial, int]]:
    """Irreducible factorization over a finite field.

    Returns monic irreducible factors with multiplicities, sorted by degree
    then coefficients; the leading coefficient of ``f`` is dropped.
    """
    if f.is_zero():
        raise PolynomialError("cannot factor the zero polynomial")
    _require_finite(f.field)
    rng = random.Random(seed)
    counts: dict[Polynomial, int] = {}
    for part, e in squarefree_decomposition(f.monic()):
        for chunk, d in distinct_degree_factorization(part):
            for irr in equal_degree_factorization(chunk, d, rng):
                irr = irr.monic()
                counts[irr] = counts.get(irr, 0) + e
    return sorted(counts.items(), key=lambda fe: fe[0].sort_key())


def _prime_divisors(n: int) -> list[int]:
    from sympy import primefactors

    return [int(r) for r in primefactors(n)]


def _is_irreducible_finite(f: Polynomial) -> bool:
    F = f.field
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    f = f.monic()
    q = F.order
    x = Polynomial.x(F)

    def frob(k):
        h = x % f
        for _ in range(k):
            h = h.powmod(q, f)
        return h

    if frob(n) != x % f:
        return False
    for r in _prime_divisors(n):
        if f.gcd(frob(n // r) - x).degree > 0:
            return False
    return True


def is_irreducible(f: Polynomial) -> bool:
    """Decide irreducibility over the coefficient field.

    Finite fields: Rabin's test (deterministic).  Q: SymPy.  F_p(t): degree
    at most 3 by root search, otherwise Eisenstein's criterion; undecidable
    inputs raise :class:`PolynomialError`.
    """
    F = f.field
    if f.degree < 1:
        return False
    if F.is_finite:
        return _is_irreducible_finite(f)
    if f.degree == 1:
        return True
    if isinstance(F, RationalField):
        return _sympy_poly(f).is_irreducible
    if isinstance(F, RationalFunctionField):
        if f.degree <= 3:
            return not _fpt_linear_roots(f)
        if _eisenstein_fpt(f):
            return True
        raise PolynomialError(f"cannot decide irreducibility of {f} over {F}")
    raise PolynomialError(f"irreducibility over {F} is not supported")


def smallest_irreducible(F: Field, k: int) -> Polynomial:
    """First monic irreducible of degree ``k`` in coefficient-index order."""
    _require_finite(F)
    elems = list(F.elements())
    for digits in itertools.product(elems, repeat=k):
        f = Polynomial._raw(F, tuple(reversed(digits)) + (F.one,))
        if _is_irreducible_finite(f):
            return f
    raise PolynomialError(f"no irreducible polynomial of degree {k} over {F}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Q via SymPy


def _sympy_poly(f: Polynomial):
    import sympy

    X = sympy.Symbol("x")
    coeffs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(f.coeffs)]
    return sympy.Poly(coeffs, X, domain="QQ")


def _from_sympy(F: Field, sp) -> Polynomial:
    coeffs = []
    for c in reversed(sp.all_coeffs()):
        c = sp.domain.to_sympy(c) if hasattr(sp.domain, "to_sympy") else c
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return Polynomial(F, coeffs)


def _factor_rational(f: Polynomial) -> list[tuple[Polynomial, int]]:
    _, facs = _sympy_poly(f).factor_list()
    out = [(_from_sympy(f.field, g).monic(), int(e)) for g, e in facs]
    return sorted(out, key=lambda fe: (fe[0].degree, fe[0].coeffs))


# ---------------------------------------------------------------------------
# F_p(t)


def _fpt_make_integral(f: Polynomial):
    """Monic ``f`` over F_p(t) -> (``g`` with F_p[t] coefficients, ``D``) where
    ``g(y) = D^n f(y/D)``."""
    K = f.field
    Fp = K.Fp
    f = f.monic()
    n = f.degree
    D = (1,)
    for c in f.coeffs:
        den = c[1]
        D = pa.divmod_(Fp, pa.mul(Fp, D, den), pa.gcd(Fp, D, den))[0]
    coeffs = []
    for i, c in enumerate(f.coeffs):
        Dpow = (1,)
        for _ in range(n - i):
            Dpow = pa.mul(Fp, Dpow, D)
        num = pa.mul(Fp, c[0], Dpow)
        q, r = pa.divmod_(Fp, num, c[1])
        assert not r
        coeffs.append(q)
    return coeffs, D


def _monic_divisors(Fp: PrimeField, c) -> list[tuple]:
    fac = poly_factor(Polynomial._raw(Fp, pa.strip(Fp, c)))
    divs = [(1,)]
    for g, e in fac:
        nxt = []
        for d in divs:
            acc = d
            nxt.append(acc)
            for _ in range(e):
                acc = pa.mul(Fp, acc, g.coeffs)
                nxt.append(acc)
        divs = nxt
    return divs


def _fpt_linear_roots(f: Polynomial) -> list:
    """Roots (with repetition) of ``f`` over F_p(t)."""
    K = f.field
    Fp = K.Fp
    roots = []
    f = f.monic()
    while f.degree >= 1:
        if K.is_zero(f.coeffs[0]):
            roots.append(K.zero)
            f = Polynomial._raw(K, f.coeffs[1:])
            continue
        coeffs, D = _fpt_make_integral(f)
        c0 = coeffs[0]
        found = None
        for d in _monic_divisors(Fp, c0):
            for u in range(1, Fp.p):
                y = pa.scale(Fp, d, u)
                val = pa.evaluate(_PolyRing(Fp), [tuple(c) for c in coeffs], y)
                if not val:
                    found = K.make(y, D)
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        f = f // Polynomial._raw(K, (K.neg(found), K.one))
    return roots


class _PolyRing:
    """F_p[t] viewed as a ring so polynomials over it can be evaluated."""

    def __init__(self, Fp):
        self.Fp = Fp
        self.zero = ()

    def add(self, a, b):
        return pa.add(self.Fp, a, b)

    def mul(self, a, b):
        return pa.mul(self.Fp, a, b)


def _eisenstein_fpt(f: Polynomial) -> bool:
    K = f.field
    Fp = K.Fp
    coeffs, _ = _fpt_make_integral(f)
    c0 = coeffs[0]
    if not c0:
        return False
    for g, _ in poly_factor(Polynomial._raw(Fp, c0)):
        g = g.coeffs
        if all(not pa.rem(Fp, c, g) for c in coeffs[:-1]):
            if pa.rem(Fp, c0, pa.mul(Fp, g, g)):
                return True
    return False


# ---------------------------------------------------------------------------
# public operations


def factor_with_hints(
    f: Polynomial, hints: Sequence[Polynomial] | None = None, seed: int = 0
) -> list[tuple[Polynomial, int]]:
    """Complete monic irreducible factorization of ``f`` over its field.

    Finite fields and Q need no hints.  Over F_p(t) each hint is divided out
    as often as it divides, the remaining linear factors are found by root
    search, and anything left over raises :class:`PolynomialError`.
    """
    if f.is_zero():
        raise PolynomialError("cannot factor the zero polynomial")
    F = f.field
    if F.is_finite:
        return poly_factor(f, seed=seed)
    if isinstance(F, RationalField):
        return _factor_rational(f)
    if not isinstance(F, RationalFunctionField):
        raise PolynomialError(f"factorization over {F} is not supported")
    rest = f.monic()
    counts: dict[Polynomial, int] = {}
    for h in hints or ():
        if h.field != F:
            raise FieldError(f"hint {h} is not over {F}")
        h = h.monic()
        if h.degree < 1:
            continue
        while rest.degree >= h.degree:
            q, r = divmod(rest, h)
            if not r.is_zero():
                break
            rest = q
            counts[h] = counts.get(h, 0) + 1
    for r in _fpt_linear_roots(rest):
        lin = Polynomial._raw(F, (F.neg(r), F.one))
        rest = rest // lin
        counts[lin] = counts.get(lin, 0) + 1
    if rest.degree > 0:
        raise PolynomialError(
            f"cannot factor {rest} over {F}; pass its irreducible factors as hints"
        )
    return sorted(counts.items(), key=lambda fe: fe[0].sort_key())


def roots_in_field(
    f: Polynomial, K: Field | None = None, hints: Sequence[Polynomial] | None = None
) -> list[tuple[FieldElement, int]]:
    """Roots of ``f`` lying in ``K`` (default: the coefficient field), with multiplicity."""
    if f.is_zero():
        raise PolynomialError("the zero polynomial has every element as a root")
    if K is not None and K != f.field:
        if getattr(K, "base", None) != f.field:
            raise FieldError(f"{K} is not an extension of {f.field}")
        f = f.map_coeffs(K, K.embed)
    F = f.field
    out = []
    for g, e in factor_with_hints(f, hints):
        if g.degree == 1:
            out.append((FieldElement(F, F.neg(g.coeffs[0])), e))
    return out


@dataclass(frozen=True)
class Extension:
    """Result of :func:`ext_make`: ``L = K[x]/(f)`` with a designated root."""

    base: Field
    field: Field
    modulus: Polynomial
    root: object  # payload in ``field``
    separable: bool
    inseparability_degree: int
    distinct_roots: int

    def embed(self, a):
        if self.field == self.base:
            return a
        return self.field.embed(a)

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def root_element(self) -> FieldElement:
        return FieldElement(self.field, self.root)


def separability(f: Polynomial) -> tuple[bool, int]:
    """``(separable, p^k)`` for irreducible ``f``; ``f(x) = g(x^(p^k))``."""
    F = f.field
    if not f.derivative().is_zero():
        return True, 1
    p = F.characteristic
    k = 1
    while True:
        nxt = k * p
        if any(not F.is_zero(c) for i, c in enumerate(f.coeffs) if i % nxt):
            return False, k
        k = nxt


def ext_make(K: Field, f: Polynomial, assume_irreducible: bool = False) -> Extension:
    if f.field != K:
        raise FieldError(f"{f} is not over {K}")
    if f.degree < 1:
        raise PolynomialError("extension polynomial must have degree >= 1")
    f = f.monic()
    if not assume_irreducible and not is_irreducible(f):
        raise PolynomialError(f"{f} is reducible over {K}")
    sep, pk = separability(f)
    if f.degree == 1:
        return Extension(K, K, f, K.neg(f.coeffs[0]), True, 1, 1)
    L = ExtensionField(K, f.coeffs, check=False)
    return Extension(K, L, f, L.gen, sep, pk, f.degree // pk)
