"""Exact base fields: F_p, finite extensions, Q, and F_p(t).

A field object is an immutable context that performs arithmetic on raw
*payloads* (ints, tuples, Fractions).  Matrices and polynomials store payloads
directly; :class:`FieldElement` wraps a payload with its field for use at API
boundaries and in interactive code.

Payload conventions::

    PrimeField(p)              int in [0, p)
    ExtensionField(base, f)    tuple of base payloads, length deg(f)
    RationalField()            int if integral, else a reduced Fraction
    RationalFunctionField(p)   (num, den) coefficient tuples over F_p,
                               coprime, den monic; zero is ((), (1,))
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction
from typing import Any, Iterator

from . import polyarith as pa
from .errors import FieldError


@functools.lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    from sympy import isprime

    return bool(isprime(n))


class Field:
    """Common interface of all field contexts."""

    characteristic: int = 0
    is_finite: bool = False
    order: int | None = None
    degree: int = 1
    base: "Field | None" = None
    zero: Any
    one: Any

    # identity -----------------------------------------------------------
    def key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Field) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.name()

    def name(self) -> str:
        raise NotImplementedError

    # arithmetic on payloads ----------------------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_one(self, a) -> bool:
        return a == self.one

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def from_int(self, n: int):
        raise NotImplementedError

    def convert(self, x):
        """Coerce ``x`` (int, Fraction, FieldElement or payload) to a payload."""
        if isinstance(x, FieldElement):
            if x.field == self:
                return x.value
            if self.base is not None and x.field == self.base:
                return self.embed(self.base.convert(x))
            raise FieldError(f"cannot convert element of {x.field} into {self}")
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.div(self.from_int(x.numerator), self.from_int(x.denominator))
        return self.convert_payload(x)

    def convert_payload(self, x):
        raise FieldError(f"cannot convert {x!r} into {self}")

    def embed(self, a):
        raise FieldError(f"{self} has no base field")

    def __call__(self, x) -> "FieldElement":
        return FieldElement(self, self.convert(x))

    # enumeration & sampling ----------------------------------------------
    def elements(self) -> Iterator:
        raise FieldError(f"{self} is infinite")

    def random(self, rng):
        raise NotImplementedError

    def random_nonzero(self, rng):
        while True:
            a = self.random(rng)
            if not self.is_zero(a):
                return a

    def units(self) -> list:
        return [a for a in self.elements() if not self.is_zero(a)]

    def prime_subfield(self) -> "Field":
        return self if self.base is None else self.base.prime_subfield()

    # serialization --------------------------------------------------------
    def descriptor(self) -> dict:
        raise NotImplementedError

    def encode(self, a):
        raise NotImplementedError

    def decode(self, obj):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(self.encode(a))


class PrimeField(Field):
    is_finite = True

    def __init__(self, p: int):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = 0
        self.one = 1

    def key(self):
        return ("prime", self.p)

    def name(self):
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a == 0

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def from_int(self, n):
        return n % self.p

    def convert_payload(self, x):
        if isinstance(x, int):
            return x % self.p
        return super().convert_payload(x)

    def elements(self):
        return iter(range(self.p))

    def random(self, rng):
        return rng.randrange(self.p)

    def descriptor(self):
        return {"kind": "prime", "p": self.p}

    def encode(self, a):
        return a

    def decode(self, obj):
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise FieldError(f"expected an integer residue, got {obj!r}")
        return obj % self.p

    def format(self, a):
        return str(a)


class ExtensionField(Field):
    """``base[x]/(modulus)`` with the power basis ``1, x, ..., x^(d-1)``."""

    def __init__(self, base: Field, modulus, check: bool = True):
        modulus = tuple(base.convert(c) for c in modulus)
        modulus = pa.strip(base, modulus)
        if len(modulus) < 2:
            raise FieldError("extension modulus must have degree >= 1")
        if not base.is_one(modulus[-1]):
            raise FieldError("extension modulus must be monic")
        if check:
            from .poly import Polynomial, is_irreducible

            if not is_irreducible(Polynomial(base, modulus)):
                raise FieldError(f"modulus {modulus} is reducible over {base}")
        self.base = base
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.characteristic = base.characteristic
        self.is_finite = base.is_finite
        self.order = base.order**self.degree if base.is_finite else None
        bz = base.zero
        self.zero = (bz,) * self.degree
        self.one = (base.one,) + (bz,) * (self.degree - 1)
        self.gen = (bz, base.one) + (bz,) * (self.degree - 2) if self.degree > 1 else (
            base.neg(modulus[0]),
        )

    def key(self):
        return ("ext", self.base.key(), self.modulus)

    def name(self):
        return f"{self.base.name()}[x]/({_fmt_poly(self.base, self.modulus)})"

    def _pad(self, t):
        d = self.degree
        if len(t) < d:
            return tuple(t) + (self.base.zero,) * (d - len(t))
        return tuple(t)

    def _reduce(self, t):
        B = self.base
        t = list(t)
        d = self.degree
        mod = self.modulus
        for k in range(len(t) - 1, d - 1, -1):
            c = t[k]
            if B.is_zero(c):
                continue
            for j in range(d):
                t[k - d + j] = B.sub(t[k - d + j], B.mul(c, mod[j]))
        return self._pad(t[:d])

    def add(self, a, b):
        add = self.base.add
        return tuple(add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        sub = self.base.sub
        return tuple(sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        neg = self.base.neg
        return tuple(neg(x) for x in a)

    def mul(self, a, b):
        B = self.base
        d = self.degree
        out = [B.zero] * (2 * d - 1)
        for i, x in enumerate(a):
            if B.is_zero(x):
                continue
            for j, y in enumerate(b):
                if not B.is_zero(y):
                    out[i + j] = B.add(out[i + j], B.mul(x, y))
        return self._reduce(out)

    def inv(self, a):
        B = self.base
        g, s, _ = pa.xgcd(B, pa.strip(B, a), self.modulus)
        if g != (B.one,):
            raise ZeroDivisionError("inverse of zero")
        return self._pad(s)

    def is_zero(self, a):
        return a == self.zero

    def from_int(self, n):
        return self.embed(self.base.from_int(n))

    def embed(self, a):
        return (a,) + (self.base.zero,) * (self.degree - 1)

    def convert_payload(self, x):
        if isinstance(x, (tuple, list)) and len(x) <= self.degree:
            return self._pad([self.base.convert(c) for c in x])
        return super().convert_payload(x)

    def elements(self):
        if not self.is_finite:
            raise FieldError(f"{self} is infinite")
        for digits in itertools.product(list(self.base.elements()), repeat=self.degree):
            yield tuple(reversed(digits))

    def random(self, rng):
        return tuple(self.base.random(rng) for _ in range(self.degree))

    def descriptor(self):
        return {
            "kind": "ext",
            "base": self.base.descriptor(),
            "modulus": [self.base.encode(c) for c in self.modulus],
        }

    def encode(self, a):
        return [self.base.encode(c) for c in a]

    def decode(self, obj):
        if not isinstance(obj, list) or len(obj) > self.degree:
            raise FieldError(f"expected at most {self.degree} coefficients, got {obj!r}")
        return self._pad([self.base.decode(c) for c in obj])

    def format(self, a):
        return _fmt_poly(self.base, pa.strip(self.base, a), var="a") or "0"


def qnorm(x):
    """Canonical rational payload: ``int`` when integral, else a reduced Fraction."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


class RationalField(Field):
    """Q.  Payloads are ``int`` when integral and ``Fraction`` otherwise; the two
    compare and hash alike, and integer matrices stay on fast ``int`` arithmetic."""

    def __init__(self):
        self.zero = 0
        self.one = 1

    def key(self):
        return ("Q",)

    def name(self):
        return "QQ"

    def add(self, a, b):
        return qnorm(a + b)

    def sub(self, a, b):
        return qnorm(a - b)

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return qnorm(a * b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if a == 1 or a == -1:
            return int(a)
        return qnorm(Fraction(1) / a)

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return qnorm(Fraction(a) / b)

    def is_zero(self, a):
        return a == 0

    def is_one(self, a):
        return a == 1

    def from_int(self, n):
        return int(n)

    def convert(self, x):
        if isinstance(x, Fraction):
            return qnorm(x)
        return super().convert(x)

    def convert_payload(self, x):
        if isinstance(x, str):
            try:
                return qnorm(Fraction(x))
            except ValueError as exc:
                raise FieldError(f"cannot parse {x!r} as a rational") from exc
        return super().convert_payload(x)

    def random(self, rng, bound: int = 5, den: int = 3):
        return qnorm(Fraction(rng.randint(-bound, bound), rng.randint(1, den)))

    def descriptor(self):
        return {"kind": "Q"}

    def encode(self, a):
        return {"num": a.numerator, "den": a.denominator}

    def decode(self, obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return obj
        if isinstance(obj, dict) and set(obj) == {"num", "den"}:
            num, den = obj["num"], obj["den"]
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (num, den)):
                raise FieldError(f"expected integer num/den, got {obj!r}")
            if den == 0:
                raise FieldError("zero denominator")
            return qnorm(Fraction(num, den))
        if isinstance(obj, str):
            return self.convert_payload(obj)
        raise FieldError(f"expected a rational, got {obj!r}")

    def format(self, a):
        return str(a)


class RationalFunctionField(Field):
    """F_p(t); payloads are reduced fractions of F_p[t] coefficient tuples."""

    def __init__(self, p: int):
        self.Fp = PrimeField(p)
        self.p = p
        self.characteristic = p
        self.zero = ((), (1,))
        self.one = ((1,), (1,))

    def key(self):
        return ("Fp_t", self.p)

    def name(self):
        return f"GF({self.p})(t)"

    def make(self, num, den=(1,)):
        F = self.Fp
        num = pa.strip(F, tuple(c % self.p for c in num))
        den = pa.strip(F, tuple(c % self.p for c in den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = pa.gcd(F, num, den)
        if len(g) > 1:
            num = pa.divmod_(F, num, g)[0]
            den = pa.divmod_(F, den, g)[0]
        c = F.inv(den[-1])
        if c != 1:
            num = pa.scale(F, num, c)
            den = pa.scale(F, den, c)
        return (num, den)

    def add(self, a, b):
        F = self.Fp
        if a[1] == b[1]:
            return self.make(pa.add(F, a[0], b[0]), a[1])
        return self.make(
            pa.add(F, pa.mul(F, a[0], b[1]), pa.mul(F, b[0], a[1])), pa.mul(F, a[1], b[1])
        )

    def neg(self, a):
        return (pa.neg(self.Fp, a[0]), a[1])

    def mul(self, a, b):
        F = self.Fp
        return self.make(pa.mul(F, a[0], b[0]), pa.mul(F, a[1], b[1]))

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return self.make(a[1], a[0])

    def is_zero(self, a):
        return not a[0]

    def from_int(self, n):
        return self.make((n,))

    def t(self):
        return self.make((0, 1))

    def convert_payload(self, x):
        if isinstance(x, tuple) and len(x) == 2 and all(isinstance(c, tuple) for c in x):
            return self.make(*x)
        from .poly import Polynomial

        if isinstance(x, Polynomial) and x.field == self.Fp:
            return self.make(x.coeffs)
        return super().convert_payload(x)

    def random(self, rng, num_deg: int = 3, den_deg: int = 3):
        num = [rng.randrange(self.p) for _ in range(rng.randint(0, num_deg) + 1)]
        dd = rng.randint(0, den_deg)
        den = [rng.randrange(self.p) for _ in range(dd)] + [1]
        return self.make(num, den)

    def descriptor(self):
        return {"kind": "Fp_t", "p": self.p}

    def encode(self, a):
        return {"num": list(a[0]), "den": list(a[1])}

    def decode(self, obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return self.from_int(obj)
        if isinstance(obj, dict) and set(obj) == {"num", "den"}:
            return self.make(tuple(obj["num"]), tuple(obj["den"]))
        if isinstance(obj, list):
            return self.make(tuple(obj))
        raise FieldError(f"expected a rational function, got {obj!r}")

    def format(self, a):
        num = _fmt_poly(self.Fp, a[0], var="t") or "0"
        if a[1] == (1,):
            return num
        return f"({num})/({_fmt_poly(self.Fp, a[1], var='t')})"


class FieldElement:
    """A payload bound to its field, with the usual operators."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _other(self, other):
        if isinstance(other, FieldElement) and other.field == self.field:
            return other.value
        return self.field.convert(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.value)

    def __eq__(self, other):
        try:
            return self.value == self._other(other)
        except FieldError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field.format(self.value)} in {self.field.name()}"

    def __str__(self):
        return self.field.format(self.value)

    def encode(self):
        return self.field.encode(self.value)


QQ = RationalField()


@functools.lru_cache(maxsize=None)
def GF(p: int, k: int = 1) -> Field:
    """F_p, or F_{p^k} built on the smallest monic irreducible of degree k."""
    base = PrimeField(p)
    if k == 1:
        return base
    from .poly import smallest_irreducible

    return ExtensionField(base, smallest_irreducible(base, k).coeffs, check=False)


@functools.lru_cache(maxsize=None)
def FpT(p: int) -> RationalFunctionField:
    return RationalFunctionField(p)


def field_make(descriptor: dict) -> Field:
    """Build (and validate) a field context from its JSON descriptor."""
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise FieldError(f"malformed field descriptor {descriptor!r}")
    kind = descriptor["kind"]
    if kind == "prime":
        return _prime(descriptor.get("p"))
    if kind == "Q":
        return QQ
    if kind == "Fp_t":
        p = descriptor.get("p")
        _prime(p)
        return FpT(p)
    if kind == "ext":
        base = field_make(descriptor["base"])
        modulus = [base.decode(c) for c in descriptor["modulus"]]
        return _extension(base, tuple(modulus))
    raise FieldError(f"unknown field kind {kind!r}")


def _prime(p) -> PrimeField:
    if not isinstance(p, int) or isinstance(p, bool):
        raise FieldError(f"characteristic must be an integer, got {p!r}")
    return PrimeField(p)


@functools.lru_cache(maxsize=256)
def _extension(base: Field, modulus: tuple) -> ExtensionField:
    return ExtensionField(base, modulus)


def _fmt_poly(F: Field, coeffs, var: str = "x") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if F.is_zero(c):
            continue
        cs = F.format(c)
        if " " in cs or "+" in cs or "/" in cs:
            cs = f"({cs})"
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(cs)
        elif F.is_one(c):
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return " + ".join(terms)
