"""Dense univariate polynomial arithmetic on coefficient tuples.

Coefficients are field payloads in ascending degree order; the field object
``F`` supplies ``add``, ``sub``, ``mul``, ``inv``, ``is_zero``, ``zero`` and
``one``.  Every function returns a stripped tuple (no trailing zeros), so the
zero polynomial is ``()``.
"""

from __future__ import annotations


def strip(F, a):
    n = len(a)
    while n and F.is_zero(a[n - 1]):
        n -= 1
    return tuple(a[:n])


def degree(a) -> int:
    return len(a) - 1


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return strip(F, out)


def neg(F, a):
    return tuple(F.neg(c) for c in a)


def sub(F, a, b):
    return add(F, a, neg(F, b))


def scale(F, a, c):
    if F.is_zero(c):
        return ()
    return strip(F, [F.mul(x, c) for x in a])


def mul(F, a, b):
    if not a or not b:
        return ()
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return strip(F, out)


def divmod_(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), strip(F, a)
    inv_lc = F.inv(b[-1])
    q = [F.zero] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if F.is_zero(c):
            continue
        c = F.mul(c, inv_lc)
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] = F.sub(a[k - db + j], F.mul(c, b[j]))
    return strip(F, q), strip(F, a[:db])


def rem(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return ()
    return scale(F, a, F.inv(a[-1]))


def gcd(F, a, b):
    """Monic gcd; ``gcd(0, 0) == ()``."""
    while b:
        a, b = b, rem(F, a, b)
    return monic(F, a)


def xgcd(F, a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` monic."""
    r0, r1 = a, b
    s0, s1 = (F.one,), ()
    t0, t1 = (), (F.one,)
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), (), ()
    c = F.inv(r0[-1])
    return scale(F, r0, c), scale(F, s0, c), scale(F, t0, c)


def deriv(F, a):
    out = []
    for i in range(1, len(a)):
        out.append(F.mul(F.from_int(i), a[i]))
    return strip(F, out)


def mulmod(F, a, b, m):
    return rem(F, mul(F, a, b), m)


def powmod(F, a, e: int, m):
    result = rem(F, (F.one,), m)
    base = rem(F, a, m)
    while e:
        if e & 1:
            result = mulmod(F, result, base, m)
        e >>= 1
        if e:
            base = mulmod(F, base, base, m)
    return result


def evaluate(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def compose_power(F, a, k: int):
    """``a(x**k)``."""
    if not a:
        return ()
    out = [F.zero] * ((len(a) - 1) * k + 1)
    for i, c in enumerate(a):
        out[i * k] = c
    return tuple(out)
