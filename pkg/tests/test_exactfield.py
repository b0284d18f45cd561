from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from linsofic.errors import FieldError, PolynomialError
from linsofic.fields import GF, QQ, FieldElement, FpT, field_make, is_prime
from linsofic.poly import (
    Polynomial,
    ext_make,
    factor_with_hints,
    is_irreducible,
    poly_factor,
    roots_in_field,
    squarefree_decomposition,
)

X = sympy.Symbol("x")


def el(F, v):
    return FieldElement(F, F.convert(v))


def test_prime_two_has_two_elements():
    F = GF(2)
    assert len(list(F.elements())) == 2
    assert el(F, 1) + el(F, 1) == 0


def test_f4_generator_relation():
    F = GF(2, 2)
    w = FieldElement(F, F.gen)
    assert w * w == w + 1
    assert len(set(F.elements())) == 4


def test_rationals_lowest_terms():
    s = el(QQ, Fraction(1, 3)) + el(QQ, Fraction(1, 6))
    assert s == Fraction(1, 2)
    assert QQ.encode(s.value) == QQ.encode(Fraction(1, 2))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_finite_field_axioms_exhaustive(q):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k = {2: 1, 3: 1, 5: 1, 4: 2, 8: 3, 9: 2}[q]
    F = GF(p, k)
    elts = list(F.elements())
    assert len(set(elts)) == q
    for a in elts:
        assert F.add(a, F.neg(a)) == F.zero
        if not F.is_zero(a):
            assert F.mul(a, F.inv(a)) == F.one
            assert F.pow(a, q - 1) == F.one  # Lagrange on the unit group
    # distributivity on a sample
    rng = random.Random(q)
    for _ in range(50):
        a, b, c = (rng.choice(elts) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_reducible_modulus_rejected():
    with pytest.raises(FieldError):
        field_make({"kind": "ext", "base": {"kind": "prime", "p": 2}, "modulus": [1, 0, 1]})
    with pytest.raises(FieldError):
        field_make({"kind": "prime", "p": 6})


def test_descriptor_round_trip():
    for F in (GF(3), GF(2, 3), GF(3, 2), QQ, FpT(2)):
        assert field_make(F.descriptor()) == F
        x = F.random(random.Random(1))
        assert F.decode(F.encode(x)) == x


def test_rational_function_field_arithmetic():
    K = FpT(3)
    t = K.t()
    a = K.make((1, 1), (0, 1))  # (1 + t)/t
    assert K.sub(a, K.mul(K.inv(t), K.one)) == K.one
    assert K.mul(a, t) == K.make((1, 1))


# --- factorization -----------------------------------------------------------------


def test_factor_small_examples():
    F2, F3 = GF(2), GF(3)
    x2 = Polynomial.x(F2)
    assert poly_factor(Polynomial(F2, [1, 0, 1])) == [(x2 + 1, 2)]
    f = Polynomial(F2, [1, 1, 1])
    assert poly_factor(f) == [(f, 1)]
    x3 = Polynomial.x(F3)
    got = {(g.coeffs, e) for g, e in poly_factor(x3**3 - x3)}
    assert got == {(x3.coeffs, 1), ((x3 + 1).coeffs, 1), ((x3 + 2).coeffs, 1)}


def _sympy_factors_mod(coeffs, p):
    expr = sum(c * X**i for i, c in enumerate(coeffs))
    _, facs = sympy.Poly(expr, X, modulus=p).factor_list()
    out = set()
    for g, e in facs:
        cs = [int(c) % p for c in reversed(g.all_coeffs())]
        inv = pow(cs[-1], -1, p)
        out.add((tuple(c * inv % p for c in cs), e))
    return out


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([2, 3, 5, 7]), coeffs=st.lists(st.integers(0, 6), min_size=2, max_size=9))
def test_factorization_matches_sympy_mod_p(p, coeffs):
    coeffs = [c % p for c in coeffs]
    f = Polynomial(GF(p), coeffs)
    if f.degree < 1:
        return
    ours = {(g.coeffs, e) for g, e in poly_factor(f)}
    assert ours == _sympy_factors_mod(f.coeffs, p)


@settings(max_examples=40, deadline=None)
@given(coeffs=st.lists(st.integers(-6, 6), min_size=2, max_size=7))
def test_factorization_matches_sympy_over_q(coeffs):
    f = Polynomial(QQ, coeffs)
    if f.degree < 1:
        return
    ours = sorted((tuple(g.coeffs), e) for g, e in factor_with_hints(f))
    expr = sum(c * X**i for i, c in enumerate(coeffs))
    _, facs = sympy.factor_list(expr, X)
    ref = []
    for g, e in facs:
        cs = [sympy.Rational(c) for c in reversed(sympy.Poly(g, X).all_coeffs())]
        ref.append((tuple(Fraction(int(c.p), int(c.q)) / Fraction(int(cs[-1].p), int(cs[-1].q))
                          for c in cs), e))
    assert ours == sorted(ref)


@pytest.mark.parametrize("p,d", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_irreducible_count_matches_necklace_formula(p, d):
    """Monic irreducibles of degree d over F_p: (1/d) sum_{e|d} mu(e) p^(d/e)."""
    F = GF(p)
    count = sum(
        1 for tail in product(range(p), repeat=d) if is_irreducible(Polynomial(F, list(tail) + [1]))
    )
    expected = sum(sympy.mobius(e) * p ** (d // e) for e in sympy.divisors(d)) // d
    assert count == expected


def test_squarefree_decomposition_reassembles():
    F = GF(3)
    x = Polynomial.x(F)
    f = (x + 1) ** 2 * (x**2 + 1) * x**3
    acc = Polynomial.constant(F, 1)
    for g, e in squarefree_decomposition(f):
        acc = acc * g**e
    assert acc == f.monic()


def test_roots_in_field():
    x = Polynomial.x(QQ)
    assert {r for r, _ in roots_in_field(x**2 - 1)} == {el(QQ, 1), el(QQ, -1)}
    assert roots_in_field(Polynomial(GF(2), [1, 1, 1])) == []
    assert roots_in_field((x - 2) ** 2 * (x**2 + 1)) == [(el(QQ, 2), 2)]


def test_rational_root_scan_oracle():
    rng = random.Random(5)
    x = Polynomial.x(QQ)
    for _ in range(20):
        rts = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
        f = (x**2 + 3) * Polynomial.from_roots(QQ, rts)
        got = {r.value: e for r, e in roots_in_field(f)}
        want = {}
        for r in rts:
            want[r] = want.get(r, 0) + 1
        assert got == want


def test_fpt_needs_hints_for_nonlinear_factors():
    K = FpT(2)
    f = Polynomial(K, [K.neg(K.t()), K.zero, K.one])  # x^2 - t
    with pytest.raises(PolynomialError):
        factor_with_hints(f * f)
    assert factor_with_hints(f * f, [f]) == [(f, 2)]


# --- extensions ---------------------------------------------------------------


def test_ext_make_examples():
    F2 = GF(2)
    e = ext_make(F2, Polynomial(F2, [1, 1, 1]))
    assert e.separable and e.field.order == 4
    root = e.root_element()
    assert root * root + root + 1 == 0

    K = FpT(2)
    ins = ext_make(K, Polynomial(K, [K.neg(K.t()), K.zero, K.one]))
    assert not ins.separable and ins.inseparability_degree == 2 and ins.distinct_roots == 1

    lin = ext_make(QQ, Polynomial(QQ, [-5, 1]))
    assert lin.field == QQ and lin.root == 5


def test_ext_make_rejects_reducible():
    F2 = GF(2)
    with pytest.raises(PolynomialError):
        ext_make(F2, Polynomial(F2, [1, 0, 1]))


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
