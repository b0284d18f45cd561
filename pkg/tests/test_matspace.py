from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.matrices import DomainMatrix

from linsofic import _modp
from linsofic.errors import ShapeError, SingularMatrixError
from linsofic.fields import GF, QQ, FieldElement, FpT
from linsofic.matrix import (
    Matrix,
    Permutation,
    charpoly,
    direct_sum,
    kron,
    mat_det,
    mat_inv,
    mat_rank,
    mat_transpose,
    perm_matrix,
    restrict_scalars,
    specialize_matrix,
)
from linsofic.poly import Polynomial


def _dm(rows, p=None):
    """sympy DomainMatrix over GF(p) or QQ, used as an independent oracle."""
    n, m = len(rows), len(rows[0])
    if p is None:
        dom = sympy.QQ
        data = [[dom(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in r]
                for r in rows]
    else:
        dom = sympy.GF(p)
        data = [[dom(int(x)) for x in r] for r in rows]
    return DomainMatrix(data, (n, m), dom)


int_matrices = st.integers(1, 20).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=1,
                       max_size=20)
)


# --- examples -------------------------------------------------------------------


def test_inverse_of_identity_and_det_example():
    F3 = GF(3)
    I3 = Matrix.identity(QQ, 3)
    assert mat_inv(I3) == I3
    assert mat_det(Matrix(F3, [[1, 2], [2, 2]])) == 1


def test_transpose_is_an_involution():
    rng = random.Random(0)
    for F in (GF(2), GF(3, 2), QQ):
        A = Matrix.random(F, 3, 5, rng)
        assert mat_transpose(mat_transpose(A)) == A


def test_rank_examples():
    assert mat_rank(Matrix.identity(GF(5), 4)) == (4, 0)
    Z = Matrix.zeros(QQ, 3)
    assert mat_rank(Z) == (0, 3)
    B = Matrix(GF(2), [[1, 1], [1, 1]])
    assert B.rank() == 1 and B.kernel_dim() == 1


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        Matrix(GF(2), [[1, 1], [1, 1]]).inverse()
    with pytest.raises(ShapeError):
        Matrix(QQ, [[1, 2]]) @ Matrix(QQ, [[1, 2]])


def test_kron_and_direct_sum_examples():
    assert kron(Matrix.identity(GF(3), 2), Matrix.identity(GF(3), 3)) == Matrix.identity(GF(3), 6)
    A = Matrix.jordan_block(QQ, 1, 3)
    B = Matrix.diag(QQ, [1, 2, 2])
    lhs = direct_sum(A, B).scalar_minus(1).rank()
    assert lhs == A.scalar_minus(1).rank() + B.scalar_minus(1).rank() == 2 + 2
    J = Matrix.jordan_block(QQ, 1, 2)
    assert kron(J, J).scalar_minus(1).kernel_dim() == 2


def test_perm_matrix_examples():
    assert perm_matrix(Permutation.identity(4), QQ) == Matrix.identity(QQ, 4)
    for n in (2, 5, 7):
        cyc = Permutation(tuple((i + 1) % n for i in range(n)))
        assert perm_matrix(cyc, QQ).scalar_minus(1).rank() == n - 1


def test_perm_matrix_is_a_homomorphism():
    rng = random.Random(1)
    for _ in range(100):
        s, t = Permutation.random(6, rng), Permutation.random(6, rng)
        assert perm_matrix(s * t, GF(2)) == perm_matrix(s, GF(2)) @ perm_matrix(t, GF(2))


def test_charpoly_examples():
    F2 = GF(2)
    x = Polynomial.x(QQ)
    assert charpoly(Matrix.identity(QQ, 2)) == (x - 1) ** 2
    f = Polynomial(GF(5), [3, 0, 1, 4, 1])
    assert charpoly(Matrix.companion(f)) == f
    assert charpoly(Matrix(F2, [[0, 1], [1, 1]])) == Polynomial(F2, [1, 1, 1])


# --- oracle comparisons -------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(p=st.sampled_from([2, 3, 5, 7]), rows=int_matrices)
def test_rank_matches_sympy_mod_p(p, rows):
    A = Matrix(GF(p), rows)
    assert A.rank() == _dm([[x % p for x in r] for r in rows], p).rank()


@settings(max_examples=40, deadline=None)
@given(rows=int_matrices)
def test_rank_matches_sympy_over_q(rows):
    rows = [[Fraction(x - 2, 1 + (i + j) % 3) for j, x in enumerate(r)] for i, r in enumerate(rows)]
    assert Matrix(QQ, rows).rank() == _dm(rows).rank()


@pytest.mark.parametrize("p", [2, 5, 7])
@pytest.mark.parametrize("n", [3, 17, 30])
def test_det_and_charpoly_match_sympy(p, n):
    rng = random.Random(n * p)
    rows = [[rng.choice([0, 0, 1, 2, 3]) % p for _ in range(n)] for _ in range(n)]
    A = Matrix(GF(p), rows)
    ref = _dm(rows, p)
    assert int(A.det().value) == int(ref.det()) % p
    cp = [int(c) % p for c in reversed(ref.charpoly())]
    assert list(charpoly(A).coeffs) == [c for c in cp]
    arr = np.array(rows, dtype=np.int64)
    assert list(_modp.charpoly(arr, p)) == cp


def test_rational_det_matches_sympy():
    rng = random.Random(3)
    for n in (2, 5, 12):
        rows = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
        ref = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
        d = ref.det()
        assert Matrix(QQ, rows).det().value == Fraction(int(d.p), int(d.q))


@pytest.mark.parametrize("F", [GF(2), GF(3), GF(2, 2), GF(3, 2), QQ], ids=str)
def test_inverse_round_trip(F):
    rng = random.Random(2)
    for n in (1, 4, 18):
        A = Matrix.random_invertible(F, n, rng)
        assert A @ A.inverse() == Matrix.identity(F, n)


@pytest.mark.parametrize("F", [GF(2), GF(5), QQ], ids=str)
def test_kron_rank_is_multiplicative(F):
    rng = random.Random(4)
    for _ in range(30):
        A = Matrix.random(F, rng.randint(1, 4), rng.randint(1, 4), rng)
        B = Matrix.random(F, rng.randint(1, 4), rng.randint(1, 4), rng)
        assert kron(A, B).rank() == A.rank() * B.rank()


def test_kron_kernel_lower_bound():
    rng = random.Random(5)
    for _ in range(50):
        F = rng.choice([GF(2), GF(3), QQ])
        A = Matrix.diag(F, [rng.choice([1, 1, 2]) for _ in range(3)])
        B = Matrix.jordan_block(F, 1, rng.randint(1, 3))
        k = kron(A, B).scalar_minus(1).kernel_dim()
        assert k >= A.scalar_minus(1).kernel_dim() * B.scalar_minus(1).kernel_dim()


# --- restriction of scalars -------------------------------------------------------


def test_restrict_identity_and_generator():
    F4 = GF(2, 2)
    I1 = Matrix.identity(F4, 1)
    R = restrict_scalars(I1)
    assert R == Matrix.identity(GF(2), 2)
    assert R.scalar_minus(1).kernel_dim() == 2
    w = Matrix(F4, [[F4.gen]])
    Rw = restrict_scalars(w)
    assert charpoly(Rw) == Polynomial(GF(2), F4.modulus)
    assert Rw.scalar_minus(1).kernel_dim() == 0


def test_restrict_is_multiplicative_over_f9():
    F9 = GF(3, 2)
    rng = random.Random(6)
    for _ in range(100):
        A, B = Matrix.random(F9, 3, 3, rng), Matrix.random(F9, 3, 3, rng)
        assert restrict_scalars(A @ B) == restrict_scalars(A) @ restrict_scalars(B)


@pytest.mark.parametrize("L", [GF(2, 2), GF(2, 3), GF(3, 2)], ids=str)
def test_restrict_scales_kernel_dimension(L):
    rng = random.Random(7)
    for _ in range(30):
        A = Matrix.random_invertible(L, rng.randint(1, 4), rng)
        d = L.degree
        assert restrict_scalars(A).scalar_minus(1).kernel_dim() == d * A.scalar_minus(1).kernel_dim()


# --- specialization ---------------------------------------------------------------


def test_specialize_avoids_listed_zeros():
    K = FpT(2)
    F2 = GF(2)
    A = Matrix(K, [[K.t(), K.zero], [K.zero, K.one]])
    avoid = [Polynomial(F2, [0, 1]), Polynomial(F2, [1, 1])]
    S, c = specialize_matrix(A, avoid)
    assert c.field.order == 4
    assert not c.is_zero() and c != 1
    assert S.scalar_minus(1).rank() == 1 == A.scalar_minus(1).rank()


def test_specialize_constant_matrix_is_unchanged():
    K = FpT(3)
    A = Matrix(K, [[K.one, K.from_int(2)], [K.zero, K.one]])
    S, c = specialize_matrix(A)
    assert c.field == GF(3) and c == 0
    assert S == Matrix(GF(3), [[1, 2], [0, 1]])


def test_specialize_escalates_degree_when_field_is_exhausted():
    K = FpT(2)
    F2 = GF(2)
    A = Matrix(K, [[K.t()]])
    # t(t + 1) vanishes on all of F_2, so a point of F_4 is needed
    S, c = specialize_matrix(A, [Polynomial(F2, [0, 1, 1])])
    assert c.field.order == 4
    assert S.rows[0][0] == c.value


def test_field_element_wrapper_equality():
    F = GF(5)
    assert FieldElement(F, 3) == 8
