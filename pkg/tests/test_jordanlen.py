from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from linsofic.errors import SingularMatrixError
from linsofic.fields import GF, QQ, FpT
from linsofic.jordanlen import (
    blocks_from_kernel_dims,
    eigenvalues,
    f_iterate,
    f_map,
    f_schedule,
    iota,
    iota_report,
    jordan_type,
    kernel_dims,
    len_hamming,
    len_jordan,
    len_rank,
)
from linsofic.matrix import Matrix, Permutation, direct_sum, kron, perm_matrix
from linsofic.poly import Polynomial
from linsofic.randgen import block_diag, random_conjugator, random_gl

F2, F3, F5 = GF(2), GF(3), GF(5)


def _brute_ell_j(A: Matrix) -> Fraction:
    """min over every unit alpha of rank(alpha - A)/n (definition, finite fields)."""
    n = A.nrows
    return min(Fraction(A.scalar_minus(a).rank(), n) for a in A.field.units())


# --- lengths: worked examples ---------------------------------------------------------


def test_rank_length_examples():
    assert len_rank(Matrix.identity(F2, 3)) == 0
    A = direct_sum(Matrix.jordan_block(QQ, 1, 2), Matrix.identity(QQ, 2))
    assert len_rank(A) == Fraction(1, 4)
    assert len_rank(Matrix.scalar(F5, 3, 2)) == 1


def test_rank_length_rejects_singular():
    with pytest.raises(SingularMatrixError):
        len_rank(Matrix(F2, [[1, 1], [1, 1]]))


def test_jordan_length_examples():
    ell, alpha = len_jordan(Matrix.identity(QQ, 3))
    assert ell == 0 and alpha == 1
    ell, alpha = len_jordan(Matrix.diag(F3, [1, 2]))
    assert ell == Fraction(1, 2)
    assert len_rank(Matrix.diag(F3, [1, 2])) == Fraction(1, 2)
    C = Matrix.companion(Polynomial(F2, [1, 1, 1]))
    assert len_jordan(C)[0] == 1 and len_jordan(C)[1] is None
    assert C.scalar_minus(1).rank() == 2


def test_hamming_length_examples():
    assert len_hamming(Permutation.identity(5)) == 0
    assert len_hamming(Permutation((1, 0, 2, 3, 4))) == Fraction(2, 5)
    cyc = Permutation((1, 2, 3, 4, 0))
    assert len_hamming(cyc) == 1
    assert len_rank(perm_matrix(cyc, QQ)) == Fraction(4, 5)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), q=st.sampled_from([2, 3, 4, 5, 7]), n=st.integers(1, 6))
def test_jordan_length_matches_definition(seed, q, n):
    F = GF(2, 2) if q == 4 else GF(q)
    A = random_gl(F, n, random.Random(seed))
    assert len_jordan(A)[0] == _brute_ell_j(A)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), q=st.sampled_from([2, 3, 5]), n=st.integers(1, 6))
def test_length_invariance_under_conjugation(seed, q, n):
    rng = random.Random(seed)
    F = GF(q)
    A = random_gl(F, n, rng)
    T = random_conjugator(F, n, rng)
    B = T @ A @ T.inverse()
    assert len_rank(A) == len_rank(B)
    assert len_jordan(A)[0] == len_jordan(B)[0]
    assert iota(A)[0] == iota(B)[0]


def test_large_rational_eigenvalues():
    """Above the charpoly cutoff, eigenvalues come from a modular screen."""
    rng = random.Random(11)
    vals = [1, -1, 2, Fraction(1, 2), 3, -2]
    blocks = [Matrix.jordan_block(QQ, vals[i % 6], 1 + i % 3) for i in range(24)]
    D = block_diag(blocks)
    n = D.nrows
    assert n > 40
    T = random_conjugator(QQ, n, rng)
    A = T @ D @ T.inverse()
    assert sorted(eigenvalues(A)) == sorted(set(Fraction(v) for v in vals))


# --- Jordan types -------------------------------------------------------------


def _blocks_at(jt, factor):
    return sorted(jt.component(factor).blocks, reverse=True)


def test_jordan_type_examples():
    x = Polynomial.x(QQ)
    jt = jordan_type(Matrix.identity(QQ, 3))
    assert len(jt.components) == 1 and _blocks_at(jt, x - 1) == [1, 1, 1]
    J = Matrix.jordan_block(QQ, 1, 2)
    jt = jordan_type(kron(J, J))
    assert _blocks_at(jt, x - 1) == [3, 1]
    assert jt.block_count() == 2


@pytest.mark.parametrize("p", [2, 3])
def test_inseparable_companion_single_block(p):
    K = FpT(p)
    f = Polynomial(K, [K.neg(K.t())] + [K.zero] * (p - 1) + [K.one])  # x^p - t
    jt = jordan_type(Matrix.companion(f), hints=[f])
    (comp,) = jt.components
    assert not comp.separable and comp.inseparability_degree == p
    assert comp.blocks == (p,)


@pytest.mark.parametrize("p", [2, 3])
def test_inseparable_square_gives_block_2p(p):
    """Companion of (x^p - t)^2: one block of size 2p, a multiple of p but not a power."""
    K = FpT(p)
    f = Polynomial(K, [K.neg(K.t())] + [K.zero] * (p - 1) + [K.one])
    jt = jordan_type(Matrix.companion(f * f), hints=[f])
    (comp,) = jt.components
    assert comp.blocks == (2 * p,)
    assert jt.inseparable_violations() == []


def _constructed(F, layout, rng):
    """Conjugate of a block diagonal with known blocks; returns the matrix and
    the expected {eigenvalue: sorted block sizes}."""
    blocks = [Matrix.jordan_block(F, a, s) for a, s in layout]
    D = block_diag(blocks)
    T = random_conjugator(F, D.nrows, rng)
    want = {}
    for a, s in layout:
        want.setdefault(F.convert(a), []).append(s)
    return T @ D @ T.inverse(), {a: sorted(v) for a, v in want.items()}


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), fname=st.sampled_from(["F3", "F5", "Q"]),
       layout=st.lists(st.tuples(st.sampled_from([1, 2, -1]), st.integers(1, 3)), min_size=1,
                     max_size=4))
def test_jordan_type_recovers_constructed_blocks(seed, fname, layout):
    F = {"F3": F3, "F5": F5, "Q": QQ}[fname]
    A, want = _constructed(F, layout, random.Random(seed))
    jt = jordan_type(A)
    got = {}
    for c in jt.components:
        if c.factor.degree == 1:
            got[F.neg(c.factor.coeffs[0])] = sorted(c.blocks)
    assert got == want


@settings(max_examples=100, deadline=None)
@given(parts=st.lists(st.integers(1, 6), min_size=1, max_size=6))
def test_blocks_from_kernel_dims_round_trip(parts):
    F = QQ
    A = block_diag([Matrix.jordan_block(F, 1, s) for s in parts])
    assert blocks_from_kernel_dims(kernel_dims(A, F.one)) == tuple(sorted(parts, reverse=True))


@pytest.mark.parametrize("s,t", [(1, 1), (1, 4), (2, 3), (3, 5), (5, 5)])
def test_tensor_of_jordan_blocks_has_s_blocks(s, t):
    for F, a, b in ((F5, 2, 3), (QQ, -1, 2), (F2, 1, 1)):
        jt = jordan_type(kron(Matrix.jordan_block(F, a, s), Matrix.jordan_block(F, b, t)))
        assert jt.block_count() == s


# --- iota --------------------------------------------------------------------------


def test_iota_report_examples():
    rep = iota_report(Matrix.identity(F5, 4))
    assert (rep.iota1, rep.iota, rep.kappa, rep.ell_r, rep.ell_J) == (1, 1, 1, 0, 0)
    D = Matrix.diag(F3, [1, 2])
    rep = iota_report(D)
    assert (rep.iota1, rep.iota, rep.ell_J) == (Fraction(1, 2),) * 3
    DD = kron(D, D)
    assert DD == Matrix.diag(F3, [1, 2, 2, 1])
    assert iota(DD)[0] <= Fraction(1, 2)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), fname=st.sampled_from(["F2", "F3", "F5", "Q"]),
       n=st.integers(1, 6))
def test_iota_chains(seed, fname, n):
    F = {"F2": F2, "F3": F3, "F5": F5, "Q": QQ}[fname]
    rep = iota_report(random_gl(F, n, random.Random(seed)))
    assert rep.check_invariants() == []


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), q=st.sampled_from([2, 3, 5]))
def test_iota_of_tensor_product(seed, q):
    rng = random.Random(seed)
    A, B = random_gl(GF(q), rng.randint(1, 4), rng), random_gl(GF(q), rng.randint(1, 4), rng)
    ia, ib = iota(A)[0], iota(B)[0]
    iab = iota(kron(A, B))[0]
    assert iab <= ia * ib + (1 - ia) * (1 - ib)
    if ia <= Fraction(1, 2) and ib <= Fraction(1, 2):
        assert iab <= Fraction(1, 2)


fracs = st.fractions(min_value=0, max_value=10, max_denominator=50)


@given(x=fracs, y=fracs, dx=fracs, dy=fracs)
def test_scalar_inequality(x, y, dx, dy):
    xp, yp = x + dx, y + dy
    assert xp * y + yp * x <= xp * yp + x * y


# --- schedule -----------------------------------------------------------------------


def test_f_map_examples():
    assert f_map(Fraction(3, 4)) == Fraction(5, 8)
    assert f_map(Fraction(1, 2)) == Fraction(1, 2)
    assert f_schedule(Fraction(1, 2), Fraction(1, 1000)) == 0


def test_schedule_by_plain_iteration():
    delta, eps = Fraction(1, 4), Fraction(1, 100)
    m, x = 0, 1 - delta
    while x > Fraction(1, 2) + 2 * eps:
        x, m = f_map(x), m + 1
    assert f_schedule(delta, eps) == m == 3


@settings(max_examples=200)
@given(x=st.fractions(min_value=Fraction(1, 2), max_value=1, max_denominator=10**4),
       y=st.fractions(min_value=Fraction(1, 2), max_value=1, max_denominator=10**4))
def test_f_is_monotone_on_upper_half(x, y):
    assume(x <= y)
    assert f_map(x) <= f_map(y)
    assert Fraction(1, 2) <= f_map(x) <= x


@settings(max_examples=100)
@given(delta=st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=200),
       eps=st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1, 4), max_denominator=1000))
def test_schedule_is_minimal(delta, eps):
    m = f_schedule(delta, eps)
    target = Fraction(1, 2) + 2 * eps
    assert f_iterate(1 - delta, m) <= target
    if m:
        assert f_iterate(1 - delta, m - 1) > target


def test_kernel_counts_match_block_multiset():
    layout = [(2, 3), (2, 1), (2, 1), (1, 2)]
    A = block_diag([Matrix.jordan_block(F5, a, s) for a, s in layout])
    assert Counter(blocks_from_kernel_dims(kernel_dims(A, 2))) == Counter({3: 1, 1: 2})
