from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linsofic.almosthom import (
    AlmostHom,
    FiniteGroup,
    GroupWindow,
    adapt_inverses,
    defect,
    hom_from_exact_rep,
    inverse_partition,
    min_separation,
    normalize_identity,
    perturb,
    regular_rep,
    separation,
    window_from_finite_group,
)
from linsofic.errors import GroupError, PreconditionError
from linsofic.fields import GF, QQ
from linsofic.matrix import Matrix, Permutation, perm_matrix
from linsofic.randgen import SMALL_GROUPS, permutation_rep, small_group, two_dim_rep


def _brute_defect(phi: AlmostHom) -> Fraction:
    """max rank(phi_g phi_h - phi_gh)/n over all pairs with gh in the window."""
    w, n = phi.window, phi.dim
    worst = Fraction(0)
    for g in w.elements:
        for h in w.elements:
            gh = w.product(g, h)
            if gh is None:
                continue
            worst = max(worst, Fraction((phi[g] @ phi[h] - phi[gh]).rank(), n))
    return worst


# --- groups and windows --------------------------------------------------------------


def test_c2_window():
    w = window_from_finite_group(FiniteGroup.cyclic(2))
    (g,) = list(w.non_identity())
    assert w.order2(g) and w.product(g, g) == w.identity


def test_group_table_validation():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])  # not a Latin square
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1, 2], [1, 0, 2], [2, 2, 0]])


@pytest.mark.parametrize("name", SMALL_GROUPS)
def test_group_json_round_trip(name):
    G = small_group(name)
    H = FiniteGroup.from_json(G.to_json())
    assert H.order == G.order
    assert all(H.mul(a, b) == G.mul(a, b) for a in G.elements for b in G.elements)
    w = window_from_finite_group(G)
    assert GroupWindow.from_json(w.to_json()).to_json() == w.to_json()


def test_symmetric_group_table_matches_composition():
    G = FiniteGroup.symmetric(3)
    perms = {g: Permutation(tuple(int(c) - 1 for c in G.name(g))) for g in G.elements if g != G.identity}
    perms[G.identity] = Permutation.identity(3)
    for a in G.elements:
        for b in G.elements:
            assert perm_matrix(perms[G.mul(a, b)], QQ) == perm_matrix(perms[a], QQ) @ perm_matrix(
                perms[b], QQ
            )


def test_relation_violation_is_rejected():
    F = QQ
    swap = Matrix(F, [[0, 1], [1, 0]])
    with pytest.raises(GroupError):
        hom_from_exact_rep(FiniteGroup.cyclic(3), {"a": swap})


# --- defect -----------------------------------------------------------------------


@pytest.mark.parametrize("F", [GF(2), GF(3), QQ], ids=str)
def test_exact_reps_have_zero_defect(F):
    assert defect(permutation_rep("S3", F)) == 0
    for name in ("C3", "C4", "S3"):
        assert defect(two_dim_rep(name, F)) == 0


def test_trivial_window_defect():
    phi = regular_rep(FiniteGroup.cyclic(1), QQ)
    assert defect(phi) == 0 and min_separation(phi) is None


@pytest.mark.parametrize("n", [3, 4, 5])
def test_rank_one_twist_defect(n):
    """Triples that use the twisted image once differ by rank 1; the square
    of the twisted element uses it twice and can reach rank 2."""
    G = FiniteGroup.cyclic(n)
    phi = regular_rep(G, QQ)
    z = G.index("a")
    tw = Matrix.diag(QQ, [2] + [1] * (n - 1))
    images = dict(phi.images)
    images[z] = phi[z] @ tw
    bent = phi.replace(images)
    w = bent.window
    for g in w.elements:
        for h in w.elements:
            uses = (g == z) + (h == z) + (w.product(g, h) == z)
            v = bent.triple_length(g, h)
            if uses == 0:
                assert v == 0
            elif uses == 1:
                assert v == Fraction(1, n)
    assert bent.triple_length(z, z) == Fraction(2, n)
    assert defect(bent) == Fraction(2, n) == _brute_defect(bent)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), name=st.sampled_from(["C3", "C4", "S3", "C2xC2"]),
       q=st.sampled_from([2, 3, 5]))
def test_defect_matches_brute_force(seed, name, q):
    rng = random.Random(seed)
    phi = permutation_rep(name, GF(q))
    g = rng.choice(list(phi.window.elements))
    bent = perturb(phi, g, rng, rank=rng.randint(1, 2))
    assert defect(bent) == _brute_defect(bent)


def test_conjugation_preserves_quality():
    rng = random.Random(3)
    phi = perturb(permutation_rep("C4", GF(5)), 1, rng)
    T = Matrix.random_invertible(GF(5), phi.dim, rng)
    psi = phi.conjugate(T)
    assert defect(psi) == defect(phi)
    assert separation(psi, with_defect=False).separation == separation(phi, False).separation


# --- separation ----------------------------------------------------------------------


def test_separation_examples():
    phi = regular_rep(FiniteGroup.cyclic(3), QQ)
    assert set(separation(phi).separation.values()) == {Fraction(2, 3)}
    c2 = hom_from_exact_rep(FiniteGroup.cyclic(2), {"a": Matrix.diag(QQ, [-1, 1])})
    assert min_separation(c2) == Fraction(1, 2)
    G = FiniteGroup.cyclic(2)
    trivial = AlmostHom(window_from_finite_group(G), {g: Matrix.identity(QQ, 2) for g in G.elements})
    assert min_separation(trivial) == 0


# --- repairs ------------------------------------------------------------------------


def test_normalize_identity_examples():
    phi = permutation_rep("S3", QQ)
    assert normalize_identity(phi, Fraction(1, 4)) is phi
    rng = random.Random(4)
    e = phi.window.identity
    bent = perturb(phi, e, rng)
    d = defect(bent)
    out = normalize_identity(bent, 2 * d)
    assert out[e].is_identity()
    assert defect(out) == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), name=st.sampled_from(["C3", "C4", "S3"]),
       q=st.sampled_from([3, 5]))
def test_normalize_identity_doubling_contract(seed, name, q):
    rng = random.Random(seed)
    phi = permutation_rep(name, GF(q))
    e = phi.window.identity
    bent = perturb(perturb(phi, e, rng), rng.choice(list(phi.window.elements)), rng)
    d = defect(bent)
    eps = 2 * d if d else Fraction(1, phi.dim)
    if bent.length(bent[e]) > d:
        return
    assert defect(normalize_identity(bent, eps)) <= eps


def test_adapt_inverses_c4():
    G = FiniteGroup.cyclic(4)
    phi = two_dim_rep("C4", GF(5))
    w = phi.window
    g3 = G.index("a3")
    bent = perturb(phi, g3, random.Random(5))
    eps = 2 * defect(bent)
    out = adapt_inverses(bent, eps)
    one = Matrix.identity(GF(5), 2)
    for g in w.elements:
        if not w.order2(g):
            assert out[g] @ out[w.inverse(g)] == one
    assert defect(out) <= eps


def test_adapt_inverses_exact_input_unchanged():
    phi = permutation_rep("C3", QQ)
    out = adapt_inverses(phi, Fraction(1, 10))
    assert all(out[g] == phi[g] for g in phi.window.elements)


def test_all_involutions_partition():
    w = window_from_finite_group(small_group("C2xC2"))
    part = inverse_partition(w)
    assert part.F1 == part.Fm1 == ()
    assert set(part.F0) == set(w.elements)


def test_adapt_inverses_needs_normalized_input():
    phi = permutation_rep("C3", QQ)
    bent = perturb(phi, phi.window.identity, random.Random(1))
    with pytest.raises(PreconditionError):
        adapt_inverses(bent, Fraction(1, 2))
