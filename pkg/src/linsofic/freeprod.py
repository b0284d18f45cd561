"""Free products of two finite groups and the almost homomorphism on
``K^Omega (x) (K^n (+) K^m)`` built from a verified separating quotient.

A reduced word is a tuple of syllables ``(i, x)``: ``i`` in {0, 1} names the
factor and ``x`` is a non-identity element of it; consecutive syllables come
from different factors.  The empty tuple is the identity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .almosthom import AlmostHom, FiniteGroup, GroupWindow
from .amplify import DEFAULT_DIM_CAP
from .errors import (
    BoundViolation,
    DimensionCapError,
    FieldError,
    GroupError,
    PreconditionError,
    QuotientSearchError,
    ShapeError,
)
from .jordanlen import len_jordan, len_rank_quotient
from .matrix import Matrix, Permutation, direct_sum

Word = tuple


class FreeProduct:
    """``G1 * G2`` for finite groups given by tables."""

    def __init__(self, G1: FiniteGroup, G2: FiniteGroup, labels: Sequence[str] = ("x", "y")):
        self.factors = (G1, G2)
        self.labels = tuple(labels)
        self.identity: Word = ()

    def validate(self, w: Word) -> Word:
        w = tuple(tuple(s) for s in w)
        for k, (i, x) in enumerate(w):
            if i not in (0, 1):
                raise GroupError(f"syllable {k} names factor {i}")
            G = self.factors[i]
            if not 0 <= x < G.order or x == G.identity:
                raise GroupError(f"syllable {k} is not a non-identity element of factor {i}")
            if k and w[k - 1][0] == i:
                raise GroupError(f"syllables {k - 1} and {k} come from the same factor")
        return w

    def syllable(self, i: int, x: int) -> Word:
        return () if x == self.factors[i].identity else ((i, x),)

    def mul(self, u: Word, v: Word) -> Word:
        out = list(u)
        for i, x in v:
            if out and out[-1][0] == i:
                y = self.factors[i].mul(out.pop()[1], x)
                if y != self.factors[i].identity:
                    out.append((i, y))
            else:
                out.append((i, x))
        return tuple(out)

    def inv(self, u: Word) -> Word:
        return tuple((i, self.factors[i].inv(x)) for i, x in reversed(u))

    @staticmethod
    def length(u: Word) -> int:
        return len(u)

    def retraction(self, u: Word) -> tuple[int, int]:
        """Images in ``G1`` and ``G2`` (products of the syllables of each factor)."""
        a = [x for i, x in u if i == 0]
        b = [x for i, x in u if i == 1]
        return self.factors[0].prod(a), self.factors[1].prod(b)

    def name(self, u: Word) -> str:
        if not u:
            return "1"
        return " ".join(f"{self.labels[i]}{self.factors[i].name(x)}" for i, x in u)

    def parse(self, text: str) -> Word:
        text = text.strip()
        if text in ("", "1"):
            return ()
        out = []
        for tok in text.split():
            for i, lab in enumerate(self.labels):
                if tok.startswith(lab):
                    out.append((i, self.factors[i].index(tok[len(lab):])))
                    break
            else:
                raise GroupError(f"cannot parse syllable {tok!r}")
        return self.validate(tuple(out))

    def words(self, max_length: int) -> list[Word]:
        """All reduced words of syllable length at most ``max_length``, by length."""
        out = [()]
        layer = [()]
        for _ in range(max_length):
            nxt = []
            for w in layer:
                for i in (0, 1):
                    if w and w[-1][0] == i:
                        continue
                    G = self.factors[i]
                    for x in G.elements:
                        if x != G.identity:
                            nxt.append(w + ((i, x),))
            out += nxt
            layer = nxt
        return out

    def window(self, r: int) -> GroupWindow:
        return GroupWindow.from_oracle(self.words(r), (), self.mul, self.inv, self.name)


# ---------------------------------------------------------------------------
# separating quotients


@dataclass
class SeparatingQuotient:
    """Homomorphisms ``G_i -> Sym(N)`` under which every nontrivial reduced word
    of length at most ``L`` moves a point and fixes at most ``theta * N``."""

    fp: FreeProduct
    N: int
    images: tuple  # (dict G1 -> Permutation, dict G2 -> Permutation)
    L: int
    theta: Fraction
    theta_achieved: Fraction
    fixed_points: dict = field(repr=False)
    seed: int = 0
    attempts: int = 1

    def image(self, w: Word) -> Permutation:
        p = Permutation.identity(self.N)
        for i, x in w:
            p = p * self.images[i][x]
        return p

    def to_json(self) -> dict:
        fp = self.fp
        return {
            "N": self.N,
            "L": self.L,
            "theta": {"num": self.theta.numerator, "den": self.theta.denominator},
            "theta_achieved": {
                "num": self.theta_achieved.numerator,
                "den": self.theta_achieved.denominator,
            },
            "seed": self.seed,
            "attempts": self.attempts,
            "words_checked": len(self.fixed_points),
            "homomorphisms_checked": True,
            "generators": [
                {fp.factors[i].name(x): list(p.images) for x, p in self.images[i].items()}
                for i in (0, 1)
            ],
            "fixed_points": {fp.name(w): f for w, f in self.fixed_points.items()},
        }


def _replicated_regular(G: FiniteGroup, N: int, conj: Permutation) -> dict:
    """``g -> conj o (regular rep of G on N/|G| copies) o conj^-1``."""
    k = G.order
    cinv = conj.inverse()
    out = {}
    for g in G.elements:
        base = [0] * N
        for blk in range(N // k):
            off = blk * k
            for x in G.elements:
                base[off + x] = off + G.mul(g, x)
        out[g] = conj * Permutation(tuple(base)) * cinv
    return out


def _check_hom(G: FiniteGroup, imgs: dict):
    for g in G.elements:
        for h in G.elements:
            if imgs[g] * imgs[h] != imgs[G.mul(g, h)]:
                raise BoundViolation("permutation image is not a homomorphism")


def _verify_words(fp: FreeProduct, imgs, N: int, L: int, theta: Fraction):
    """DFS over reduced words; returns ``(fixed-point map, None)`` or ``(None, word)``."""
    fixed = {}
    stack = [((), Permutation.identity(N))]
    while stack:
        w, p = stack.pop()
        if w:
            f = p.fixed_points()
            if f == N or Fraction(f, N) > theta:
                return None, w
            fixed[w] = f
        if len(w) == L:
            continue
        for i in (1, 0):
            if w and w[-1][0] == i:
                continue
            G = fp.factors[i]
            for x in reversed(G.elements):
                if x != G.identity:
                    stack.append((w + ((i, x),), p * imgs[i][x]))
    return dict(sorted(fixed.items(), key=lambda kv: (len(kv[0]), kv[0]))), None


def build_separating_quotient(
    G1: FiniteGroup,
    G2: FiniteGroup,
    L: int,
    theta,
    seed: int = 0,
    N0: int | None = None,
    max_N: int = 4096,
    trials_per_size: int = 2,
) -> SeparatingQuotient:
    """Random conjugates of replicated regular representations, verified on
    every nontrivial reduced word of length at most ``L``; ``N`` doubles on failure."""
    theta = Fraction(theta)
    if G1.order < 2 or G2.order < 2:
        raise PreconditionError("both factors need at least two elements")
    if L < 1:
        raise PreconditionError("L must be at least 1")
    if not (0 <= theta < 1):
        raise PreconditionError("theta must lie in [0, 1)")
    fp = FreeProduct(G1, G2)
    rng = random.Random(seed)
    N = N0 or G1.order * G2.order
    if N % lcm(G1.order, G2.order):
        raise PreconditionError("N must be a multiple of both group orders")
    attempts = 0
    failing = None
    while N <= max_N:
        for _ in range(trials_per_size):
            attempts += 1
            imgs = (
                _replicated_regular(G1, N, Permutation.random(N, rng)),
                _replicated_regular(G2, N, Permutation.random(N, rng)),
            )
            _check_hom(G1, imgs[0])
            _check_hom(G2, imgs[1])
            fixed, failing = _verify_words(fp, imgs, N, L, theta)
            if fixed is not None:
                worst = max((Fraction(f, N) for f in fixed.values()), default=Fraction(0))
                return SeparatingQuotient(fp, N, imgs, L, theta, worst, fixed, seed, attempts)
        N *= 2
    raise QuotientSearchError(
        f"no separating quotient with N <= {max_N}; last failing word {fp.name(failing)}",
        failing_word=failing,
    )


# ---------------------------------------------------------------------------
# the zeta construction


def translation_rank_bound(pi: Permutation, blocks: Sequence[Matrix]) -> tuple[int, Fraction]:
    """Rank of ``1 - (P_pi (x) 1_m) A`` for ``A = diag(A_1..A_n)`` and the bound ``(n - f) m / 2``."""
    n = pi.n
    if len(blocks) != n:
        raise ShapeError(f"need {n} blocks, got {len(blocks)}")
    F = blocks[0].field
    m = blocks[0].nrows
    if any(B.shape != (m, m) or B.field != F for B in blocks):
        raise ShapeError("blocks must be m x m over one field")
    M = translation_matrix(pi, blocks)
    rank = M.scalar_minus(F.one).rank()
    bound = Fraction((n - pi.fixed_points()) * m, 2)
    if rank < bound:
        raise BoundViolation("translation rank bound fails", rank=rank, bound=bound)
    return rank, bound


def translation_matrix(pi: Permutation, blocks: Sequence[Matrix]) -> Matrix:
    """Matrix of ``e_x (x) e_j -> e_{pi(x)} (x) A_x e_j``."""
    F = blocks[0].field
    m = blocks[0].nrows
    n = pi.n
    rows = [[F.zero] * (n * m) for _ in range(n * m)]
    for x in range(n):
        y = pi(x)
        B = blocks[x].rows
        for j in range(m):
            row = rows[y * m + j]
            row[x * m:(x + 1) * m] = B[j]
    return Matrix._raw(F, rows)


def _doubled(phi: AlmostHom) -> dict:
    """``g -> diag(phi_g, phi_g)`` or, for involutions, ``[[0, phi_g^-1], [phi_g, 0]]``."""
    w = phi.window
    F, n = phi.field, phi.dim
    Z = Matrix.zeros(F, n)
    out = {}
    for g in w.elements:
        M = phi[g]
        if w.order2(g):
            Mi = M.inverse()
            top = [list(a) + list(b) for a, b in zip(Z.rows, Mi.rows)]
            bot = [list(a) + list(b) for a, b in zip(M.rows, Z.rows)]
            out[g] = Matrix._raw(F, top + bot)
        else:
            out[g] = direct_sum(M, M)
    return out


def _check_adapted(phi: AlmostHom, label: str):
    w = phi.window
    if not phi.is_normalized():
        raise PreconditionError(f"{label}: image of 1 must be the identity")
    one = Matrix.identity(phi.field, phi.dim)
    for g in w.elements:
        if w.order2(g) or g == w.identity:
            continue
        if phi[g] @ phi[w.inverse(g)] != one:
            raise PreconditionError(f"{label}: image of {w.name(g)}^-1 is not the inverse")


@dataclass
class ZetaResult:
    hom: AlmostHom
    quotient: SeparatingQuotient
    r: int
    defect: Fraction
    min_separation: Fraction | None
    floor: Fraction
    skipped_pairs: int


def zeta_build(
    phi: AlmostHom,
    psi: AlmostHom,
    Q: SeparatingQuotient,
    r: int,
    doubling: bool = False,
    dim_cap: int = DEFAULT_DIM_CAP,
    verify: bool = True,
) -> ZetaResult:
    """``zeta_g = sigma_g o (1 (x) (phi_a (+) psi_b))`` on words of length <= ``r``,
    where ``(a, b)`` is the retraction of ``g`` and ``sigma_g`` permutes ``Omega``.

    ``doubling`` replaces ``phi``/``psi`` by their doubled forms (block
    diagonal, or anti-diagonal on involutions).
    """
    if Q.L < 2 * r:
        raise PreconditionError(f"quotient verified to length {Q.L} < 2r = {2 * r}")
    if phi.field != psi.field:
        raise FieldError(f"{phi.field} vs {psi.field}")
    G1, G2 = Q.fp.factors
    for hom, G, lab in ((phi, G1, "phi"), (psi, G2, "psi")):
        missing = [x for x in G.elements if x not in hom.window]
        if missing:
            raise PreconditionError(f"{lab} must be defined on the whole factor group")
        _check_adapted(hom, lab)
    F = phi.field
    p_img = _doubled(phi) if doubling else dict(phi.images)
    q_img = _doubled(psi) if doubling else dict(psi.images)
    n = next(iter(p_img.values())).nrows
    m = next(iter(q_img.values())).nrows
    N = Q.N
    dim = N * (n + m)
    if dim > dim_cap:
        raise DimensionCapError(f"dimension {dim} exceeds the cap {dim_cap}")
    fp = Q.fp
    window = fp.window(r)
    images = {}
    for w in window.elements:
        if not w:
            images[w] = Matrix.identity(F, dim)
            continue
        a, b = fp.retraction(w)
        block = direct_sum(p_img[a], q_img[b])
        images[w] = translation_matrix(Q.image(w), [block] * N)
    zeta = AlmostHom(window, images, "jordan", check=False)
    floor = Fraction(1, 2) * (1 - Q.theta)
    if not verify:
        return ZetaResult(zeta, Q, r, None, None, floor, 0)

    # sigma is multiplicative on the window
    for (g, h), gh in window.products.items():
        if Q.image(g) * Q.image(h) != Q.image(gh):
            raise BoundViolation("sigma is not multiplicative", pair=(fp.name(g), fp.name(h)))
    # per-pair defect against the block decomposition
    worst, skipped = Fraction(0), 0
    for g in window.elements:
        for h in window.elements:
            gh = window.product(g, h)
            if gh is None:
                skipped += 1
                continue
            a, b = fp.retraction(g)
            c, d = fp.retraction(h)
            ac, bd = G1.mul(a, c), G2.mul(b, d)
            rhs = (
                n * len_rank_quotient(p_img[a] @ p_img[c], p_img[ac])
                + m * len_rank_quotient(q_img[b] @ q_img[d], q_img[bd])
            ) / (n + m)
            lhs = zeta.triple_length(g, h, gh)
            if lhs > rhs:
                raise BoundViolation("zeta defect exceeds the block bound",
                                     pair=(fp.name(g), fp.name(h)), lhs=lhs, rhs=rhs)
            worst = max(worst, lhs)
    seps = {}
    for w in window.non_identity():
        lj = len_jordan(zeta[w], check=False)[0]
        fixed = Q.fixed_points[w]
        if lj < Fraction(1, 2) * (1 - Fraction(fixed, N)) or lj < floor:
            raise BoundViolation("zeta separation below (1 - theta)/2", word=fp.name(w), ell_J=lj)
        seps[w] = lj
    return ZetaResult(
        hom=zeta,
        quotient=Q,
        r=r,
        defect=worst,
        min_separation=min(seps.values()) if seps else None,
        floor=floor,
        skipped_pairs=skipped,
    )
