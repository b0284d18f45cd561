"""Seeded random instances: structured invertible matrices, small groups and
their representations, and perturbed almost homomorphisms."""

from __future__ import annotations

import random
import re
from fractions import Fraction

from .almosthom import AlmostHom, FiniteGroup, hom_from_exact_rep, regular_rep
from .errors import FieldError
from .fields import QQ, Field, FpT, GF, RationalField, RationalFunctionField, field_make
from .matrix import Matrix, Permutation, direct_sum, perm_matrix
from .poly import Polynomial, is_irreducible

Q_EIGEN_POOL = (1, -1, 2, Fraction(1, 2), 3, -2)

_FIELD_RE = re.compile(r"^F(\d+)(\(t\))?$")


def parse_field(desc) -> Field:
    """``"F5"``, ``"F9"``, ``"Q"``, ``"F2(t)"`` or a JSON descriptor."""
    if isinstance(desc, dict):
        return field_make(desc)
    if not isinstance(desc, str):
        raise FieldError(f"cannot parse field {desc!r}")
    s = desc.strip()
    if s in ("Q", "QQ"):
        return QQ
    m = _FIELD_RE.match(s)
    if not m:
        raise FieldError(f"cannot parse field {desc!r}")
    q = int(m.group(1))
    for p in range(2, q + 1):
        if q % p == 0:
            break
    else:
        raise FieldError(f"{q} is not a prime power")
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    if m.group(2):
        if k != 1:
            raise FieldError("rational function fields are supported over prime fields only")
        return FpT(p)
    return GF(p, k)


def field_label(F: Field) -> str:
    if isinstance(F, RationalField):
        return "Q"
    if isinstance(F, RationalFunctionField):
        return f"F{F.p}(t)"
    return f"F{F.order}"


def eigen_pool(F: Field) -> list:
    if isinstance(F, RationalField):
        return [F.convert(x) for x in Q_EIGEN_POOL]
    if isinstance(F, RationalFunctionField):
        return [F.convert(c) for c in range(1, F.p)]
    return F.units()


def random_irreducible(F: Field, d: int, rng: random.Random) -> Polynomial:
    while True:
        f = Polynomial(F, [F.random(rng) for _ in range(d)] + [F.one])
        if not F.is_zero(f.coeffs[0]) and is_irreducible(f):
            return f


def block_diag(blocks) -> Matrix:
    M = blocks[0]
    for B in blocks[1:]:
        M = direct_sum(M, B)
    return M


def random_conjugator(F: Field, n: int, rng: random.Random) -> Matrix:
    """Random invertible matrix; over Q a product of a unit lower and a unit
    upper triangular factor, so that entries of the inverse stay integral."""
    if isinstance(F, RationalField):
        lo = [[(rng.randint(-2, 2) if j < i else int(i == j)) for j in range(n)] for i in range(n)]
        up = [[(rng.randint(-2, 2) if j > i else int(i == j)) for j in range(n)] for i in range(n)]
        return Matrix._raw(F, lo) @ Matrix._raw(F, up)
    return Matrix.random_invertible(F, n, rng)


def random_jordan_gl(F: Field, n: int, rng: random.Random, conjugate: bool = True) -> Matrix:
    """A conjugate of a block-diagonal matrix built from Jordan blocks at a few
    shared eigenvalues and, over finite fields, companions of irreducible
    quadratics (eigenvalues outside K)."""
    pool = eigen_pool(F)
    chosen = rng.sample(pool, k=min(len(pool), rng.randint(1, 3)))
    blocks, left = [], n
    while left:
        if F.is_finite and left >= 2 and rng.random() < 0.15:
            blocks.append(Matrix.companion(random_irreducible(F, 2, rng)))
            left -= 2
            continue
        s = 1 if rng.random() < 0.5 else rng.randint(1, left)
        blocks.append(Matrix.jordan_block(F, rng.choice(chosen), s))
        left -= s
    M = block_diag(blocks)
    if not conjugate:
        return M
    T = random_conjugator(F, n, rng)
    return T @ M @ T.inverse()


def random_gl(F: Field, n: int, rng: random.Random) -> Matrix:
    """Half uniform-ish invertible matrices, half structured ones."""
    if rng.random() < 0.5:
        return Matrix.random_invertible(F, n, rng)
    return random_jordan_gl(F, n, rng)


# ---------------------------------------------------------------------------
# groups and representations

SMALL_GROUPS = ("C2", "C3", "C4", "C5", "S3", "C2xC2")


def small_group(name: str) -> FiniteGroup:
    if name == "S3":
        return FiniteGroup.symmetric(3)
    if name == "C2xC2":
        return FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    if name.startswith("C"):
        return FiniteGroup.cyclic(int(name[1:]))
    raise ValueError(f"unknown group {name!r}")


def permutation_rep(name: str, F: Field, mode: str = "rank") -> AlmostHom:
    """The regular representation (natural one for S3)."""
    G = small_group(name)
    if name == "S3":
        gens = {}
        for g in G.generators():
            pi = Permutation(tuple(int(c) - 1 for c in G.name(g)))
            gens[g] = perm_matrix(pi, F)
        return hom_from_exact_rep(G, gens, mode)
    return regular_rep(G, F, mode)


def two_dim_rep(name: str, F: Field, mode: str = "rank") -> AlmostHom:
    """A 2-dimensional representation defined over every field."""
    m1 = F.from_int(-1)
    r = Matrix._raw(F, [[F.zero, m1], [F.one, m1]])
    s = Matrix._raw(F, [[F.zero, F.one], [F.one, F.zero]])
    G = small_group(name)
    if name == "C2":
        img = {"a": Matrix.diag(F, [m1, F.one]) if F.characteristic != 2 else s}
    elif name == "C3":
        img = {"a": r}
    elif name == "C4":
        img = {"a": Matrix._raw(F, [[F.zero, F.from_int(-1)], [F.one, F.zero]])}
    elif name == "S3":
        img = {"213": s, "231": r}
    else:
        raise ValueError(f"no 2-dimensional representation for {name}")
    return hom_from_exact_rep(G, img, mode)


def padded_rep(phi: AlmostHom, extra: int) -> AlmostHom:
    """``phi (+) 1_extra``."""
    if extra <= 0:
        return phi
    one = Matrix.identity(phi.field, extra)
    return phi.replace({g: direct_sum(M, one) for g, M in phi.images.items()})


def conjugated(phi: AlmostHom, rng: random.Random) -> AlmostHom:
    return phi.conjugate(random_conjugator(phi.field, phi.dim, rng))


def scalar_twist(phi: AlmostHom, rng: random.Random) -> AlmostHom:
    """Multiply every non-identity image by a random unit scalar."""
    F = phi.field
    pool = eigen_pool(F)
    e = phi.window.identity
    return phi.replace({g: M if g == e else M.scale(rng.choice(pool))
                        for g, M in phi.images.items()})
