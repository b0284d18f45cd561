"""Finite group windows, almost homomorphisms into GL_n(K), and their repair.

Group elements are opaque hashable tokens.  A :class:`GroupWindow` records
which products of window elements land back in the window; everything else
(finite multiplication tables, free-product words, direct products) plugs in
through :meth:`GroupWindow.from_oracle`.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import BoundViolation, GroupError, PreconditionError, ShapeError
from .jordanlen import len_jordan, len_jordan_quotient, len_rank, len_rank_quotient
from .matrix import Matrix, Permutation

MODES = ("rank", "jordan")


# ---------------------------------------------------------------------------
# finite groups given by a multiplication table


class FiniteGroup:
    """A finite group on ``0..n-1`` given by its Cayley table."""

    def __init__(self, table: Sequence[Sequence[int]], names: Sequence[str] | None = None,
                 check: bool = True):
        n = len(table)
        if n == 0:
            raise GroupError("empty multiplication table")
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        if any(len(row) != n for row in self.table):
            raise GroupError("multiplication table is not square")
        if any(not 0 <= x < n for row in self.table for x in row):
            raise GroupError("table entries out of range")
        self.order = n
        self.names = tuple(names) if names is not None else tuple(f"g{i}" for i in range(n))
        if len(set(self.names)) != n:
            raise GroupError("element names must be distinct")
        ids = [e for e in range(n)
               if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n))]
        if not ids:
            raise GroupError("table has no identity")
        self.identity = ids[0]
        inv = []
        for x in range(n):
            cands = [y for y in range(n) if self.table[x][y] == self.identity]
            if len(cands) != 1 or self.table[cands[0]][x] != self.identity:
                raise GroupError(f"element {self.names[x]} has no two-sided inverse")
            inv.append(cands[0])
        self._inv = tuple(inv)
        if check:
            self._check_associative()

    def _check_associative(self, sample: int = 20000, seed: int = 0):
        n, t = self.order, self.table
        if n <= 64:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(seed)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(sample))
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(
                    f"not associative: ({self.names[a]}{self.names[b]}){self.names[c]}"
                )

    # group operations ------------------------------------------------------
    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def prod(self, seq: Iterable[int]) -> int:
        out = self.identity
        for x in seq:
            out = self.table[out][x]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def name(self, a: int) -> str:
        return self.names[a]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GroupError(f"unknown element {name!r}") from None

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        span = {self.identity}
        for x in self.elements:
            if x in span:
                continue
            gens.append(x)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens) -> set:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = self.table[x][s]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def regular_permutation(self, a: int) -> Permutation:
        """Left translation ``x -> a x``."""
        return Permutation(tuple(self.table[a][x] for x in self.elements))

    # constructors ----------------------------------------------------------
    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        names = ["1"] + [f"a{i}" if i > 1 else "a" for i in range(1, n)]
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], names, check=False)

    @classmethod
    def symmetric(cls, k: int) -> "FiniteGroup":
        perms = sorted(itertools.permutations(range(k)))
        ident = tuple(range(k))
        perms.remove(ident)
        perms.insert(0, ident)
        idx = {p: i for i, p in enumerate(perms)}
        table = [[idx[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
        names = ["1"] + ["".join(str(x + 1) for x in p) for p in perms[1:]]
        return cls(table, names, check=False)

    @classmethod
    def direct_product(cls, G: "FiniteGroup", H: "FiniteGroup") -> "FiniteGroup":
        pairs = [(g, h) for g in G.elements for h in H.elements]
        pairs.remove((G.identity, H.identity))
        pairs.insert(0, (G.identity, H.identity))
        idx = {p: i for i, p in enumerate(pairs)}
        table = [[idx[(G.mul(a, c), H.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
        names = [f"({G.name(a)},{H.name(b)})" for a, b in pairs]
        return cls(table, names, check=False)

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteGroup":
        try:
            names = [str(x) for x in obj["elements"]]
            ident = str(obj["identity"])
            raw = obj["table"]
        except (KeyError, TypeError) as exc:
            raise GroupError(f"malformed group table: {exc}") from exc
        pos = {x: i for i, x in enumerate(names)}
        if ident not in pos:
            raise GroupError("identity is not among the elements")
        try:
            table = [[pos[str(x)] for x in row] for row in raw]
        except KeyError as exc:
            raise GroupError(f"table mentions unknown element {exc}") from None
        G = cls(table, names)
        if G.identity != pos[ident]:
            raise GroupError("declared identity does not act neutrally")
        return G

    def to_json(self) -> dict:
        return {
            "elements": list(self.names),
            "identity": self.names[self.identity],
            "table": [[self.names[x] for x in row] for row in self.table],
        }


# ---------------------------------------------------------------------------
# windows


@dataclass(eq=False)
class GroupWindow:
    """A finite symmetric subset of a group containing 1, with its partial products."""

    elements: tuple
    identity: Hashable
    products: dict = field(repr=False)
    inverses: dict = field(repr=False)
    names: dict = field(repr=False)

    def __post_init__(self):
        self.index = {g: i for i, g in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise GroupError("window elements must be distinct")
        if self.identity not in self.index:
            raise GroupError("window must contain the identity")
        for g in self.elements:
            if self.inverses.get(g) not in self.index:
                raise GroupError(f"window is not symmetric: inverse of {self.name(g)} missing")

    @classmethod
    def from_oracle(
        cls,
        elements: Iterable[Hashable],
        identity: Hashable,
        mul: Callable,
        inv: Callable,
        name: Callable[[Hashable], str] = str,
    ) -> "GroupWindow":
        elems = tuple(dict.fromkeys(elements))
        members = set(elems)
        products = {}
        for g in elems:
            for h in elems:
                gh = mul(g, h)
                if gh in members:
                    products[(g, h)] = gh
        inverses = {g: inv(g) for g in elems}
        w = cls(elems, identity, products, inverses, {g: name(g) for g in elems})
        for g in elems:
            if products.get((identity, g)) != g or products.get((g, identity)) != g:
                raise GroupError("identity does not act neutrally on the window")
            if products.get((g, inverses[g])) != identity:
                raise GroupError(f"inverse of {w.name(g)} is inconsistent with products")
        return w

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def __iter__(self):
        return iter(self.elements)

    def product(self, g, h):
        """``gh`` if it lies in the window, else ``None``."""
        return self.products.get((g, h))

    def inverse(self, g):
        return self.inverses[g]

    def order2(self, g) -> bool:
        return g != self.identity and self.inverses[g] == g

    def name(self, g) -> str:
        return self.names.get(g, str(g))

    def is_closed(self) -> bool:
        return len(self.products) == len(self.elements) ** 2

    def non_identity(self) -> list:
        return [g for g in self.elements if g != self.identity]

    def to_json(self) -> dict:
        nm = self.name
        return {
            "elements": [nm(g) for g in self.elements],
            "identity": nm(self.identity),
            "table": [
                [nm(self.products[(g, h)]) if (g, h) in self.products else None
                 for h in self.elements]
                for g in self.elements
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroupWindow":
        """Inverse of :meth:`to_json`; tokens are the element names."""
        try:
            names = [str(x) for x in obj["elements"]]
            ident = str(obj["identity"])
            table = obj["table"]
        except (KeyError, TypeError) as exc:
            raise GroupError(f"malformed window: {exc}") from exc
        if len(table) != len(names) or any(len(r) != len(names) for r in table):
            raise GroupError("window table does not match the element list")
        members = set(names)
        products = {}
        for g, row in zip(names, table):
            for h, gh in zip(names, row):
                if gh is None:
                    continue
                if str(gh) not in members:
                    raise GroupError(f"product {g}*{h} = {gh} is not a window element")
                products[(g, h)] = str(gh)
        inverses = {}
        for g in names:
            cands = [h for h in names if products.get((g, h)) == ident]
            if len(cands) != 1:
                raise GroupError(f"cannot determine the inverse of {g}")
            inverses[g] = cands[0]
        w = cls(tuple(names), ident, products, inverses, {g: g for g in names})
        for g in names:
            if products.get((ident, g)) != g or products.get((g, ident)) != g:
                raise GroupError("identity does not act neutrally on the window")
        return w


def window_from_finite_group(G: FiniteGroup | Sequence[Sequence[int]]) -> GroupWindow:
    """The full window of a finite group (a table is validated first)."""
    if not isinstance(G, FiniteGroup):
        G = FiniteGroup(G)
    return GroupWindow.from_oracle(G.elements, G.identity, G.mul, G.inv, G.name)


# ---------------------------------------------------------------------------
# almost homomorphisms


class AlmostHom:
    """A map from a window into GL_n(K), measured with the rank or Jordan length."""

    def __init__(self, window: GroupWindow, images: Mapping, mode: str = "rank",
                 check: bool = True):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        missing = [window.name(g) for g in window.elements if g not in images]
        if missing:
            raise ShapeError(f"no image for {missing[:5]}")
        self.window = window
        self.images = {g: images[g] for g in window.elements}
        self.mode = mode
        first = self.images[window.identity]
        self.field = first.field
        self.dim = first.nrows
        for g, M in self.images.items():
            if M.field != self.field or M.shape != (self.dim, self.dim):
                raise ShapeError(f"image of {window.name(g)} has the wrong field or shape")
            if check and M.rank() != self.dim:
                raise PreconditionError(f"image of {window.name(g)} is singular")

    def __getitem__(self, g) -> Matrix:
        return self.images[g]

    def replace(self, images: Mapping | None = None, mode: str | None = None,
                check: bool = False) -> "AlmostHom":
        return AlmostHom(
            self.window,
            self.images if images is None else images,
            self.mode if mode is None else mode,
            check=check,
        )

    def is_normalized(self) -> bool:
        return self.images[self.window.identity].is_identity()

    def length(self, M: Matrix) -> Fraction:
        if self.mode == "rank":
            return len_rank(M, check=False)
        return len_jordan(M, check=False)[0]

    def triple_length(self, g, h, gh=None) -> Fraction:
        """``l(phi_g phi_h phi_gh^{-1})``."""
        if gh is None:
            gh = self.window.product(g, h)
        P = self.images[g] @ self.images[h]
        Z = self.images[gh]
        if P == Z:
            return Fraction(0)
        if self.mode == "rank":
            return len_rank_quotient(P, Z)
        return len_jordan_quotient(P, Z)

    def conjugate(self, T: Matrix) -> "AlmostHom":
        Ti = T.inverse()
        return self.replace({g: T @ M @ Ti for g, M in self.images.items()})


@dataclass(frozen=True)
class DefectReport:
    defect: Fraction
    worst: tuple | None
    evaluated: int
    skipped: int


def defect_report(phi: AlmostHom, core: Iterable | None = None) -> DefectReport:
    """Max of ``l(phi_g phi_h phi_gh^{-1})`` over pairs of ``core`` (default: the
    whole window) whose product lies in the window; other pairs are skipped."""
    w = phi.window
    E = list(w.elements) if core is None else list(core)
    if not E:
        raise GroupError("empty window")
    best, worst, evaluated, skipped = Fraction(0), None, 0, 0
    for g in E:
        for h in E:
            gh = w.product(g, h)
            if gh is None:
                skipped += 1
                continue
            evaluated += 1
            v = phi.triple_length(g, h, gh)
            if v > best:
                best, worst = v, (g, h)
    return DefectReport(best, worst, evaluated, skipped)


def defect(phi: AlmostHom, core: Iterable | None = None) -> Fraction:
    return defect_report(phi, core).defect


@dataclass(frozen=True)
class QualityReport:
    defect: Fraction
    separation: dict
    min_separation: Fraction | None
    skipped_pairs: int = 0

    def to_json(self, window: GroupWindow) -> dict:
        def fr(x):
            return None if x is None else {"num": x.numerator, "den": x.denominator}

        return {
            "defect": fr(self.defect),
            "separation": {window.name(g): fr(v) for g, v in self.separation.items()},
            "min_separation": fr(self.min_separation),
            "skipped_pairs": self.skipped_pairs,
        }


def separations(phi: AlmostHom) -> dict:
    w = phi.window
    return {g: phi.length(phi[g]) for g in w.non_identity()}


def separation(phi: AlmostHom, with_defect: bool = True) -> QualityReport:
    """Per-element lengths of non-identity images, their minimum, and the defect."""
    sep = separations(phi)
    rep = defect_report(phi) if with_defect else None
    return QualityReport(
        defect=rep.defect if rep else None,
        separation=sep,
        min_separation=min(sep.values()) if sep else None,
        skipped_pairs=rep.skipped if rep else 0,
    )


def min_separation(phi: AlmostHom) -> Fraction | None:
    sep = separations(phi)
    return min(sep.values()) if sep else None


# ---------------------------------------------------------------------------
# construction from exact representations


def hom_from_exact_rep(window: GroupWindow | FiniteGroup, generator_images: Mapping,
                       mode: str = "rank") -> AlmostHom:
    """Extend images of generators along the (closed) window's products.

    ``generator_images`` maps window tokens (or element names) to matrices.
    Raises :class:`GroupError` if the images do not satisfy the relations.
    """
    if isinstance(window, FiniteGroup):
        window = window_from_finite_group(window)
    if not window.is_closed():
        raise GroupError("exact representations need a window closed under products")
    by_name = {window.name(g): g for g in window.elements}
    gens = {}
    for k, M in generator_images.items():
        g = k if k in window else by_name.get(k)
        if g is None:
            raise GroupError(f"unknown generator {k!r}")
        gens[g] = M
    if not gens:
        raise GroupError("no generators given")
    first = next(iter(gens.values()))
    for M in gens.values():
        if M.field != first.field or not M.is_square or M.shape != first.shape:
            raise ShapeError("generator images must share field and dimension")
        if not M.is_invertible():
            raise GroupError("generator images must be invertible")
    e = window.identity
    images = {e: Matrix.identity(first.field, first.nrows)}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for s, M in gens.items():
            y = window.product(x, s)
            if y not in images:
                images[y] = images[x] @ M
                queue.append(y)
    if len(images) != len(window):
        raise GroupError("generators do not generate the whole window")
    for (g, h), gh in window.products.items():
        if images[g] @ images[h] != images[gh]:
            raise GroupError(
                f"images violate the relation {window.name(g)}*{window.name(h)} = {window.name(gh)}"
            )
    return AlmostHom(window, images, mode, check=False)


def regular_rep(G: FiniteGroup, F, mode: str = "rank") -> AlmostHom:
    from .matrix import perm_matrix

    w = window_from_finite_group(G)
    return AlmostHom(w, {g: perm_matrix(G.regular_permutation(g), F) for g in G.elements},
                     mode, check=False)


# ---------------------------------------------------------------------------
# repairs


def normalize_identity(phi: AlmostHom, eps) -> AlmostHom:
    """Replace ``phi(1)`` by the identity, doubling the defect at most."""
    eps = Fraction(eps)
    d = defect(phi)
    if d > eps / 2:
        raise PreconditionError(f"defect {d} exceeds eps/2 = {eps / 2}")
    e = phi.window.identity
    l1 = phi.length(phi[e])
    if l1 > d:
        raise BoundViolation("length of phi(1) exceeds the defect", length=l1, defect=d)
    if phi[e].is_identity():
        return phi
    images = dict(phi.images)
    images[e] = Matrix.identity(phi.field, phi.dim)
    out = phi.replace(images)
    d_out = defect(out)
    if d_out > eps:
        raise BoundViolation("normalized defect exceeds eps", defect=d_out, eps=eps)
    return out


@dataclass(frozen=True)
class InversePartition:
    F0: tuple
    F1: tuple
    Fm1: tuple


def inverse_partition(window: GroupWindow) -> InversePartition:
    """Involutions and 1 in F0; otherwise the first-seen of ``g, g^-1`` goes to F1."""
    F0, F1, Fm1 = [], [], []
    seen = set()
    for g in window.elements:
        if g in seen:
            continue
        gi = window.inverse(g)
        if gi == g:
            F0.append(g)
            seen.add(g)
        else:
            F1.append(g)
            Fm1.append(gi)
            seen.update((g, gi))
    return InversePartition(tuple(F0), tuple(F1), tuple(Fm1))


def check_inverse_closure(window: GroupWindow, core: Iterable) -> None:
    """Raise unless the window contains ``(E u E^-1 u {1})^2``."""
    E = set(core)
    S = E | {window.inverse(g) for g in E} | {window.identity}
    if not S <= set(window.elements):
        raise PreconditionError("core is not contained in the window")
    for g in S:
        for h in S:
            if window.product(g, h) is None:
                raise PreconditionError(
                    f"window does not contain {window.name(g)}*{window.name(h)}"
                )


def adapt_inverses(phi: AlmostHom, eps, core: Iterable | None = None) -> AlmostHom:
    """Make ``phi(g^-1) = phi(g)^-1`` for all non-involutions of the window.

    ``core`` is the set E on which the output is claimed to be an
    (E, eps)-homomorphism; the window must contain ``(E u E^-1 u {1})^2``.
    """
    eps = Fraction(eps)
    w = phi.window
    E = list(w.elements) if core is None else list(core)
    check_inverse_closure(w, E)
    if not phi.is_normalized():
        raise PreconditionError("adapt_inverses needs phi(1) = 1")
    d = defect(phi)
    if d > eps / 2:
        raise PreconditionError(f"defect {d} exceeds eps/2 = {eps / 2}")
    part = inverse_partition(w)
    images = dict(phi.images)
    for g in part.Fm1:
        images[g] = phi[w.inverse(g)].inverse()
    out = phi.replace(images)
    for g in part.F1:
        if out[g] @ out[w.inverse(g)] != Matrix.identity(phi.field, phi.dim):
            raise BoundViolation("inverse identity fails", element=w.name(g))
    d_out = defect(out, E)
    if d_out > eps:
        raise BoundViolation("adapted defect exceeds eps", defect=d_out, eps=eps)
    return out


def perturb(phi: AlmostHom, g, rng: random.Random, rank: int = 1) -> AlmostHom:
    """Multiply ``phi(g)`` by a random invertible ``1 + (rank-r matrix)``."""
    F, n = phi.field, phi.dim
    while True:
        U = Matrix.random(F, n, rank, rng)
        V = Matrix.random(F, rank, n, rng)
        X = Matrix.identity(F, n) + U @ V
        if X.is_invertible() and not X.is_identity():
            break
    images = dict(phi.images)
    images[g] = phi[g] @ X
    return phi.replace(images)
