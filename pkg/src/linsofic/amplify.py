"""Operators on almost homomorphisms: amplification, rank/Jordan conversion,
direct products, restriction of scalars and specialization.

Every operator recomputes the bounds its construction guarantees and raises
:class:`~linsofic.errors.BoundViolation` when one fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .almosthom import (
    AlmostHom,
    GroupWindow,
    defect,
    defect_report,
    min_separation,
)
from .errors import BoundViolation, DimensionCapError, FieldError, PreconditionError
from .fields import ExtensionField, FieldElement, RationalFunctionField
from .jordanlen import f_map, f_schedule, iota, len_jordan, len_jordan_quotient, len_rank
from .matrix import (
    Matrix,
    direct_sum,
    echelon,
    entry_denominators,
    find_specialization_point,
    kron,
    restrict_scalars,
    specialize_at,
    submatrix,
)
from .poly import Polynomial

DEFAULT_DIM_CAP = 4096
QUARTER = Fraction(1, 4)
EIGHTH = Fraction(1, 8)
HALF = Fraction(1, 2)


def _check_cap(dim: int, cap: int):
    if dim > cap:
        raise DimensionCapError(f"dimension {dim} exceeds the cap {cap}")


@dataclass
class StageRecord:
    k: int
    dim: int
    defect: Fraction
    min_separation: Fraction | None
    iota_min: Fraction | None = None
    iota_max: Fraction | None = None

    def to_json(self) -> dict:
        def fr(x):
            return None if x is None else {"num": x.numerator, "den": x.denominator}

        return {
            "k": self.k,
            "dim": self.dim,
            "defect": fr(self.defect),
            "min_separation": fr(self.min_separation),
            "iota_min": fr(self.iota_min),
            "iota_max": fr(self.iota_max),
        }


@dataclass
class AmplifyTrace:
    stages: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"stages": [s.to_json() for s in self.stages], "notes": list(self.notes)}


def _iotas(phi: AlmostHom) -> dict:
    return {g: iota(phi[g], check=False)[0] for g in phi.window.non_identity()}


def _record(k: int, phi: AlmostHom, track_iota: bool) -> tuple[StageRecord, dict | None]:
    io = _iotas(phi) if track_iota else None
    rec = StageRecord(
        k=k,
        dim=phi.dim,
        defect=defect(phi),
        min_separation=min_separation(phi),
        iota_min=min(io.values()) if io else None,
        iota_max=max(io.values()) if io else None,
    )
    return rec, io


def _tensor_square(phi: AlmostHom) -> AlmostHom:
    return phi.replace({g: kron(M, M) for g, M in phi.images.items()})


def tensor_square_iterate(
    phi: AlmostHom,
    m: int,
    dim_cap: int = DEFAULT_DIM_CAP,
    delta=None,
    eps=None,
    track_iota: bool = True,
) -> tuple[AlmostHom, AmplifyTrace]:
    """``phi_0 = phi``, ``phi_{k+1}(g) = phi_k(g) (x) phi_k(g)``; returns ``phi_m``.

    With ``delta`` and ``eps`` given and ``m >= f_schedule(delta, eps)``, the
    output separation is checked against ``1/4 - eps`` whenever the input
    separation is at least ``delta``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if not phi.is_normalized():
        raise PreconditionError("tensor squaring needs phi(1) = 1")
    _check_cap(phi.dim ** (2**m), dim_cap)
    trace = AmplifyTrace()
    rec, io = _record(0, phi, track_iota)
    trace.stages.append(rec)
    d0 = rec.defect
    cur = phi
    for k in range(1, m + 1):
        nxt = _tensor_square(cur)
        rec, io_next = _record(k, nxt, track_iota)
        if rec.defect > 2 * trace.stages[-1].defect:
            raise BoundViolation("tensor square more than doubled the defect", stage=k)
        if track_iota:
            for g, x in io.items():
                y = io_next[g]
                cap = f_map(x) if x >= HALF else HALF
                if y > cap:
                    raise BoundViolation("iota of a tensor square exceeds its bound",
                                         stage=k, element=phi.window.name(g))
        trace.stages.append(rec)
        cur, io = nxt, io_next
    if trace.stages[-1].defect > 2**m * d0:
        raise BoundViolation("defect exceeds 2^m times the input defect")
    if delta is not None and eps is not None:
        delta, eps = Fraction(delta), Fraction(eps)
        sep0 = trace.stages[0].min_separation
        if sep0 is not None and sep0 >= delta and m >= f_schedule(delta, eps):
            sep = trace.stages[-1].min_separation
            if sep < QUARTER - eps:
                raise BoundViolation("amplified Jordan separation below 1/4 - eps",
                                     separation=sep)
            trace.notes.append("separation >= 1/4 - eps verified")
    return cur, trace


def rank_amplify(
    phi: AlmostHom,
    m: int,
    dim_cap: int = DEFAULT_DIM_CAP,
    delta=None,
    eps=None,
    track_iota: bool = False,
) -> tuple[AlmostHom, AmplifyTrace]:
    """``psi_m(g) = phi_m(g) (+) (phi(g) (x) 1)``, both summands of dimension ``n^(2^m)``.

    With ``delta``/``eps`` given and ``f^m(1 - delta) <= 1/2 + 4 eps``, the
    rank separation is checked against ``1/8 - eps``.
    """
    if phi.mode != "rank":
        raise PreconditionError("rank_amplify takes a rank-mode almost homomorphism")
    n = phi.dim
    big = n ** (2**m)
    _check_cap(2 * big, dim_cap)
    jphi = phi.replace(mode="jordan")
    phim, trace = tensor_square_iterate(jphi, m, dim_cap, track_iota=track_iota)
    pad = Matrix.identity(phi.field, big // n)
    images = {g: direct_sum(phim[g], kron(phi[g], pad)) for g in phi.window.elements}
    out = phi.replace(images, mode="rank")
    rep = defect_report(out)
    d0 = defect(phi)
    if rep.defect > Fraction(2**m + 1, 2) * d0:
        raise BoundViolation("rank-amplified defect exceeds (2^m + 1)/2 times the input",
                             defect=rep.defect)
    sep = min_separation(out)
    trace.stages.append(StageRecord(k=m, dim=out.dim, defect=rep.defect, min_separation=sep))
    if delta is not None and eps is not None:
        delta, eps = Fraction(delta), Fraction(eps)
        sep0 = min_separation(phi)
        if sep0 is not None and sep0 >= delta and m >= f_schedule(delta, 2 * eps):
            if sep < EIGHTH - eps:
                raise BoundViolation("amplified rank separation below 1/8 - eps", separation=sep)
            trace.notes.append("separation >= 1/8 - eps verified")
    return out, trace


def to_projective(phi: AlmostHom, eps) -> AlmostHom:
    """``psi_g = phi_g (+) 1_n``: rank length at most 1/2, hence equal to the Jordan length."""
    eps = Fraction(eps)
    if phi.mode != "rank":
        raise PreconditionError("to_projective takes a rank-mode almost homomorphism")
    if eps >= HALF:
        raise PreconditionError("to_projective needs eps < 1/2")
    d = defect(phi)
    if d > eps:
        raise PreconditionError(f"defect {d} exceeds eps = {eps}")
    one = Matrix.identity(phi.field, phi.dim)
    out = phi.replace({g: direct_sum(M, one) for g, M in phi.images.items()}, mode="jordan")
    for g, M in out.images.items():
        lr = len_rank(M, check=False)
        lj = len_jordan(M, check=False)[0]
        if lr != lj or lr * 2 != len_rank(phi[g], check=False):
            raise BoundViolation("padded image has ell_J != ell_r", element=phi.window.name(g))
    sep_in, sep_out = min_separation(phi), min_separation(out)
    if sep_in is not None and sep_out < sep_in / 2:
        raise BoundViolation("separation fell below half")
    d_out = defect(out)
    if d_out > eps / 2:
        raise BoundViolation("Jordan defect exceeds eps/2", defect=d_out)
    return out


def inverse_transpose_hom(phi: AlmostHom) -> AlmostHom:
    """``g -> phi_g^{-T}``."""
    return phi.replace({g: M.inverse_transpose() for g, M in phi.images.items()})


def to_rank(phi: AlmostHom, eps) -> AlmostHom:
    """``psi_g = phi_g (x) phi_g^{-T}``; the defect triples have prevalent eigenvalue 1."""
    eps = Fraction(eps)
    if phi.mode != "jordan":
        raise PreconditionError("to_rank takes a Jordan-mode almost homomorphism")
    if eps >= QUARTER:
        raise PreconditionError("to_rank needs eps < 1/4")
    d = defect(phi)
    if d > eps / 2:
        raise PreconditionError(f"defect {d} exceeds eps/2 = {eps / 2}")
    out = phi.replace({g: kron(M, M.inverse_transpose()) for g, M in phi.images.items()},
                      mode="rank")
    w = out.window
    worst = Fraction(0)
    for (g, h), gh in w.products.items():
        lr = out.triple_length(g, h, gh)
        P = out[g] @ out[h]
        lj = Fraction(0) if lr == 0 else len_jordan_quotient(P, out[gh])
        if lr != lj:
            raise BoundViolation("defect triple has ell_r != ell_J",
                                 pair=(w.name(g), w.name(h)), ell_r=lr, ell_J=lj)
        worst = max(worst, lr)
    if worst > eps:
        raise BoundViolation("rank defect exceeds eps", defect=worst)
    for g, M in out.images.items():
        if len_rank(M, check=False) < len_jordan(M, check=False)[0]:
            raise BoundViolation("ell_r < ell_J", element=w.name(g))
    return out


# ---------------------------------------------------------------------------


def product_window(w1: GroupWindow, w2: GroupWindow) -> GroupWindow:
    def mul(x, y):
        a = w1.product(x[0], y[0])
        b = w2.product(x[1], y[1])
        return None if a is None or b is None else (a, b)

    elems = [(g, h) for g in w1.elements for h in w2.elements]
    return GroupWindow.from_oracle(
        elems,
        (w1.identity, w2.identity),
        mul,
        lambda x: (w1.inverse(x[0]), w2.inverse(x[1])),
        name=lambda x: f"({w1.name(x[0])},{w2.name(x[1])})",
    )


def direct_product_hom(phi: AlmostHom, psi: AlmostHom, eps=None) -> AlmostHom:
    """``zeta_(g,h) = phi_g (x) psi_h`` on the product window (Jordan mode)."""
    if phi.field != psi.field:
        raise FieldError(f"{phi.field} vs {psi.field}")
    if phi.mode != "jordan" or psi.mode != "jordan":
        raise PreconditionError("direct_product_hom takes Jordan-mode inputs")
    if eps is not None:
        eps = Fraction(eps)
        for name, x in (("first", phi), ("second", psi)):
            d = defect(x)
            if d > eps / 2:
                raise PreconditionError(f"{name} factor has defect {d} > eps/2")
    w = product_window(phi.window, psi.window)
    out = AlmostHom(w, {(g, h): kron(phi[g], psi[h]) for g, h in w.elements}, "jordan",
                    check=False)
    if eps is not None:
        d_out = defect(out)
        if d_out > eps:
            raise BoundViolation("product defect exceeds eps", defect=d_out)
    io1 = {g: iota(phi[g], check=False)[0] for g in phi.window.elements}
    io2 = {h: iota(psi[h], check=False)[0] for h in psi.window.elements}
    lj1 = {g: len_jordan(phi[g], check=False)[0] for g in phi.window.elements}
    lj2 = {h: len_jordan(psi[h], check=False)[0] for h in psi.window.elements}
    for g, h in w.non_identity():
        lz = len_jordan(out[(g, h)], check=False)[0]
        ok = True
        if io1[g] > HALF and lz < lj2[h] / 4:
            ok = False
        if io2[h] > HALF and lz < lj1[g] / 4:
            ok = False
        if io1[g] <= HALF and io2[h] <= HALF and lz < QUARTER:
            ok = False
        if not ok:
            raise BoundViolation("product separation bound fails", element=w.name((g, h)))
    return out


def restrict_hom(phi: AlmostHom) -> AlmostHom:
    """View an almost homomorphism over ``L`` as one over its base field."""
    if not isinstance(phi.field, ExtensionField):
        raise FieldError(f"{phi.field} is not a finite extension")
    if phi.mode != "rank":
        raise PreconditionError("restriction preserves the rank length only")
    out = phi.replace({g: restrict_scalars(M) for g, M in phi.images.items()})
    for g in phi.window.elements:
        if len_rank(out[g], check=False) != len_rank(phi[g], check=False):
            raise BoundViolation("restriction changed a rank length", element=phi.window.name(g))
    for (g, h), gh in phi.window.products.items():
        if out.triple_length(g, h, gh) != phi.triple_length(g, h, gh):
            raise BoundViolation("restriction changed a defect triple")
    return out


@dataclass(frozen=True)
class Specialization:
    hom: AlmostHom
    point: FieldElement
    avoid: tuple


def _minor_det_numerator(M: Matrix) -> tuple | None:
    """Numerator of the determinant of a maximal nonsingular minor of ``M``."""
    _, cols, rows = echelon(M.field, M.rows, M.ncols)
    if not cols:
        return None
    d = submatrix(M, sorted(rows), cols).det().value
    return d[0]


def specialize_hom(phi: AlmostHom, degree: int = 1, max_degree: int = 12) -> Specialization:
    """Substitute an algebraic value for ``t`` keeping every rank profile.

    The avoid-list holds entry denominators, the determinant numerators of
    the images (so they stay invertible), and the numerators of maximal
    nonsingular minors of ``1 - phi_g`` and ``phi_gh - phi_g phi_h``.
    """
    K = phi.field
    if not isinstance(K, RationalFunctionField):
        raise FieldError(f"specialization needs F_p(t), got {K}")
    if phi.mode != "rank":
        raise PreconditionError("specialize_hom takes a rank-mode almost homomorphism")
    avoid: list[tuple] = []
    for g, M in phi.images.items():
        avoid += entry_denominators(M)
        avoid.append(M.det().value[0])
        num = _minor_det_numerator(M.scalar_minus(K.one))
        if num is not None:
            avoid.append(num)
    for (g, h), gh in phi.window.products.items():
        num = _minor_det_numerator(phi[gh] - phi[g] @ phi[h])
        if num is not None:
            avoid.append(num)
    avoid = list(dict.fromkeys(avoid))
    L, c = find_specialization_point(K, avoid, degree, max_degree)
    out = AlmostHom(phi.window, {g: specialize_at(M, L, c) for g, M in phi.images.items()},
                    "rank", check=True)
    for g in phi.window.elements:
        if len_rank(out[g], check=False) != len_rank(phi[g], check=False):
            raise BoundViolation("specialization changed a rank length",
                                 element=phi.window.name(g))
    for (g, h), gh in phi.window.products.items():
        if out.triple_length(g, h, gh) != phi.triple_length(g, h, gh):
            raise BoundViolation("specialization changed a defect triple")
    return Specialization(out, FieldElement(L, c), tuple(Polynomial._raw(K.Fp, a) for a in avoid))
