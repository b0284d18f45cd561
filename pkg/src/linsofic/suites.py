"""Seeded property suites and the verification driver.

A suite generates self-contained JSON cases and a ``check(case)`` function
that rebuilds every object from the case and returns the violated claims.
Reports therefore double as regression fixtures: :func:`replay` re-runs the
stored counterexamples.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .almosthom import (
    AlmostHom,
    adapt_inverses,
    defect,
    hom_from_exact_rep,
    inverse_partition,
    min_separation,
    normalize_identity,
    perturb,
    window_from_finite_group,
)
from .amplify import (
    DEFAULT_DIM_CAP,
    EIGHTH,
    QUARTER,
    rank_amplify,
    restrict_hom,
    specialize_hom,
    tensor_square_iterate,
    to_projective,
    to_rank,
)
from .errors import BoundViolation, LinsoficError
from .fields import ExtensionField, Field, RationalFunctionField
from .freeprod import (
    FreeProduct,
    build_separating_quotient,
    translation_matrix,
    translation_rank_bound,
    zeta_build,
)
from .jordanlen import (
    eigenvalues,
    f_schedule,
    iota,
    iota_alpha,
    iota_report,
    jordan_type,
    len_hamming,
    len_jordan,
    len_rank,
)
from .matrix import Matrix, Permutation, direct_sum, kron, perm_matrix, restrict_scalars
from .poly import Polynomial
from .randgen import (
    SMALL_GROUPS,
    conjugated,
    eigen_pool,
    field_label,
    padded_rep,
    parse_field,
    permutation_rep,
    random_conjugator,
    random_gl,
    random_jordan_gl,
    scalar_twist,
    small_group,
    two_dim_rep,
)
from .serialize import frac_from_json, frac_to_json, hom_from_manifest, hom_to_json

HALF = Fraction(1, 2)


class ConfigError(LinsoficError):
    """Invalid verification config (unknown suite, bad count, missing seed...)."""


@dataclass(frozen=True)
class Params:
    instances: int
    max_dim: int
    dim_cap: int = DEFAULT_DIM_CAP


@dataclass(frozen=True)
class Suite:
    id: str
    module: str
    summary: str
    fields: tuple  # default field labels; empty for field-free suites
    instances: dict  # default instance count per field label ("*" = fallback)
    max_dim: int
    supports: Callable[[Field], bool]
    generate: Callable[[Field | None, Params, random.Random], Iterator[dict]]
    check: Callable[[dict], list]
    exhaustive: bool = False

    def default_instances(self, label: str) -> int:
        return self.instances.get(label, self.instances.get("*", 1))


SUITES: dict[str, Suite] = {}


def _register(**kw):
    def deco(gen):
        SUITES[kw["id"]] = Suite(generate=gen, **kw)
        return gen

    return deco


def _not_fpt(F: Field) -> bool:
    return not isinstance(F, RationalFunctionField)


def _finite(F: Field) -> bool:
    return F.is_finite


def _extension(F: Field) -> bool:
    return isinstance(F, ExtensionField) and F.is_finite


def _fpt(F: Field) -> bool:
    return isinstance(F, RationalFunctionField)


# --- case helpers -----------------------------------------------------------


def _field(case) -> Field:
    return parse_field(case["field"])


def _mat(obj, F: Field) -> Matrix:
    return Matrix.from_json(obj, F)


def _unit(F: Field, rng: random.Random):
    return rng.choice(eigen_pool(F))


def _fmt(x) -> str:
    return str(x) if not isinstance(x, Fraction) else f"{x.numerator}/{x.denominator}"


# ===========================================================================
# jordanlen


def _check_iota_bounds(case) -> list:
    F = _field(case)
    A = _mat(case["A"], F)
    rep = iota_report(A)
    bad = list(rep.check_invariants())
    n = A.nrows
    # closed form for iota_a against the block structure
    for comp in rep.jordan.components:
        if comp.factor.degree == 1:
            a = F.neg(comp.factor.coeffs[0])
            if iota_alpha(A, a) != Fraction(comp.ones, n):
                bad.append(f"iota_alpha closed form disagrees with Jordan type at {F.format(a)}")
    return bad


@_register(
    id="prop-iota-bounds",
    module="jordanlen",
    summary="(1-iota1)/2 <= ell_r <= 1-iota1 and (1-iota)/2 <= ell_J <= 1-iota",
    fields=("F2", "F3", "F5", "Q"),
    instances={"Q": 200, "*": 1000},
    max_dim=6,
    supports=_not_fpt,
    check=_check_iota_bounds,
)
def _gen_iota_bounds(F, P, rng):
    for _ in range(P.instances):
        n = rng.randint(1, P.max_dim)
        yield {"A": random_gl(F, n, rng).to_json()}


def _check_tensor_blocks(case) -> list:
    F = _field(case)
    a, b = F.decode(case["alpha"]), F.decode(case["beta"])
    s, t = case["s"], case["t"]
    M = kron(Matrix.jordan_block(F, a, s), Matrix.jordan_block(F, b, t))
    jt = jordan_type(M)
    ab = F.mul(a, b)
    bad = []
    comp = jt.component(Polynomial(F, [F.neg(ab), F.one]))
    if len(comp.blocks) != s or jt.block_count() != s:
        bad.append(f"J({F.format(a)},{s}) (x) J({F.format(b)},{t}) has blocks {list(comp.blocks)}")
    if M.scalar_minus(ab).kernel_dim() != s:
        bad.append("eigenspace dimension differs from s")
    return bad


@_register(
    id="thm-tensor-blocks",
    module="jordanlen",
    summary="J(a,s) (x) J(b,t) with s <= t has exactly s Jordan blocks",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 1},
    max_dim=5,
    supports=_not_fpt,
    check=_check_tensor_blocks,
    exhaustive=True,
)
def _gen_tensor_blocks(F, P, rng):
    pool = F.units() if F.is_finite else [F.convert(x) for x in (1, -1, 2)]
    for a in pool:
        for b in pool:
            for s in range(1, P.max_dim + 1):
                for t in range(s, P.max_dim + 1):
                    yield {"alpha": F.encode(a), "beta": F.encode(b), "s": s, "t": t}


def _check_inseparable(case) -> list:
    F = _field(case)
    A = _mat(case["A"], F)
    f = Polynomial.decode(F, case["hint"])
    jt = jordan_type(A, [f])
    comp = jt.component(f)
    bad = list(jt.inseparable_violations())
    if comp.separable or comp.inseparability_degree != case["p_power"]:
        bad.append(f"separability data wrong: {comp.separable}, {comp.inseparability_degree}")
    if sorted(comp.blocks) != sorted(case["expected_blocks"]):
        bad.append(f"blocks {list(comp.blocks)} != expected {case['expected_blocks']}")
    return bad


@_register(
    id="lem-inseparable-blocks",
    module="jordanlen",
    summary="blocks at an inseparable root of f have size e*p^k; p^k when f divides the "
            "minimal polynomial once",
    fields=("F2(t)", "F3(t)"),
    instances={"*": 12},
    max_dim=8,
    supports=_fpt,
    check=_check_inseparable,
)
def _gen_inseparable(F, P, rng):
    p = F.p
    ks = (1, 2) if p == 2 else (1,)
    t = F.t()

    def case(k, u, e, copies, conj):
        q = p**k
        f = Polynomial(F, [F.neg(u)] + [F.zero] * (q - 1) + [F.one])
        C = Matrix.companion(f**e) if e > 1 else Matrix.companion(f)
        A = C
        for _ in range(copies - 1):
            A = direct_sum(A, C)
        if conj:
            T = random_conjugator(F.Fp, A.nrows, rng).map(F, F.convert)
            A = T @ A @ T.inverse()
        return {"A": A.to_json(), "hint": f.encode(), "p_power": q,
                "expected_blocks": [e * q] * copies}

    base = [case(k, t, 1, 1, False) for k in ks]
    yield from base[: P.instances]
    for _ in range(P.instances - len(base)):
        k = rng.choice(ks)
        q = p**k
        u = F.add(F.mul(F.from_int(rng.randrange(1, p)), t), F.from_int(rng.randrange(p)))
        choices = [(e, c) for e in (1, 2) for c in (1, 2) if e * c * q <= P.max_dim]
        e, c = rng.choice(choices)
        yield case(k, u, e, c, rng.random() < 0.5)


def _check_iota_tensor(case) -> list:
    F = _field(case)
    A, B = _mat(case["A"], F), _mat(case["B"], F)
    ia, ib = iota(A)[0], iota(B)[0]
    iab = iota(kron(A, B))[0]
    bad = []
    bound = ia * ib + (1 - ia) * (1 - ib)
    if iab > bound:
        bad.append(f"iota(A(x)B) = {_fmt(iab)} > {_fmt(bound)}")
    if ia <= HALF and ib <= HALF and iab > HALF:
        bad.append(f"closure fails: iota(A(x)B) = {_fmt(iab)} > 1/2")
    return bad


@_register(
    id="lem-iota-tensor",
    module="jordanlen",
    summary="iota(A(x)B) <= iota(A)iota(B) + (1-iota(A))(1-iota(B)); <= 1/2 closure",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 1000},
    max_dim=4,
    supports=_not_fpt,
    check=_check_iota_tensor,
)
def _gen_iota_tensor(F, P, rng):
    for _ in range(P.instances):
        mats = []
        for _ in range(2):
            n = rng.randint(1, P.max_dim)
            gen = Matrix.random_invertible if rng.random() < 0.3 else random_jordan_gl
            mats.append(gen(F, n, rng).to_json())
        yield {"A": mats[0], "B": mats[1]}


def _check_scalar(case) -> list:
    x, x1 = frac_from_json(case["x"]), frac_from_json(case["x1"])
    y, y1 = frac_from_json(case["y"]), frac_from_json(case["y1"])
    if not (0 <= x <= x1 and 0 <= y <= y1):
        return ["case does not satisfy the hypotheses"]
    if x1 * y + y1 * x > x1 * y1 + x * y:
        return [f"x'y + y'x > x'y' + xy at {_fmt(x)}, {_fmt(x1)}, {_fmt(y)}, {_fmt(y1)}"]
    return []


@_register(
    id="lem-scalar-inequality",
    module="jordanlen",
    summary="x' >= x >= 0, y' >= y >= 0 imply x'y + y'x <= x'y' + xy",
    fields=(),
    instances={"*": 10000},
    max_dim=0,
    supports=lambda F: True,
    check=_check_scalar,
)
def _gen_scalar(F, P, rng):
    def r():
        return Fraction(rng.randint(0, 40), rng.randint(1, 12))

    for _ in range(P.instances):
        x, y = r(), r()
        yield {"x": frac_to_json(x), "x1": frac_to_json(x + r()),
               "y": frac_to_json(y), "y1": frac_to_json(y + r())}


def _check_sum_tensor(case) -> list:
    F = _field(case)
    A, B = _mat(case["A"], F), _mat(case["B"], F)
    a = F.decode(case["alpha"])
    n, m = A.nrows, B.nrows
    wa, wb = Fraction(n, n + m), Fraction(m, n + m)
    lrA, lrB = len_rank(A), len_rank(B)
    ljA, ljB = len_jordan(A)[0], len_jordan(B)[0]
    bad = []
    if len_rank(direct_sum(A, B)) != wa * lrA + wb * lrB:
        bad.append("ell_r of a direct sum is not the weighted mean")
    AB = kron(A, B)
    if len_rank(AB) > lrA + lrB:
        bad.append("ell_r(A(x)B) > ell_r(A) + ell_r(B)")
    if len_jordan(AB.scale(a))[0] > ljA + ljB:
        bad.append("ell_J(a(A(x)B)) > ell_J(A) + ell_J(B)")
    aA = A.scale(a)
    S = direct_sum(aA, B)
    ljS = len_jordan(S)[0]
    upper = min(wa + wb * ljB, wa * ljA + wb)
    if ljS > upper:
        bad.append(f"ell_J(aA (+) B) = {_fmt(ljS)} exceeds {_fmt(upper)}")
    # equality when a common witness beta exists
    cands = {F.one} | {F.inv(x) for x in eigenvalues(aA) + eigenvalues(B)}
    for beta in sorted(cands, key=repr):
        if len_rank(aA.scale(beta), check=False) == ljA and len_rank(B.scale(beta), check=False) == ljB:
            if ljS != wa * ljA + wb * ljB:
                bad.append(f"common witness {F.format(beta)} found but equality fails")
            break
    return bad


@_register(
    id="lem-sum-tensor-lengths",
    module="jordanlen",
    summary="ell_r and ell_J of direct sums and tensor products",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 1000},
    max_dim=3,
    supports=_not_fpt,
    check=_check_sum_tensor,
)
def _gen_sum_tensor(F, P, rng):
    for _ in range(P.instances):
        A = random_gl(F, rng.randint(1, P.max_dim), rng)
        B = random_gl(F, rng.randint(1, P.max_dim), rng)
        yield {"A": A.to_json(), "B": B.to_json(), "alpha": F.encode(_unit(F, rng))}


def _check_invariance(case) -> list:
    F = _field(case)
    A, T = _mat(case["A"], F), _mat(case["T"], F)
    c = F.decode(case["c"])
    pi = Permutation(tuple(case["pi"]))
    bad = []
    B = T @ A @ T.inverse()
    if len_rank(B) != len_rank(A):
        bad.append("ell_r not conjugation invariant")
    lj = len_jordan(A)[0]
    if len_jordan(B)[0] != lj:
        bad.append("ell_J not conjugation invariant")
    if len_jordan(A.scale(c))[0] != lj:
        bad.append("ell_J not scalar invariant")
    lh, lr = len_hamming(pi), len_rank(perm_matrix(pi, F))
    if not (lh / 2 <= lr <= lh):
        bad.append(f"ell_H/2 <= ell_r(P) <= ell_H fails: {_fmt(lh)}, {_fmt(lr)}")
    if lr != Fraction(pi.n - pi.num_cycles(), pi.n):
        bad.append("ell_r(P) differs from (n - #cycles)/n")
    return bad


@_register(
    id="prop-length-invariance",
    module="jordanlen",
    summary="conjugation and scalar invariance; ell_H/2 <= ell_r(P_pi) <= ell_H",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 200},
    max_dim=6,
    supports=_not_fpt,
    check=_check_invariance,
)
def _gen_invariance(F, P, rng):
    for _ in range(P.instances):
        n = rng.randint(1, P.max_dim)
        yield {
            "A": random_gl(F, n, rng).to_json(),
            "T": random_conjugator(F, n, rng).to_json(),
            "c": F.encode(_unit(F, rng)),
            "pi": list(Permutation.random(rng.randint(1, 8), rng).images),
        }


# ===========================================================================
# matspace


def _random_rank_deficient(F: Field, r: int, c: int, rng: random.Random) -> Matrix:
    k = rng.randint(0, min(r, c))
    if k == 0:
        return Matrix.zeros(F, r, c)
    return Matrix.random(F, r, k, rng) @ Matrix.random(F, k, c, rng)


def _check_rank_invariance(case) -> list:
    F = _field(case)
    A = _mat(case["A"], F)
    Pm, Qm = _mat(case["P"], F), _mat(case["Q"], F)
    rp, cp = case["row_perm"], case["col_perm"]
    r = A.rank()
    bad = []
    if r + A.kernel_dim() != A.ncols:
        bad.append("rank + kernel dimension != number of columns")
    if (Pm @ A @ Qm).rank() != r:
        bad.append("rank changed under multiplication by invertible matrices")
    perm = Matrix._raw(F, [[A.rows[i][j] for j in cp] for i in rp])
    if perm.rank() != r:
        bad.append("rank changed under row/column permutation")
    return bad


@_register(
    id="mat-rank-invariance",
    module="matspace",
    summary="rank is invariant under permutations and invertible multiplication",
    fields=("F2", "F3", "F5", "F4", "F9", "Q"),
    instances={"*": 500},
    max_dim=8,
    supports=_not_fpt,
    check=_check_rank_invariance,
)
def _gen_rank_invariance(F, P, rng):
    for _ in range(P.instances):
        r, c = rng.randint(1, P.max_dim), rng.randint(1, P.max_dim)
        rp, cp = list(range(r)), list(range(c))
        rng.shuffle(rp)
        rng.shuffle(cp)
        yield {
            "A": _random_rank_deficient(F, r, c, rng).to_json(),
            "P": random_conjugator(F, r, rng).to_json(),
            "Q": random_conjugator(F, c, rng).to_json(),
            "row_perm": rp,
            "col_perm": cp,
        }


def _check_kron_rank(case) -> list:
    F = _field(case)
    A, B = _mat(case["A"], F), _mat(case["B"], F)
    if kron(A, B).rank() != A.rank() * B.rank():
        return ["rank(A (x) B) != rank(A) rank(B)"]
    return []


@_register(
    id="mat-kron-rank",
    module="matspace",
    summary="rank(A (x) B) = rank(A) rank(B)",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 500},
    max_dim=4,
    supports=_not_fpt,
    check=_check_kron_rank,
)
def _gen_kron_rank(F, P, rng):
    for _ in range(P.instances):
        dims = [rng.randint(1, P.max_dim) for _ in range(4)]
        yield {"A": _random_rank_deficient(F, dims[0], dims[1], rng).to_json(),
               "B": _random_rank_deficient(F, dims[2], dims[3], rng).to_json()}


def _check_kron_kernel(case) -> list:
    F = _field(case)
    A, B = _mat(case["A"], F), _mat(case["B"], F)
    one = F.one
    k = kron(A, B).scalar_minus(one).kernel_dim()
    ka, kb = A.scalar_minus(one).kernel_dim(), B.scalar_minus(one).kernel_dim()
    if k < ka * kb:
        return [f"dim ker(1 - A(x)B) = {k} < {ka}*{kb}"]
    return []


@_register(
    id="mat-kron-kernel",
    module="matspace",
    summary="dim ker(1 - A(x)B) >= dim ker(1-A) dim ker(1-B)",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 500},
    max_dim=4,
    supports=_not_fpt,
    check=_check_kron_kernel,
)
def _gen_kron_kernel(F, P, rng):
    for _ in range(P.instances):
        yield {"A": random_jordan_gl(F, rng.randint(1, P.max_dim), rng).to_json(),
               "B": random_jordan_gl(F, rng.randint(1, P.max_dim), rng).to_json()}


def _check_restrict_kernel(case) -> list:
    L = _field(case)
    A, B = _mat(case["A"], L), _mat(case["B"], L)
    d = L.degree
    Ar = restrict_scalars(A)
    bad = []
    k_big = Ar.scalar_minus(Ar.field.one).kernel_dim()
    k = A.scalar_minus(L.one).kernel_dim()
    if k_big != d * k:
        bad.append(f"dim_K ker(1-A') = {k_big} != {d}*{k}")
    if restrict_scalars(A @ B) != Ar @ restrict_scalars(B):
        bad.append("restriction of scalars is not multiplicative")
    return bad


@_register(
    id="mat-restrict-kernel",
    module="matspace",
    summary="dim_K ker(1-A') = [L:K] dim_L ker(1-A); restriction is multiplicative",
    fields=("F4", "F9", "F8"),
    instances={"*": 500},
    max_dim=4,
    supports=_extension,
    check=_check_restrict_kernel,
)
def _gen_restrict_kernel(F, P, rng):
    for _ in range(P.instances):
        n = rng.randint(1, P.max_dim)
        yield {"A": random_gl(F, n, rng).to_json(), "B": random_gl(F, n, rng).to_json()}


# ===========================================================================
# amplify

EPS_CHOICES = tuple(Fraction(1, d) for d in (100, 64, 32, 20, 16, 10, 8))
AMPLIFY_DELTAS = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2))


def _amplify_reps(F: Field):
    names = ["C2", "C3", "C4", "S3"]
    if F.characteristic != 2:
        names.append("C2-scalar")
    return names


def _amplify_rep(name: str, F: Field, rng) -> AlmostHom:
    if name == "C2-scalar":
        G = small_group("C2")
        return hom_from_exact_rep(G, {"a": Matrix.scalar(F, 2, F.from_int(-1))})
    return conjugated(two_dim_rep(name, F), rng)


def _check_amplification(case) -> list:
    phi = hom_from_manifest(case["hom"])
    delta, eps = frac_from_json(case["delta"]), frac_from_json(case["eps"])
    cap = case["dim_cap"]
    bad = []
    for mode, key in (("jordan", "m_jordan"), ("rank", "m_rank")):
        m = case[key]
        if m is None:
            continue
        src = phi.replace(mode=mode)
        if defect(src) > eps / 2**m:
            bad.append(f"{mode}: input defect exceeds 2^-m eps")
            continue
        sep0 = min_separation(src)
        if sep0 < delta:
            bad.append(f"{mode}: input separation below delta")
            continue
        if mode == "jordan":
            res, _ = tensor_square_iterate(src, m, cap, delta, eps, track_iota=True)
            floor = QUARTER - eps
        else:
            res, _ = rank_amplify(src, m, cap, delta, eps)
            floor = EIGHTH - eps
        sep, d = min_separation(res), defect(res)
        if sep < floor:
            bad.append(f"{mode}: separation {_fmt(sep)} < {_fmt(floor)}")
        if d > eps:
            bad.append(f"{mode}: defect {_fmt(d)} > eps")
    return bad


@_register(
    id="thm-amplification",
    module="amplify",
    summary="tensor squaring reaches 1/4 - eps (Jordan), the padded variant 1/8 - eps (rank)",
    fields=("F3", "F5"),
    instances={"*": 12},
    max_dim=2,
    supports=_not_fpt,
    check=_check_amplification,
)
def _gen_amplification(F, P, rng):
    for i in range(P.instances):
        delta = AMPLIFY_DELTAS[i % len(AMPLIFY_DELTAS)]
        names = _amplify_reps(F)
        name = names[(i // len(AMPLIFY_DELTAS)) % len(names)]
        phi = _amplify_rep(name, F, rng)
        n = phi.dim
        sep_j = min_separation(phi.replace(mode="jordan"))
        sep_r = min_separation(phi)

        def pick(fits):
            for e in EPS_CHOICES:
                if fits(e):
                    return e
            return None

        eps = pick(lambda e: n ** (2 ** f_schedule(delta, e)) <= P.dim_cap
                   and 2 * n ** (2 ** f_schedule(delta, 2 * e)) <= P.dim_cap)
        if eps is None:
            continue
        yield {
            "hom": hom_to_json(phi),
            "rep": name,
            "delta": frac_to_json(delta),
            "eps": frac_to_json(eps),
            "m_jordan": f_schedule(delta, eps) if sep_j >= delta else None,
            "m_rank": f_schedule(delta, 2 * eps) if sep_r >= delta else None,
            "dim_cap": P.dim_cap,
        }


def _base_rep(F: Field, rng, max_dim: int) -> AlmostHom:
    name = rng.choice(SMALL_GROUPS)
    if name in ("C2", "C3", "C4", "S3") and rng.random() < 0.5:
        phi = two_dim_rep(name, F)
    else:
        phi = permutation_rep(name, F)
    extra = rng.randint(0, max(0, max_dim - phi.dim))
    return conjugated(padded_rep(phi, extra), rng)


def _check_conversion(case) -> list:
    bad = []
    phi = hom_from_manifest(case["rank_hom"])
    eps_p = frac_from_json(case["eps_projective"])
    psi = to_projective(phi, eps_p)
    for g in psi.window.elements:
        if len_rank(psi[g], check=False) != len_jordan(psi[g], check=False)[0]:
            bad.append(f"to_projective: ell_J != ell_r at {psi.window.name(g)}")
    s_in, s_out = min_separation(phi), min_separation(psi)
    if s_in is not None and s_out < s_in / 2:
        bad.append("to_projective: separation below half")
    if defect(psi) > eps_p / 2:
        bad.append("to_projective: Jordan defect above eps/2")

    chi = hom_from_manifest(case["jordan_hom"])
    eps_r = frac_from_json(case["eps_rank"])
    rho = to_rank(chi, eps_r)
    if defect(rho) > eps_r:
        bad.append("to_rank: rank defect above eps")
    w = rho.window
    for (g, h), gh in w.products.items():
        lr = rho.triple_length(g, h, gh)
        lj = Fraction(0) if lr == 0 else len_jordan(rho[g] @ rho[h] @ rho[gh].inverse())[0]
        if lr != lj:
            bad.append(f"to_rank: triple ({w.name(g)},{w.name(h)}) has ell_r != ell_J")
    for g in w.elements:
        if len_rank(rho[g], check=False) < len_jordan(rho[g], check=False)[0]:
            bad.append(f"to_rank: ell_r(psi) < ell_J(psi) at {w.name(g)}")
    # the direct-product estimate: separation at least min(delta/4, 1/4)
    s_chi = min_separation(chi)
    if s_chi is not None and min_separation(rho) < min(s_chi / 4, QUARTER):
        bad.append("to_rank: separation below min(delta/4, 1/4)")

    if case.get("round_trip"):
        d = defect(psi)
        eps_rt = 2 * d if d else Fraction(1, 8)
        back = to_rank(psi, eps_rt)
        if s_out is not None and min_separation(back) < min(s_out / 4, QUARTER):
            bad.append("round trip: separation below min(delta/8, 1/4)")
    return bad


@_register(
    id="thm-conversion",
    module="amplify",
    summary="to_projective gives ell_J = ell_r; to_rank keeps defect with ell_r = ell_J on triples",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 50},
    max_dim=6,
    supports=_not_fpt,
    check=_check_conversion,
)
def _gen_conversion(F, P, rng):
    kinds = ("exact", "perturbed", "projective")
    made = 0
    while made < P.instances:
        kind = kinds[made % 3]
        phi = _base_rep(F, rng, P.max_dim)
        if kind == "perturbed":
            phi = perturb(padded_rep(phi, max(0, 5 - phi.dim)), rng.choice(phi.window.non_identity()), rng)
        d = defect(phi)
        if d >= HALF:
            continue
        eps_p = d if d else Fraction(1, 16)
        chi = _base_rep(F, rng, P.max_dim).replace(mode="jordan")
        if kind == "projective":
            chi = scalar_twist(chi, rng)
        elif kind == "perturbed" and F.is_finite:
            small = padded_rep(two_dim_rep(rng.choice(["C2", "C3"]), F, "jordan"), 15)
            chi = perturb(conjugated(small, rng), rng.choice(small.window.non_identity()), rng)
        dj = defect(chi)
        if dj * 8 >= 1:
            continue
        eps_r = 2 * dj if dj else Fraction(1, 8)
        psi_dim = 2 * phi.dim
        yield {
            "kind": kind,
            "rank_hom": hom_to_json(phi),
            "eps_projective": frac_to_json(eps_p),
            "jordan_hom": hom_to_json(chi),
            "eps_rank": frac_to_json(eps_r),
            "round_trip": d * 4 < 1 and (F.is_finite or psi_dim <= 8),
        }
        made += 1


def _check_restriction(case) -> list:
    phi = hom_from_manifest(case["hom"])
    out = restrict_hom(phi)
    bad = []
    w = phi.window
    for g in w.elements:
        if len_rank(out[g]) != len_rank(phi[g]):
            bad.append(f"ell_r changed at {w.name(g)}")
    if defect(out) != defect(phi):
        bad.append("defect changed")
    if out.dim != phi.dim * phi.field.degree:
        bad.append("dimension is not n [L:K]")
    return bad


@_register(
    id="lem-restriction",
    module="amplify",
    summary="restriction of scalars preserves every rank length of an almost hom",
    fields=("F4", "F9", "F8"),
    instances={"*": 40},
    max_dim=4,
    supports=_extension,
    check=_check_restriction,
)
def _gen_restriction(F, P, rng):
    for _ in range(P.instances):
        phi = _base_rep(F, rng, P.max_dim)
        if rng.random() < 0.5:
            phi = perturb(phi, rng.choice(phi.window.non_identity()), rng)
        yield {"hom": hom_to_json(phi)}


def _poly_elt(K: RationalFunctionField, rng, deg: int):
    return K.make(tuple(rng.randrange(K.p) for _ in range(deg + 1)))


def _check_specialization(case) -> list:
    phi = hom_from_manifest(case["hom"])
    sp = specialize_hom(phi)
    out = sp.hom
    bad = []
    w = phi.window
    for g in w.elements:
        if len_rank(out[g]) != len_rank(phi[g]):
            bad.append(f"ell_r changed at {w.name(g)}")
    if defect(out) > defect(phi):
        bad.append("defect increased")
    return bad


@_register(
    id="thm-specialization",
    module="amplify",
    summary="an algebraic specialization of t keeps every ell_r and does not raise the defect",
    fields=("F2(t)",),
    instances={"*": 100},
    max_dim=4,
    supports=_fpt,
    check=_check_specialization,
)
def _gen_specialization(K, P, rng):
    Fp = K.Fp
    for _ in range(P.instances):
        base = permutation_rep(rng.choice(["C2", "C3", "S3", "C2xC2"]), Fp)
        if base.dim > P.max_dim:
            base = two_dim_rep("S3", Fp)
        n = base.dim
        T = Matrix._raw(K, [[_poly_elt(K, rng, rng.randint(0, 2)) if j > i else
                             (K.one if i == j else K.zero) for j in range(n)] for i in range(n)])
        phi = AlmostHom(base.window, {g: T @ M.map(K, K.convert) @ T.inverse()
                                      for g, M in base.images.items()}, "rank", check=False)
        if rng.random() < 0.7:
            z = rng.choice(phi.window.non_identity())
            while True:
                den = [rng.randrange(Fp.p) for _ in range(rng.randint(1, 3))] + [1]
                u = [K.make(tuple(rng.randrange(Fp.p) for _ in range(3)), tuple(den))
                     for _ in range(n)]
                v = [K.from_int(rng.randrange(Fp.p)) for _ in range(n)]
                X = Matrix._raw(K, [[K.add(K.one if i == j else K.zero, K.mul(u[i], v[j]))
                                     for j in range(n)] for i in range(n)])
                if X.is_invertible() and not X.is_identity():
                    break
            images = dict(phi.images)
            images[z] = phi[z] @ X
            if rng.random() < 0.3:
                y = rng.choice(phi.window.non_identity())
                images[y] = images[y].scale(K.t())
            phi = phi.replace(images)
        yield {"hom": hom_to_json(phi)}


# ===========================================================================
# almosthom


def _check_repairs(case) -> list:
    bad = []
    phi = hom_from_manifest(case["normalize_hom"])
    eps = frac_from_json(case["eps_normalize"])
    out = normalize_identity(phi, eps)
    w = phi.window
    if not out.is_normalized():
        bad.append("normalize_identity: phi(1) is not the identity")
    if any(out[g] != phi[g] for g in w.non_identity()):
        bad.append("normalize_identity changed a non-identity image")
    if defect(out) > eps or out.dim != phi.dim or out.window is not phi.window:
        bad.append("normalize_identity: defect or shape contract fails")

    phi = hom_from_manifest(case["adapt_hom"])
    eps = frac_from_json(case["eps_adapt"])
    out = adapt_inverses(phi, eps)
    w = phi.window
    one = Matrix.identity(phi.field, phi.dim)
    for g in w.elements:
        if g != w.identity and not w.order2(g) and out[g] @ out[w.inverse(g)] != one:
            bad.append(f"adapt_inverses: phi(g^-1) != phi(g)^-1 at {w.name(g)}")
    part = inverse_partition(w)
    if any(out[g] != phi[g] for g in part.F0 + part.F1):
        bad.append("adapt_inverses changed an image outside F_-1")
    if defect(out) > eps or out.dim != phi.dim:
        bad.append("adapt_inverses: defect or shape contract fails")
    return bad


@_register(
    id="lem-repairs",
    module="almosthom",
    summary="normalize_identity and adapt_inverses at most double the defect",
    fields=("F2", "F3", "F5", "Q"),
    instances={"*": 50},
    max_dim=6,
    supports=_not_fpt,
    check=_check_repairs,
)
def _gen_repairs(F, P, rng):
    for _ in range(P.instances):
        mode = rng.choice(("rank", "jordan"))
        phi = padded_rep(_base_rep(F, rng, P.max_dim), 0).replace(mode=mode)
        nz = perturb(phi, phi.window.identity, rng)
        d = defect(nz)
        eps_n = 2 * d if d else Fraction(1, phi.dim)
        w = phi.window
        movable = [g for g in w.non_identity() if not w.order2(g)] or w.non_identity()
        ad = perturb(phi, rng.choice(movable), rng)
        d = defect(ad)
        eps_a = 2 * d if d else Fraction(1, phi.dim)
        yield {
            "normalize_hom": hom_to_json(nz),
            "eps_normalize": frac_to_json(eps_n),
            "adapt_hom": hom_to_json(ad),
            "eps_adapt": frac_to_json(eps_a),
        }


# ===========================================================================
# freeprod


def _check_translation(case) -> list:
    F = _field(case)
    blocks = [_mat(b, F) for b in case["blocks"]]
    m = blocks[0].nrows
    bad = []
    for key in ("pi", "pi_fixed"):
        pi = Permutation(tuple(case[key]))
        M = translation_matrix(pi, blocks)
        r = M.scalar_minus(F.one).rank()
        bound = Fraction((pi.n - pi.fixed_points()) * m, 2)
        if r < bound:
            bad.append(f"{key}: rank {r} < {_fmt(bound)}")
        if translation_rank_bound(pi, blocks) != (r, bound):
            bad.append(f"{key}: translation_rank_bound disagrees with a direct rank")
    return bad


@_register(
    id="lem-translation-rank",
    module="freeprod",
    summary="rank(1 - (P_pi (x) 1_m) A) >= (n - f) m / 2",
    fields=("F2", "F5"),
    instances={"*": 500},
    max_dim=64,
    supports=_not_fpt,
    check=_check_translation,
)
def _gen_translation(F, P, rng):
    for _ in range(P.instances):
        n = rng.randint(2, min(16, P.max_dim // 1))
        m = rng.randint(1, max(1, P.max_dim // n))
        pi = Permutation.random_derangement(n, rng)
        f = rng.randint(1, n - 1)
        if n - f == 1:
            f -= 1
        moved = rng.sample(range(n), n - f)
        sub = Permutation.random_derangement(len(moved), rng) if moved else None
        img = list(range(n))
        for i, x in enumerate(moved):
            img[x] = moved[sub(i)]
        yield {
            "pi": list(pi.images),
            "pi_fixed": img,
            "blocks": [random_gl(F, m, rng).to_json() for _ in range(n)],
        }


FREEPROD_PAIRS = (("C2", "C2"), ("C2", "C3"))


def _faithful_rep(name: str, F: Field) -> AlmostHom:
    if name == "C2" and F.characteristic != 2:
        return hom_from_exact_rep(small_group("C2"), {"a": Matrix.scalar(F, 1, F.from_int(-1))})
    return two_dim_rep(name, F)


def _check_free_product(case) -> list:
    phi = hom_from_manifest(case["phi"])
    psi = hom_from_manifest(case["psi"])
    G1, G2 = small_group(case["G1"]), small_group(case["G2"])
    r, L = case["r"], case["L"]
    theta = frac_from_json(case["theta"])
    bad = []
    Q = build_separating_quotient(G1, G2, L, theta, seed=case["seed"])
    fp = FreeProduct(G1, G2)
    words = [w for w in fp.words(L) if w]
    if set(Q.fixed_points) != set(words):
        bad.append("certificate does not cover every nontrivial word of length <= L")
    for w in words:
        p = Q.image(w)
        if p.is_identity() or Fraction(p.fixed_points(), Q.N) > theta:
            bad.append(f"word {fp.name(w)} is not separated")
    # re-key the factor homs by the group elements of G1, G2
    phi_g = AlmostHom(window_from_finite_group(G1), _by_elt(G1, phi), "rank", check=False)
    psi_g = AlmostHom(window_from_finite_group(G2), _by_elt(G2, psi), "rank", check=False)
    z = zeta_build(phi_g, psi_g, Q, r)
    zeta = z.hom
    if z.defect != 0:
        bad.append(f"zeta defect {_fmt(z.defect)} != 0")
    floor = HALF * (1 - theta)
    if z.min_separation < floor:
        bad.append(f"min ell_J(zeta) = {_fmt(z.min_separation)} < {_fmt(floor)}")
    w = zeta.window
    one = Matrix.identity(zeta.field, zeta.dim)
    if zeta[w.identity] != one:
        bad.append("zeta(1) is not the identity")
    for g in w.non_identity():
        if zeta[g] @ zeta[w.inverse(g)] != one:
            bad.append(f"zeta_g zeta_g^-1 != 1 at {w.name(g)}")
        a, b = fp.retraction(g)
        block = direct_sum(phi_g[a], psi_g[b])
        n = block.nrows
        sigma = translation_matrix(Q.image(g), [Matrix.identity(zeta.field, n)] * Q.N)
        tilde = translation_matrix(Permutation.identity(Q.N), [block] * Q.N)
        if sigma @ tilde != tilde @ sigma:
            bad.append(f"sigma does not commute with the block action at {w.name(g)}")
    return bad


def _by_elt(G, phi):
    names = {phi.window.name(g): g for g in phi.window.elements}
    return {x: phi[names[G.name(x)]] for x in G.elements}


@_register(
    id="lem-free-product",
    module="freeprod",
    summary="zeta on a separating quotient has defect 0 and ell_J >= (1 - theta)/2",
    fields=("Q", "F5"),
    instances={"*": 1},
    max_dim=0,
    supports=_not_fpt,
    check=_check_free_product,
)
def _gen_free_product(F, P, rng):
    r = 2
    for i in range(P.instances):
        for g1, g2 in FREEPROD_PAIRS:
            yield {
                "G1": g1,
                "G2": g2,
                "phi": hom_to_json(_faithful_rep(g1, F)),
                "psi": hom_to_json(_faithful_rep(g2, F)),
                "r": r,
                "L": 4 * r,
                "theta": frac_to_json(Fraction(1, 8)),
                "seed": rng.randrange(2**32),
            }


# ===========================================================================
# driver


@dataclass
class VerifyConfig:
    suites: list
    seed: int
    fields: list | None = None
    instances: int | None = None
    max_dim: int | None = None
    dim_cap: int = DEFAULT_DIM_CAP
    out: str | None = None
    overrides: dict = field(default_factory=dict)
    max_violations: int = 50

    @classmethod
    def from_json(cls, obj) -> "VerifyConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {"suites", "seed", "fields", "instances", "max_dim", "dim_cap", "out",
                 "overrides", "max_violations"}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        suites = obj.get("suites", "all")
        if suites == "all":
            suites = list(SUITES)
        if isinstance(suites, str):
            suites = [suites]
        cfg = cls(
            suites=list(suites),
            seed=obj.get("seed"),
            fields=obj.get("fields"),
            instances=obj.get("instances"),
            max_dim=obj.get("max_dim"),
            dim_cap=obj.get("dim_cap", DEFAULT_DIM_CAP),
            out=obj.get("out"),
            overrides=obj.get("overrides", {}),
            max_violations=obj.get("max_violations", 50),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not self.suites:
            raise ConfigError("no suites selected")
        for sid in self.suites:
            if sid not in SUITES:
                raise ConfigError(f"unknown suite {sid!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("a nonnegative integer seed is mandatory")
        for key in ("instances", "max_dim"):
            v = getattr(self, key)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"{key} must be a positive integer")
        if not isinstance(self.dim_cap, int) or self.dim_cap < 1:
            raise ConfigError("dim_cap must be a positive integer")
        if not isinstance(self.overrides, dict):
            raise ConfigError("overrides must map suite ids to settings")
        for sid, ov in self.overrides.items():
            if sid not in SUITES:
                raise ConfigError(f"override for unknown suite {sid!r}")
            if not isinstance(ov, dict) or set(ov) - {"fields", "instances", "max_dim"}:
                raise ConfigError(f"bad override for {sid}")
            for key in ("instances", "max_dim"):
                v = ov.get(key)
                if v is not None and (not isinstance(v, int) or v < 1):
                    raise ConfigError(f"{sid}: {key} must be a positive integer")
        for sid in self.suites:
            self.plan(sid)

    def plan(self, sid: str) -> list[tuple[Field | None, str, Params]]:
        """``(field, label, params)`` per field the suite will run on."""
        suite = SUITES[sid]
        ov = self.overrides.get(sid, {})
        descs = ov.get("fields", self.fields)
        max_dim = ov.get("max_dim", self.max_dim) or suite.max_dim
        inst = ov.get("instances", self.instances)
        if not suite.fields:
            return [(None, "-", Params(inst or suite.default_instances("-"), max_dim, self.dim_cap))]
        if descs is None:
            descs = list(suite.fields)
        if not isinstance(descs, list) or not descs:
            raise ConfigError(f"{sid}: fields must be a nonempty list")
        out = []
        for desc in descs:
            try:
                F = parse_field(desc)
            except LinsoficError as exc:
                raise ConfigError(str(exc)) from exc
            if not suite.supports(F):
                raise ConfigError(f"suite {sid} does not support the field {field_label(F)}")
            label = field_label(F)
            out.append((F, label, Params(inst or suite.default_instances(label), max_dim,
                                         self.dim_cap)))
        return out


def check_case(suite: Suite, case: dict) -> list[str]:
    """Run a suite's check, turning raised bound violations and errors into messages."""
    try:
        return [str(m) for m in suite.check(case)]
    except BoundViolation as exc:
        det = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(exc.details.items()))
        return [f"bound violation: {exc}" + (f" ({det})" if det else "")]
    except Exception as exc:  # a crash on valid input is a failure too
        return [f"{type(exc).__name__}: {exc}"]


def run_suite(suite: Suite, plan, seed: int, max_violations: int = 50) -> dict:
    t0 = time.perf_counter()
    per_field, violations = {}, []
    total = bad_total = 0
    for F, label, P in plan:
        rng = random.Random(f"{seed}:{suite.id}:{label}")
        count = bad = 0
        for idx, case in enumerate(suite.generate(F, P, rng)):
            if F is not None:
                case = {"field": F.descriptor(), **case}
            msgs = check_case(suite, case)
            count += 1
            if msgs:
                bad += 1
                if len(violations) < max_violations:
                    violations.append({"field": label, "index": idx, "messages": msgs,
                                       "case": case})
        per_field[label] = {"instances": count, "violations": bad}
        total += count
        bad_total += bad
    return {
        "id": suite.id,
        "module": suite.module,
        "summary": suite.summary,
        "exhaustive": suite.exhaustive,
        "fields": per_field,
        "instances": total,
        "violation_count": bad_total,
        "violations": violations,
        "pass": bad_total == 0,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


def run_verify(cfg: VerifyConfig, progress: Callable[[dict], None] | None = None) -> dict:
    t0 = time.perf_counter()
    results = []
    for sid in cfg.suites:
        res = run_suite(SUITES[sid], cfg.plan(sid), cfg.seed, cfg.max_violations)
        results.append(res)
        if progress:
            progress(res)
    return {
        "seed": cfg.seed,
        "dim_cap": cfg.dim_cap,
        "suites": results,
        "pass": all(r["pass"] for r in results),
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


TIMING_KEYS = ("wall_time_s",)


def strip_timing(obj):
    """Copy of a report without timing fields (for byte-level comparison)."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def replay(report: dict) -> list[dict]:
    """Re-run every stored counterexample; each entry records whether the
    same messages came back."""
    out = []
    for res in report.get("suites", []):
        suite = SUITES.get(res.get("id"))
        if suite is None:
            raise ConfigError(f"unknown suite {res.get('id')!r} in report")
        for v in res.get("violations", []):
            msgs = check_case(suite, v["case"])
            out.append({"suite": suite.id, "field": v.get("field"), "index": v.get("index"),
                        "messages": msgs, "reproduced": msgs == v.get("messages")})
    return out
