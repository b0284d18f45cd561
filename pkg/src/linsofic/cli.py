"""Command-line driver.

Exit status: 0 when everything checked holds, 1 when a bound or suite fails,
2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .almosthom import (
    AlmostHom,
    FiniteGroup,
    min_separation,
    regular_rep,
    separation,
    window_from_finite_group,
)
from .amplify import (
    DEFAULT_DIM_CAP,
    rank_amplify,
    restrict_hom,
    specialize_hom,
    tensor_square_iterate,
    to_projective,
    to_rank,
)
from .errors import BoundViolation, LinsoficError
from .freeprod import build_separating_quotient, zeta_build
from .jordanlen import f_schedule, iota_report
from .matrix import Matrix
from .randgen import SMALL_GROUPS, parse_field, small_group
from .serialize import (
    InputError,
    dumps,
    frac_to_json,
    hom_from_manifest,
    is_hom_manifest,
    is_matrix,
    load_group,
    load_hom,
    read_json,
    save_hom,
    write_json,
)
from .suites import ConfigError, VerifyConfig, replay, run_verify

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _emit(obj, out: str | None) -> None:
    if out:
        write_json(obj, out)
    else:
        sys.stdout.write(dumps(obj))


def _fr(x):
    return frac_to_json(x) if x is not None else None


# --- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.replay:
        results = replay(read_json(args.replay))
        ok = all(r["reproduced"] for r in results)
        _emit({"replayed": results, "all_reproduced": ok}, args.out)
        return EXIT_OK if ok else EXIT_VIOLATION
    if not args.config:
        raise ConfigError("verify needs --config (or --replay)")
    obj = read_json(args.config)
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    obj = dict(obj)
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.dim_cap is not None:
        obj["dim_cap"] = args.dim_cap
    cfg = VerifyConfig.from_json(obj)

    def progress(res):
        state = "pass" if res["pass"] else "FAIL"
        print(f"{res['id']}: {state} ({res['instances']} instances, "
              f"{res['violation_count']} violations, {res['wall_time_s']}s)", file=sys.stderr)

    report = run_verify(cfg, progress)
    _emit(report, args.out or cfg.out)
    return EXIT_OK if report["pass"] else EXIT_VIOLATION


# --- report ------------------------------------------------------------------


def compute_report(path) -> tuple[dict, bool]:
    """Length report for a matrix file, quality report for a manifest."""
    path = Path(path)
    obj = read_json(path)
    if is_matrix(obj):
        rep = iota_report(Matrix.from_json(obj))
        bad = rep.check_invariants()
        return {"kind": "matrix", **rep.to_json(), "violations": bad}, not bad
    if is_hom_manifest(obj):
        phi = hom_from_manifest(obj, path.parent)
        q = separation(phi)
        return {"kind": "almost_hom", "mode": phi.mode, "dim": phi.dim,
                "field": phi.field.descriptor(), **q.to_json(phi.window)}, True
    raise InputError(f"{path} is neither a matrix nor an almost-homomorphism manifest")


def cmd_report(args) -> int:
    out, ok = compute_report(args.input)
    _emit(out, args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


# --- constructions ---------------------------------------------------------------


def _need_out(args, verb: str) -> Path:
    if not args.out:
        raise InputError(f"{verb} writes an almost homomorphism; pass --out <manifest.json>")
    return Path(args.out)


def _hom_summary(phi: AlmostHom) -> dict:
    q = separation(phi)
    return {"dim": phi.dim, "mode": phi.mode, "defect": _fr(q.defect),
            "min_separation": _fr(q.min_separation)}


def cmd_amplify(args) -> int:
    out = _need_out(args, "amplify")
    phi = load_hom(args.input)
    cap = args.dim_cap or DEFAULT_DIM_CAP
    delta = args.delta if args.delta is not None else min_separation(phi)
    if delta is None or delta <= 0:
        raise InputError("input separation is zero; pass --delta explicitly")
    eps = args.eps
    rank_mode = phi.mode == "rank"
    m = args.m if args.m is not None else f_schedule(delta, 2 * eps if rank_mode else eps)
    if rank_mode:
        res, trace = rank_amplify(phi, m, cap, delta, eps)
    else:
        res, trace = tensor_square_iterate(phi, m, cap, delta, eps)
    save_hom(res, out)
    sys.stdout.write(dumps({"m": m, "delta": _fr(delta), "eps": _fr(eps),
                            "trace": trace.to_json(), "output": _hom_summary(res)}))
    return EXIT_OK


def cmd_convert(args) -> int:
    out = _need_out(args, "convert")
    phi = load_hom(args.input)
    res = to_projective(phi, args.eps) if phi.mode == "rank" else to_rank(phi, args.eps)
    save_hom(res, out)
    sys.stdout.write(dumps({"from": phi.mode, "to": res.mode, "output": _hom_summary(res)}))
    return EXIT_OK


def cmd_restrict(args) -> int:
    out = _need_out(args, "restrict")
    phi = load_hom(args.input)
    res = restrict_hom(phi)
    save_hom(res, out)
    sys.stdout.write(dumps({"field": res.field.descriptor(), "output": _hom_summary(res)}))
    return EXIT_OK


def cmd_specialize(args) -> int:
    out = _need_out(args, "specialize")
    phi = load_hom(args.input)
    sp = specialize_hom(phi, degree=args.degree)
    save_hom(sp.hom, out)
    sys.stdout.write(dumps({
        "field": sp.hom.field.descriptor(),
        "point": sp.point.encode(),
        "avoided_polynomials": len(sp.avoid),
        "output": _hom_summary(sp.hom),
    }))
    return EXIT_OK


def _group(ref: str) -> FiniteGroup:
    if ref in SMALL_GROUPS:
        return small_group(ref)
    return load_group(ref)


def _factor_hom(G: FiniteGroup, manifest: str | None, field) -> AlmostHom:
    """A homomorphism on the full window of ``G``, keyed by its elements."""
    win = window_from_finite_group(G)
    if manifest is None:
        return regular_rep(G, field, "rank")
    phi = load_hom(manifest)
    names = {phi.window.name(g): g for g in phi.window.elements}
    try:
        images = {x: phi[names[G.name(x)]] for x in G.elements}
    except KeyError as exc:
        raise InputError(f"{manifest} has no image for element {exc.args[0]!r}") from exc
    return AlmostHom(win, images, "rank")


def cmd_freeprod(args) -> int:
    G1, G2 = _group(args.group1), _group(args.group2)
    F = parse_field(args.field)
    phi = _factor_hom(G1, args.phi, F)
    psi = _factor_hom(G2, args.psi, F)
    r = args.r
    L = args.L if args.L is not None else 4 * r
    seed = args.seed if args.seed is not None else 0
    Q = build_separating_quotient(G1, G2, L, args.theta, seed=seed, max_N=args.max_n)
    z = zeta_build(phi, psi, Q, r, dim_cap=args.dim_cap or DEFAULT_DIM_CAP)
    floor = Fraction(1, 2) * (1 - args.theta)
    ok = z.defect == 0 and z.min_separation is not None and z.min_separation >= floor
    outdir = Path(args.out or ".")
    save_hom(z.hom, outdir / "zeta.json")
    cert = {
        "factors": [_group_json_name(args.group1), _group_json_name(args.group2)],
        "r": r,
        "quotient": Q.to_json(),
        "zeta": {"dim": z.hom.dim, "defect": _fr(z.defect),
                 "min_separation": _fr(z.min_separation), "floor": _fr(floor),
                 "skipped_pairs": z.skipped_pairs},
        "pass": ok,
    }
    write_json(cert, outdir / "certificate.json")
    sys.stdout.write(dumps(cert))
    return EXIT_OK if ok else EXIT_VIOLATION


def _group_json_name(ref: str) -> str:
    return ref if ref in SMALL_GROUPS else Path(ref).name


def cmd_schedule(args) -> int:
    m = f_schedule(args.delta, args.eps)
    sys.stdout.write(dumps({"delta": _fr(args.delta), "eps": _fr(args.eps), "m": m}))
    return EXIT_OK


# --- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linsofic", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, seed=False, cap=False):
        p.add_argument("--out", help="output path")
        if seed:
            p.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
        if cap:
            p.add_argument("--dim-cap", type=int, dest="dim_cap", help="largest allowed dimension")
        return p

    p = common(sub.add_parser("verify", help="run verification suites"), seed=True, cap=True)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--replay", help="re-run the counterexamples stored in a report")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("report", help="length or quality report of a file"))
    p.add_argument("input")
    p.set_defaults(func=cmd_report)

    p = common(sub.add_parser("amplify", help="amplify the separation of an almost hom"), cap=True)
    p.add_argument("input")
    p.add_argument("--eps", type=_fraction, required=True)
    p.add_argument("--delta", type=_fraction, help="defaults to the input separation")
    p.add_argument("--m", type=int, help="number of squarings (default from the schedule)")
    p.set_defaults(func=cmd_amplify)

    p = common(sub.add_parser("convert", help="switch between rank and Jordan mode"))
    p.add_argument("input")
    p.add_argument("--eps", type=_fraction, required=True)
    p.set_defaults(func=cmd_convert)

    p = common(sub.add_parser("restrict", help="restrict scalars to the prime field"))
    p.add_argument("input")
    p.set_defaults(func=cmd_restrict)

    p = common(sub.add_parser("specialize", help="specialize an F_p(t) almost hom"))
    p.add_argument("input")
    p.add_argument("--degree", type=int, default=1, help="starting extension degree")
    p.set_defaults(func=cmd_specialize)

    p = common(sub.add_parser("freeprod", help="separating quotient and zeta for G1 * G2"),
               seed=True, cap=True)
    p.add_argument("group1", help="group table file or one of " + ", ".join(SMALL_GROUPS))
    p.add_argument("group2")
    p.add_argument("--field", default="Q")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--L", type=int, help="word length to certify (default 4r)")
    p.add_argument("--theta", type=_fraction, default=Fraction(1, 8))
    p.add_argument("--max-n", type=int, dest="max_n", default=4096)
    p.add_argument("--phi", help="manifest of a representation of group1")
    p.add_argument("--psi", help="manifest of a representation of group2")
    p.set_defaults(func=cmd_freeprod)

    p = sub.add_parser("schedule", help="number of squarings for (delta, eps)")
    p.add_argument("--delta", type=_fraction, required=True)
    p.add_argument("--eps", type=_fraction, required=True)
    p.set_defaults(func=cmd_schedule)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BoundViolation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (LinsoficError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
