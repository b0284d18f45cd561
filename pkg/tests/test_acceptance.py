"""Acceptance run: every criterion at its stated size, zero tolerance.

Each test prints one ``criterion N: PASS|FAIL ...`` line. Run directly with
``python tests/test_acceptance.py`` for the bare summary.
"""

from __future__ import annotations

import sys
import time

import pytest

from linsofic.fields import FpT
from linsofic.jordanlen import jordan_type
from linsofic.matrix import Matrix
from linsofic.poly import Polynomial
from linsofic.serialize import dumps
from linsofic.suites import SUITES, VerifyConfig, run_verify, strip_timing

SEED = 20240611

_capsys = None


@pytest.fixture(autouse=True)
def _grab_capsys(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def _emit(text: str) -> None:
    # criterion lines must reach the terminal even when the test passes
    if _capsys is None:
        print(text, flush=True)
        return
    with _capsys.disabled():
        print(text, flush=True)


def _say(n: int, ok: bool, detail: str) -> None:
    _emit(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")


def _run(*suites, **extra):
    cfg = VerifyConfig.from_json({"suites": list(suites), "seed": SEED, **extra})
    t0 = time.perf_counter()
    rep = run_verify(cfg)
    return rep, time.perf_counter() - t0


def _summary(rep) -> str:
    parts = [f"{r['id']} {r['instances']} cases/{r['violation_count']} bad" for r in rep["suites"]]
    return "; ".join(parts)


def _check(n: int, suites, budget: float | None = None, extra_ok=True, note=""):
    rep, dt = _run(*suites)
    ok = rep["pass"] and extra_ok and (budget is None or dt < budget)
    target = f" (target < {budget:.0f}s)" if budget else ""
    _say(n, ok, f"[{_summary(rep)}{note}] {dt:.1f}s{target}")
    for r in rep["suites"]:
        for v in r["violations"][:3]:
            _emit(f"  {r['id']} {v['field']} #{v['index']}: {v['messages']}")
    return rep, dt, ok


def test_criterion_01_iota_bounds():
    rep, dt, ok = _check(1, ["prop-iota-bounds"], budget=60)
    assert rep["suites"][0]["fields"]["Q"]["instances"] == 200
    assert ok


def test_criterion_02_tensor_blocks():
    _, _, ok = _check(2, ["thm-tensor-blocks"], budget=30)
    assert ok


def _x_p_minus_t(p):
    K = FpT(p)
    return Polynomial(K, [K.neg(K.t())] + [K.zero] * (p - 1) + [K.one])


def test_criterion_03_inseparable_single_block():
    direct = []
    for p in (2, 3):
        f = _x_p_minus_t(p)
        (comp,) = jordan_type(Matrix.companion(f), hints=[f]).components
        direct.append(comp.blocks == (p,) and comp.inseparability_degree == p)
    _, _, ok = _check(3, ["lem-inseparable-blocks"], extra_ok=all(direct),
                      note=f"; companion(x^p - t) p=2,3 single block p: {all(direct)}")
    assert ok


def test_criterion_04_iota_tensor():
    _, _, ok = _check(4, ["lem-iota-tensor"])
    assert ok


def test_criterion_05_sum_and_tensor_lengths():
    _, _, ok = _check(5, ["lem-sum-tensor-lengths", "lem-scalar-inequality"])
    assert ok


def test_criterion_06_amplification():
    _, _, ok = _check(6, ["thm-amplification"], budget=300)
    assert ok


def test_criterion_07_conversion():
    rep, _, ok = _check(7, ["thm-conversion"])
    assert rep["suites"][0]["instances"] == 200
    assert ok


def test_criterion_08_restriction():
    rep, _, ok = _check(8, ["mat-restrict-kernel", "lem-restriction"])
    assert rep["suites"][0]["instances"] >= 500
    assert ok


def test_criterion_09_specialization():
    rep, _, ok = _check(9, ["thm-specialization"])
    assert rep["suites"][0]["instances"] == 100
    assert ok


def test_criterion_10_translation_rank():
    rep, _, ok = _check(10, ["lem-translation-rank"])
    assert rep["suites"][0]["instances"] >= 1000
    assert ok


def test_criterion_11_free_product():
    rep, _, ok = _check(11, ["lem-free-product"], budget=300)
    assert rep["suites"][0]["instances"] == 4  # (C2,C2), (C2,C3) over Q and F5
    assert ok


def test_criterion_12_repairs():
    rep, _, ok = _check(12, ["lem-repairs"])
    assert rep["suites"][0]["instances"] == 200
    assert ok


def test_criterion_13_determinism():
    diffs = []
    t0 = time.perf_counter()
    for sid in SUITES:
        a, _ = _run(sid, instances=5)
        b, _ = _run(sid, instances=5)
        if dumps(strip_timing(a)) != dumps(strip_timing(b)):
            diffs.append(sid)
    ok = not diffs
    _say(13, ok, f"[{len(SUITES)} suites run twice, differing: {diffs or 'none'}] "
                 f"{time.perf_counter() - t0:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
