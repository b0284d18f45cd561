from __future__ import annotations

import json
from fractions import Fraction

import pytest

from linsofic.almosthom import FiniteGroup, hom_from_exact_rep
from linsofic.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main
from linsofic.fields import GF, QQ, FpT
from linsofic.matrix import Matrix, Permutation, perm_matrix
from linsofic.randgen import two_dim_rep
from linsofic.serialize import frac_from_json as fr
from linsofic.serialize import load_hom, save_hom, write_json


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def _c2_sign(tmp_path, F=QQ, mode="rank"):
    phi = hom_from_exact_rep(FiniteGroup.cyclic(2), {"a": Matrix.diag(F, [-1, 1])}, mode)
    path = tmp_path / "phi.json"
    save_hom(phi, path)
    return path


# --- report ----------------------------------------------------------------------


def test_report_identity_matrix(tmp_path, capsys):
    write_json(Matrix.identity(QQ, 3).to_json(), tmp_path / "id.json")
    code, rep = _run(capsys, "report", tmp_path / "id.json")
    assert code == EXIT_OK
    assert rep["kind"] == "matrix" and rep["violations"] == []
    assert fr(rep["ell_r"]) == 0 and fr(rep["iota1"]) == 1


def test_report_cycle_matrix(tmp_path, capsys):
    cyc = perm_matrix(Permutation((1, 2, 3, 4, 0)), GF(5))
    write_json(cyc.to_json(), tmp_path / "c.json")
    code, rep = _run(capsys, "report", tmp_path / "c.json")
    assert code == EXIT_OK and fr(rep["ell_r"]) == Fraction(4, 5)


def test_report_manifest(tmp_path, capsys):
    save_hom(two_dim_rep("S3", QQ), tmp_path / "s3.json")
    code, rep = _run(capsys, "report", tmp_path / "s3.json")
    assert code == EXIT_OK
    assert rep["kind"] == "almost_hom" and rep["dim"] == 2
    assert fr(rep["defect"]) == 0


def test_report_rejects_garbage(tmp_path, capsys):
    (tmp_path / "x.json").write_text('{"hello": 1}')
    assert main(["report", str(tmp_path / "x.json")]) == EXIT_INPUT
    (tmp_path / "y.json").write_text("not json")
    assert main(["report", str(tmp_path / "y.json")]) == EXIT_INPUT


# --- verify ------------------------------------------------------------------------


def _config(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(kw))
    return path


def test_verify_small_run(tmp_path, capsys):
    cfg = _config(tmp_path, suites=["lem-scalar-inequality", "mat-kron-rank"], seed=3,
                  instances=10)
    code, rep = _run(capsys, "verify", "--config", cfg)
    assert code == EXIT_OK and rep["pass"]
    assert [s["id"] for s in rep["suites"]] == ["lem-scalar-inequality", "mat-kron-rank"]


@pytest.mark.parametrize("cfg", [
    {"suites": ["mat-kron-rank"], "seed": 1, "instances": 0},
    {"suites": ["no-such-suite"], "seed": 1},
    {"suites": ["mat-kron-rank"]},
    {"suites": ["lem-restriction"], "seed": 1, "fields": ["Q"]},
    {"suites": ["mat-kron-rank"], "seed": 1, "colour": "blue"},
])
def test_verify_bad_configs_exit_2(tmp_path, capsys, cfg):
    assert main(["verify", "--config", str(_config(tmp_path, **cfg))]) == EXIT_INPUT


def test_verify_is_deterministic(tmp_path, capsys):
    cfg = _config(tmp_path, suites=["prop-iota-bounds", "lem-repairs"], seed=9, instances=4)
    outs = []
    for name in ("a.json", "b.json"):
        assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / name)]) == EXIT_OK
        rep = json.loads((tmp_path / name).read_text())
        for s in rep["suites"]:
            s.pop("wall_time_s")
        rep.pop("wall_time_s")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_seed_flag_overrides_config(tmp_path, capsys):
    cfg = _config(tmp_path, suites=["lem-scalar-inequality"], seed=1, instances=3)
    code, rep = _run(capsys, "verify", "--config", cfg, "--seed", 77)
    assert code == EXIT_OK and rep["seed"] == 77


def test_replay_detects_changed_messages(tmp_path, capsys):
    cfg = _config(tmp_path, suites=["lem-scalar-inequality"], seed=2, instances=1)
    main(["verify", "--config", str(cfg), "--out", str(tmp_path / "r.json")])
    rep = json.loads((tmp_path / "r.json").read_text())
    good = {"x": "1", "x1": "4/3", "y": "2", "y1": "2"}
    rep["suites"][0]["violations"] = [
        {"field": "-", "index": 0, "messages": [], "case": good},
        {"field": "-", "index": 1, "messages": ["stale"], "case": good},
    ]
    write_json(rep, tmp_path / "r.json")
    code, out = _run(capsys, "verify", "--replay", tmp_path / "r.json")
    assert code == EXIT_VIOLATION
    assert [r["reproduced"] for r in out["replayed"]] == [True, False]


# --- constructions ---------------------------------------------------------------------


def test_schedule(capsys):
    code, out = _run(capsys, "schedule", "--delta", "1/8", "--eps", "1/32")
    assert code == EXIT_OK and out["m"] == 3


def test_amplify_jordan(tmp_path, capsys):
    src = _c2_sign(tmp_path, mode="jordan")
    code, out = _run(capsys, "amplify", src, "--eps", "1/16", "--out", tmp_path / "amp.json")
    assert code == EXIT_OK
    phi = load_hom(tmp_path / "amp.json")
    assert phi.dim == 2 ** (2 ** out["m"])
    assert fr(out["output"]["min_separation"]) >= Fraction(1, 4) - Fraction(1, 16)


def test_amplify_needs_out(tmp_path, capsys):
    assert main(["amplify", str(_c2_sign(tmp_path)), "--eps", "1/16"]) == EXIT_INPUT


def test_convert_rank_to_jordan(tmp_path, capsys):
    code, out = _run(capsys, "convert", _c2_sign(tmp_path), "--eps", "1/4",
                     "--out", tmp_path / "proj.json")
    assert code == EXIT_OK and (out["from"], out["to"]) == ("rank", "jordan")
    assert load_hom(tmp_path / "proj.json").dim == 4


def test_restrict(tmp_path, capsys):
    F4 = GF(2, 2)
    phi = hom_from_exact_rep(FiniteGroup.cyclic(3), {"a": Matrix(F4, [[F4.gen]])})
    save_hom(phi, tmp_path / "f4.json")
    code, out = _run(capsys, "restrict", tmp_path / "f4.json", "--out", tmp_path / "f2.json")
    assert code == EXIT_OK and out["output"]["dim"] == 2
    assert load_hom(tmp_path / "f2.json").field == GF(2)


def test_specialize(tmp_path, capsys):
    K = FpT(2)
    phi = hom_from_exact_rep(FiniteGroup.cyclic(2), {"a": Matrix.diag(K, [K.one, K.one])})
    save_hom(phi, tmp_path / "k.json")
    code, out = _run(capsys, "specialize", tmp_path / "k.json", "--out", tmp_path / "s.json")
    assert code == EXIT_OK and fr(out["output"]["defect"]) == 0


def test_freeprod(tmp_path, capsys):
    code, cert = _run(capsys, "freeprod", "C2", "C3", "--field", "F5", "--out", tmp_path)
    assert code == EXIT_OK and cert["pass"]
    assert fr(cert["zeta"]["min_separation"]) >= Fraction(7, 16)
    assert (tmp_path / "zeta.json").exists() and (tmp_path / "certificate.json").exists()


def test_freeprod_unknown_field(tmp_path, capsys):
    assert main(["freeprod", "C2", "C2", "--field", "F6", "--out", str(tmp_path)]) == EXIT_INPUT


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["schedule", "--delta", "abc", "--eps", "1/8"])
    assert exc.value.code == 2
