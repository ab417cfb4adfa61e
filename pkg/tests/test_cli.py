import json
import math

import pytest

from wedgewh import cli
from wedgewh.portraits import read_ppm

DEG = {"k1": [1.0, 1.0], "k2": [1.0, 1.0], "theta0": 5 * math.pi / 4}


def run(tmp_path, command, cfg=None, *extra):
    argv = [command, "--out", str(tmp_path)]
    if cfg is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        argv += ["--config", str(path)]
    code = cli.main(argv + list(extra))
    rep = tmp_path / f"{command}_report.json"
    return code, (json.loads(rep.read_text()) if rep.exists() else None)


def test_factor_default_passes(tmp_path):
    code, rep = run(tmp_path, "factor", None, "--probes", "4")
    assert code == cli.EXIT_OK
    assert rep["max_relative_error"] < 1e-6
    assert rep["config"]["derived"]["eps"] == pytest.approx(math.sqrt(2) / 4)


def test_factor_degenerate(tmp_path):
    code, rep = run(tmp_path, "factor", {"params": DEG}, "--probes", "4", "--tolerance", "1e-10")
    assert code == cli.EXIT_OK and rep["max_relative_error"] < 1e-10


def test_factor_unattainable_tolerance(tmp_path):
    code, rep = run(tmp_path, "factor", None, "--probes", "3", "--tolerance", "1e-30")
    assert code == cli.EXIT_NUMERIC
    assert rep is not None and rep["passed"] is False


def test_split_and_ansatz(tmp_path):
    assert run(tmp_path, "split", {"split": {"function": "rational", "c": 2.0}})[0] == cli.EXIT_OK
    code, rep = run(tmp_path, "ansatz")
    assert code == cli.EXIT_OK
    assert rep["decay_slopes"]["ALPHA1"] == pytest.approx(-1, abs=0.1)


def test_residual_reports(tmp_path):
    code, rep = run(tmp_path, "residual", {"params": DEG})
    assert code == cli.EXIT_OK and rep["sup_residual"] < 1e-8
    code, rep = run(tmp_path, "residual", None, "--probes", "4")
    assert code == cli.EXIT_OK and rep["sup_residual"] > 1e-3


def test_malformed_candidate(tmp_path, capsys):
    code, _ = run(tmp_path, "residual", {"candidate": {"terms": [{"coeff": [1, 0]}]}})
    assert code == cli.EXIT_USAGE
    err = capsys.readouterr().err
    assert err.count("malformed candidate") == 1


def test_field_degenerate(tmp_path):
    cfg = {"params": DEG, "grid": {"spacing": 0.05, "n": 20}}
    code, rep = run(tmp_path, "field", cfg)
    assert code == cli.EXIT_OK
    for face in rep["continuity"].values():
        assert face["value"] < 1e-2
    assert rep["helmholtz"]["psi_k2"] <= rep["helmholtz"]["stencil_budget"]
    tip = rep["tip"]
    assert abs(complex(*tip["B_interior"]) - 1) < 1e-2 and abs(complex(*tip["B_exterior"]) - 1) < 1e-2
    assert tip["B_difference"] == pytest.approx(abs(complex(*tip["B_interior"]) - complex(*tip["B_exterior"])))
    assert (tmp_path / "psi.csv").exists() and (tmp_path / "phi.csv").exists()


@pytest.mark.parametrize("cfg", [{"params": DEG}, {"params": DEG, "grid": {}}, {"grid": {"spacing": 0.1, "n": 8}}])
def test_field_bad_grid_is_usage_error(tmp_path, cfg):
    assert run(tmp_path, "field", cfg)[0] == cli.EXIT_USAGE


def test_portrait(tmp_path):
    cfg = {"portrait": {"selector": "kappa", "width": 32, "height": 32, "threshold": 1.5}}
    code, rep = run(tmp_path, "portrait", cfg)
    assert code == cli.EXIT_OK
    assert read_ppm(tmp_path / "kappa.ppm").shape == (32, 32, 3)
    assert rep["discontinuities"]["count"] > 0


@pytest.mark.parametrize(
    "pc", [{"selector": "nope"}, {"width": 0, "height": 0}, {"plane": "alpha3"}, {"threshold": 9.0}]
)
def test_portrait_usage_errors(tmp_path, pc):
    assert run(tmp_path, "portrait", {"portrait": pc})[0] == cli.EXIT_USAGE


def test_missing_config(tmp_path):
    assert cli.main(["factor", "--config", str(tmp_path / "absent.json")]) == cli.EXIT_USAGE


def test_bad_params(tmp_path):
    bad = {"k1": [1.0, -1.0], "k2": [2.0, 1.0], "theta0": 5 * math.pi / 4}
    assert run(tmp_path, "factor", {"params": bad})[0] == cli.EXIT_USAGE


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        cli.main(["bogus"])
    assert info.value.code == 2


def test_verify_subset(tmp_path, capsys):
    code, rep = run(tmp_path, "verify", None, "--only", "1", "3")
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "criterion 1" in out and "criterion 3" in out
    assert [c["criterion"] for c in rep["criteria"]] == [1, 3]


def test_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    run(a, "ansatz")
    run(b, "ansatz")
    assert (a / "ansatz_report.json").read_text() == (b / "ansatz_report.json").read_text()
