import json
from pathlib import Path

import pytest

from shiftrate.cli import main
from shiftrate.experiments import ExperimentConfig, run
from shiftrate.errors import ConfigInvalid


def report(out: Path, kind: str) -> dict:
    return json.loads((out / kind / "report.json").read_text())


def test_classify_fibonacci(tmp_path, capsys):
    assert main(["classify", "--matrix", "[[1,1],[1,0]]", "--out", str(tmp_path)]) == 0
    rep = report(tmp_path, "classify")
    assert rep["schema"] == 1 and rep["status"] == "pass"
    assert rep["measured"]["tag"] == "ErgodicBilateral"
    assert rep["config"]["matrix"] == [[1, 1], [1, 0]] and rep["config"]["seed"] == 0
    assert all("lhs" in c and "rhs" in c for c in rep["checks"])
    assert "status: pass" in capsys.readouterr().out


def test_rate_laguerre_emits_csv(tmp_path):
    assert main(["laguerre", "--nmax", "1024", "--out", str(tmp_path)]) == 0
    csv = (tmp_path / "rate-laguerre" / "series_000.csv").read_text().splitlines()
    assert csv[0] == "N,deviation,weighted" and csv[-1].startswith("1024,")
    assert report(tmp_path, "rate-laguerre")["measured"]["laguerre_envelopes"][0] < 1


def test_rate_system_flag_matches_alias(tmp_path):
    assert main(["rate", "--system", "laguerre", "--nmax", "64", "--out", str(tmp_path / "a")]) == 0
    assert main(["laguerre", "--nmax", "64", "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "rate-laguerre" / "series_000.csv").read_bytes()
    assert a == (tmp_path / "b" / "rate-laguerre" / "series_000.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["classify", "--matrix", "[[1,2,3]]"],
    ["classify", "--matrix", "[[1,2],[3]]"],
    ["classify", "--matrix", "oops"],
    ["laguerre", "--param", "bogus=1"],
    ["rate", "--seed", "-1"],
    ["rate", "--threads", "0"],
])
def test_config_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text("kind: witness\nseed: 5\nparams:\n  H: [10, 100]\n  threshold: 0.9\n")
    assert main(["witness", "--config", str(cfg), "--out", str(tmp_path), "--param", "N=2"]) == 0
    rep = report(tmp_path, "witness")
    assert rep["config"]["params"] == {"N": 2, "H": [10, 100], "threshold": 0.9}
    assert rep["config"]["seed"] == 5


def test_unknown_config_key():
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.from_mapping({"kind": "witness", "colour": 1})
    with pytest.raises(ConfigInvalid):
        ExperimentConfig(kind="teleport")


def test_failed_check_exits_1(tmp_path):
    rep = run(ExperimentConfig(kind="witness", out=str(tmp_path), params={"threshold": 0.999999999}))
    assert rep.exit_code == 1 and rep.status == "fail"
    assert any(not c.passed for c in rep.checks)


def test_precision_exhausted_exits_3(tmp_path):
    cfg = ExperimentConfig(kind="rate-toral", out=str(tmp_path), nmax=64,
                           params={"points": 1, "function": {"dim": 2, "coeffs": [[[1, 0], 1e12, 0]]}})
    rep = run(cfg)
    assert rep.exit_code == 3 and rep.status == "precision-exhausted"


def test_float_mode_recorded(tmp_path):
    assert main(["witness", "--float", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "witness")["arithmetic"] == "float"


def test_suite_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["suite", "quick", "--only", "1,3,7", "--seed", "11", "--out", str(a)]) == 0
    assert main(["suite", "quick", "--only", "1,3,7", "--seed", "11", "--out", str(b)]) == 0
    ca = (a / "suite-quick" / "checks.csv").read_bytes()
    assert ca == (b / "suite-quick" / "checks.csv").read_bytes()
    assert len(ca.splitlines()) > 4


def test_sabotaged_suite_fails(tmp_path, capsys):
    assert main(["suite", "quick", "--only", "1", "--sabotage", "--out", str(tmp_path)]) == 1
    assert "[FAIL] criterion 1" in capsys.readouterr().out


@pytest.mark.slow
def test_quick_suite_under_30s(tmp_path):
    import time
    t0 = time.perf_counter()
    assert main(["suite", "quick", "--out", str(tmp_path)]) == 0
    assert time.perf_counter() - t0 < 30
    assert sorted(p.name for p in (tmp_path / "suite-quick").glob("c6_*.csv"))
