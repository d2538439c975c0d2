import csv
import json

import numpy as np
import pytest

from kinfrac import cli
from kinfrac.report import ConfigError, fit_slope, run_suite


def test_fit_slope_exact_power():
    r = np.geomspace(0.1, 10, 9)
    slope, intercept, r2 = fit_slope(zip(r, 2.0 * r ** -3))
    assert slope == pytest.approx(-3.0, abs=1e-12)
    assert intercept == pytest.approx(np.log(2.0))
    assert r2 == pytest.approx(1.0)


def test_fit_slope_noisy():
    rng = np.random.default_rng(3)
    r = 2.0 ** np.arange(-6, 7)
    y = r ** 1.5 * (1 + 0.01 * rng.standard_normal(r.size))
    assert fit_slope(zip(r, y))[0] == pytest.approx(1.5, abs=0.02)


def test_fit_slope_constant():
    slope, _, r2 = fit_slope([(s, 4.0) for s in range(1, 8)])
    assert slope == pytest.approx(0.0, abs=1e-12) and r2 == 1.0


@pytest.mark.parametrize("pairs", [[(1, 1)] * 5, [(1, -1)] * 6, [(0, 1)] * 6])
def test_fit_slope_rejects(pairs):
    with pytest.raises(ValueError):
        fit_slope(pairs)


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite("nope")


def test_nonpositive_tolerance_rejected():
    with pytest.raises(ConfigError):
        run_suite("trajectory-check", {"slope_tol": 0})


def test_exit_ok_and_outputs(tmp_path, capsys):
    assert cli.main(["exponents", "--out", str(tmp_path)]) == cli.EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["pass"] and body["details"]["exponents"]["q"] == "8/3"
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk == body
    assert "wall_time_s" in json.loads((tmp_path / "timing.json").read_text())
    rows = list(csv.reader(open(tmp_path / "data" / "sweep.csv")))
    assert rows[0] == ["p", "q", "a_exp", "b_exp", "gamma"] and len(rows) == 51


def test_exit_check_failure(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"draws": 2, "slope_tol": 1e-12}))
    assert cli.main(["trajectory-check", "--config", str(cfg)]) == cli.EXIT_FAIL


@pytest.mark.parametrize("argv", [["exponents", "--sigma", "3/2"], ["exponents", "--p", "5"],
                                  ["kernel-bounds", "--beta", "4"], ["critical-integration", "--mu", "-1", "--nu", "1"],
                                  ["oracle-kolmogorov", "--tmax", "0"], ["gn-check", "--model", "x"],
                                  ["exponents", "--config", "/nonexistent.json"]])
def test_exit_config_error(argv, capsys):
    assert cli.main(argv) == cli.EXIT_CONFIG
    err = json.loads(capsys.readouterr().err)
    assert err["suite"] == argv[0] and err["error"]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["critical-integration", "--mu", "1", "--nu", "1", "--out", str(out)]) == cli.EXIT_OK
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "data" / "weak_norms.csv").read_bytes() == (b / "data" / "weak_norms.csv").read_bytes()


def test_csv_uses_twelve_digits(tmp_path):
    cli.main(["critical-integration", "--mu", "1", "--nu", "1", "--out", str(tmp_path)])
    rows = list(csv.reader(open(tmp_path / "data" / "weak_norms.csv")))
    assert rows[0] == ["mu", "nu", "theta", "tau", "weak_norm"]
    assert all(len(v.replace(".", "").replace("-", "").split("e")[0].lstrip("0")) <= 12 for v in rows[1])
