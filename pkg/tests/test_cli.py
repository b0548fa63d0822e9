import csv
import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from gaussqueeze import cli
from gaussqueeze.figures import FIGURES


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_ok(argv):
    assert cli.main(argv) == 0


def test_steady_prints_closed_form(capsys):
    run_ok(["steady", "--theta", "0", "--d", "5"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(rows[0]["V"]) == pytest.approx((math.sqrt(21) - 1) / 10, rel=1e-14)
    assert float(rows[0]["U"]) == pytest.approx(6.0, rel=1e-14)
    assert rows[0]["stable"] == "1"


def test_steady_engine_path_for_nonzero_phase(capsys):
    run_ok(["steady", "--theta", "0.2", "--d", "5", "--phi", "0.3"])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert row["method"] == "engine"
    assert 0 < float(row["V"]) < float(row["U"])


def test_manifest_round_trip_is_byte_identical(tmp_path):
    out = tmp_path / "a.csv"
    run_ok(["sweep-theta", "--d", "50", "--n", "1", "--epsilon", "0.05",
            "--grid=-1.2:1.2:101", "--out", str(out)])
    manifest = json.loads((tmp_path / "a.csv.json").read_text())
    assert {"version", "elapsed_seconds", "theta", "grid", "command"} <= set(manifest)
    assert manifest["d"] == 50.0 and manifest["grid"] == "-1.2:1.2:101"
    again = tmp_path / "b.csv"
    manifest["out"] = str(again)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(manifest))
    run_ok(["--config", str(cfg_path)])
    assert out.read_bytes() == again.read_bytes()


def test_trajectory_round_trip_with_seed(tmp_path):
    out = tmp_path / "t.csv"
    run_ok(["trajectory", "--seed", "7", "--duration", "0.5", "--dt", "1e-3", "--out", str(out)])
    manifest = json.loads((tmp_path / "t.csv.json").read_text())
    manifest["out"] = str(tmp_path / "u.csv")
    (tmp_path / "cfg.json").write_text(json.dumps(manifest))
    run_ok(["--config", str(tmp_path / "cfg.json")])
    assert out.read_bytes() == (tmp_path / "u.csv").read_bytes()
    rows = read_csv(out)
    assert len(rows) == 501 and float(rows[0]["gamma_xx"]) == 1.0


def test_flags_override_config(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"command": "steady", "d": 50.0}))
    run_ok(["--config", str(cfg_path), "--d", "5"])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(row["d"]) == 5.0


@pytest.mark.parametrize("argv", [
    ["trajectory"],                                   # no seed
    [],                                               # no command
    ["steady", "--d", "-1"],
    ["steady", "--epsilon", "1.5"],
    ["sweep-theta", "--grid", "0:1"],
    ["sweep-theta", "--grid", "0:1:1"],
    ["sweep-depth", "--grid", "0:10:5", "--log-grid"],
    ["cascaded-check", "--no-rwa"],                   # lab frame without omega
])
def test_config_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_unknown_config_key_exit_2(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"command": "steady", "bogus": 1}))
    assert cli.main(["--config", str(cfg_path)]) == 2
    assert cli.main(["--config", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("argv", [
    ["steady", "--unconditional", "--theta", "-0.5", "--d", "5"],
    ["steady", "--unconditional", "--theta", "-0.5", "--d", "5", "--phi", "0.1"],
    ["feedback-check", "--theta", "-0.3", "--d", "5"],
    ["feedback-check", "--theta", "0.3", "--d", "5", "--epsilon", "0.1", "--xi1", "100"],
])
def test_numerical_failures_exit_3(argv, capsys):
    assert cli.main(argv) == 3
    err = capsys.readouterr().err
    assert "numerical failure" in err


def test_unstable_rows_flagged_with_finite_conditional_variance(tmp_path):
    out = tmp_path / "s.csv"
    run_ok(["sweep-theta", "--d", "5", "--grid=-1.5:1.5:61", "--out", str(out)])
    rows = read_csv(out)
    tc = -0.5 * math.asin(2 / 5)
    for row in rows:
        th = float(row["theta"])
        vc = float(row["V_c"])
        assert math.isfinite(vc) and vc > 0
        if -math.pi / 2 - tc < th <= tc:
            assert row["stable"] == "0" and math.isinf(float(row["U_c"]))
        else:
            assert row["stable"] == "1"


def test_optimize_row(capsys):
    run_ok(["optimize", "--d", "50", "--epsilon", "0.05"])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(row["theta_u_opt"]) == pytest.approx(math.atan((math.sqrt(52) - 1) / 51), abs=1e-14)
    assert float(row["d_star"]) == pytest.approx(20.0)
    assert float(row["n_c"]) == pytest.approx(12.5 * (math.sqrt(2) - 1))


def test_sweep_depth_log_grid(capsys):
    run_ok(["sweep-depth", "--grid", "10:1000:3", "--log-grid", "--epsilon", "0.01"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    np.testing.assert_allclose([float(r["d"]) for r in rows], [10, 100, 1000])


def test_cascaded_check_columns(capsys):
    run_ok(["cascaded-check", "--theta", "0.12", "--d", "50"])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(row["var_X_plus"]) == pytest.approx(float(row["single_mode_V"]), rel=1e-8)
    assert float(row["cross_max"]) < 1e-8 and row["entangled"] == "1"


def test_feedback_check_columns(capsys):
    run_ok(["feedback-check", "--theta", "0.1", "--d", "5", "--epsilon", "0.05"])
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    for a, b in (("V_fb", "V_c"), ("U_fb", "U_c"), ("V_engine", "V_c"), ("U_engine", "U_c")):
        assert float(row[a]) == pytest.approx(float(row[b]), rel=1e-8)


def test_figures_directory(tmp_path):
    run_ok(["figures", "--grid", "0:1:51", "--out", str(tmp_path)])
    for key in FIGURES:
        rows = read_csv(tmp_path / f"{key}.csv")
        assert rows and all(v != "" for v in rows[0].values())
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "figures" and manifest["which"] == "all"


def test_figures_single_key_to_stdout(capsys):
    run_ok(["figures", "--which", "optTheta", "--grid", "0:1:10"])
    out = capsys.readouterr().out
    assert out.startswith("# optTheta\n") and out.count("\n") == 12


def test_version_string_starts_with_package_version():
    from gaussqueeze import __version__
    assert cli.version_string().startswith(__version__)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gaussqueeze.cli", "steady", "--d", "5"],
                          capture_output=True, text=True, cwd=tmp_path,
                          env={**os.environ, "PYTHONWARNINGS": "ignore"})
    assert proc.returncode == 0 and proc.stdout.startswith("theta,")
