import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

from xoverdesign.cli import EXIT_INVALID, EXIT_NOT_OPTIMAL, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
ILLUSTRATION = str(CONFIGS / "illustration.yaml")
WORK = str(CONFIGS / "work_environment.yaml")


def write_config(tmp_path, base, **changes):
    data = yaml.safe_load(Path(base).read_text())
    data.update(changes)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_optimize_shipped_configs(name, tmp_path, capsys):
    out = tmp_path / "result.json"
    assert main(["optimize", "--config", str(CONFIGS / name), "--out", str(out)]) == EXIT_OK
    result = json.loads(out.read_text())
    w = np.array(result["design"]["proportions"])
    assert abs(w.sum() - 1) < 1e-12
    assert result["verification"]["optimal"] and result["converged"]
    assert "OPTIMAL" in capsys.readouterr().out


def test_optimize_illustration_values(tmp_path):
    out = tmp_path / "r.json"
    main(["optimize", "--config", ILLUSTRATION, "--out", str(out)])
    np.testing.assert_allclose(json.loads(out.read_text())["design"]["proportions"],
                               [0.5, 0.5], atol=1e-6)
    main(["optimize", "--config", ILLUSTRATION, "--criterion", "tau", "--out", str(out)])
    assert json.loads(out.read_text())["design"]["proportions"][0] == pytest.approx(0.177,
                                                                                    abs=1e-3)


def test_theta_length_error(tmp_path, capsys):
    cfg = write_config(tmp_path, WORK, theta=[0.1] * 9)
    assert main(["optimize", "--config", cfg]) == EXIT_INVALID
    assert "m = p + 2t - 2 = 10" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    cfg = write_config(tmp_path, WORK, alpha=0.1)
    assert main(["optimize", "--config", cfg]) == EXIT_INVALID
    assert "alpha" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["optimize", "--config", str(tmp_path / "nope.yaml")]) == EXIT_INVALID


def test_verify_round_trip(tmp_path, capsys):
    result = tmp_path / "opt.json"
    main(["optimize", "--config", WORK, "--out", str(result)])
    table = tmp_path / "table.csv"
    rc = main(["verify", "--config", WORK, "--design", str(result), "--out", str(table)])
    assert rc == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(table.read_text())))
    assert len(rows) == 4 and {r["status"] for r in rows} == {"supported_ok"}
    for r in rows:
        assert float(r["sensitivity"]) == pytest.approx(10, abs=1e-4)


def test_verify_reported_tau_design(capsys):
    design = "0.2900,0.2963,0.1734,0.2403"
    args = ["verify", "--config", WORK, "--design", design]
    assert main(args + ["--criterion", "tau", "--tolerance", "0.02"]) == EXIT_OK
    assert main(args + ["--criterion", "theta", "--tolerance", "0.02"]) == EXIT_NOT_OPTIMAL
    assert main(args + ["--criterion", "tau"]) == EXIT_NOT_OPTIMAL


def test_verify_uniform_and_bad_designs(capsys):
    assert main(["verify", "--config", WORK, "--design", "uniform"]) == EXIT_NOT_OPTIMAL
    assert main(["verify", "--config", WORK, "--design", "optimal"]) == EXIT_OK
    assert main(["verify", "--config", WORK, "--design", "0.5,0.3,0.1,0.2"]) == EXIT_INVALID
    assert main(["verify", "--config", WORK, "--design", "0.5,0.5"]) == EXIT_INVALID
    assert "sum" in capsys.readouterr().err


def read_sweep(path):
    rows = list(csv.DictReader(io.StringIO(Path(path).read_text())))
    p = np.array([float(r["p_i"]) for r in rows])
    phi = np.array([float(r["objective"]) if r["objective"] else np.nan for r in rows])
    return rows, p, phi


@pytest.mark.parametrize("criterion,expected", [("theta", 0.5), ("tau", 0.177)])
def test_sweep_minimum(criterion, expected, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", ILLUSTRATION, "--criterion", criterion,
                 "--out", str(out)]) == EXIT_OK
    rows, p, phi = read_sweep(out)
    assert list(rows[0]) == ["p_i", "objective", "directional_derivative"]
    assert len(rows) == 1001
    assert rows[0]["objective"] == "" and rows[-1]["objective"] == ""
    assert p[np.nanargmin(phi)] == pytest.approx(expected, abs=1e-12)


def test_sweep_bad_grid(capsys):
    assert main(["sweep", "--config", ILLUSTRATION, "--grid", "1"]) == EXIT_INVALID
    assert main(["sweep", "--config", ILLUSTRATION, "--sequence-index", "3"]) == EXIT_INVALID


def test_oracle(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert main(["oracle", "--config", ILLUSTRATION, "--criterion", "tau",
                 "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["design"]["proportions"][0] == pytest.approx(0.177)
    assert main(["oracle", "--config", ILLUSTRATION, "--resolution", "0"]) == EXIT_INVALID


def test_oracle_matches_optimizer_on_four_sequences(tmp_path):
    grid, opt = tmp_path / "g.json", tmp_path / "o.json"
    main(["oracle", "--config", WORK, "--resolution", "0.01", "--out", str(grid)])
    main(["optimize", "--config", WORK, "--out", str(opt)])
    g, o = json.loads(grid.read_text()), json.loads(opt.read_text())
    assert 0 <= g["objective"] - o["objective"] <= 1e-3


def efficiencies(capsys):
    lines = capsys.readouterr().out.splitlines()
    return [float(line.split(":")[1]) for line in lines if line.startswith("efficiency")]


def test_efficiency(capsys):
    main(["efficiency", "--config", WORK, "--design-a", "uniform", "--design-b", "uniform"])
    assert efficiencies(capsys) == [1.0, 1.0]
    for crit in ("theta", "tau"):
        rc = main(["efficiency", "--config", WORK, "--criterion", crit,
                   "--design-a", "optimal", "--design-b", "uniform"])
        assert rc == EXIT_OK
        ab, ba = efficiencies(capsys)
        assert ab >= 1.0 and ab * ba == pytest.approx(1.0, abs=1e-10)


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "xoverdesign.cli", "verify", "--config",
                           ILLUSTRATION, "--design", "0.5,0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert "bound: 4" in proc.stdout
