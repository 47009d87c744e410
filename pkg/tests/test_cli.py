import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from qdotgates import cli, harness
from qdotgates.config import (ConfigIOError, ConfigTypeError, MissingKeyError, UnknownKeyError,
                              dump_config, parse_config, validate_config)
from qdotgates.errors import NumericalContractError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- config parsing ---------------------------------------------------------------

def test_parse_example_configs():
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = parse_config(path)
        assert cfg.output


def test_unknown_parameter_named(tmp_path):
    p = write(tmp_path, {"kind": "triangle_ab",
                         "parameters": {"J": 1, "U": 1e4, "phi": 1, "flux_unitz": 2}})
    with pytest.raises(UnknownKeyError) as info:
        parse_config(p)
    assert info.value.key == "flux_unitz"
    assert "flux_unitz" in str(info.value)


def test_missing_parameter_named(tmp_path):
    p = write(tmp_path, {"kind": "triangle_ab", "parameters": {"J": 1, "phi": 1}})
    with pytest.raises(MissingKeyError) as info:
        parse_config(p)
    assert info.value.key == "U"


@pytest.mark.parametrize("data, err", [
    ({"kind": "blockade", "parameters": {"J": "1", "U": 2}}, ConfigTypeError),
    ({"kind": "blockade", "parameters": {"J": True, "U": 2}}, ConfigTypeError),
    ({"kind": "nope"}, ConfigTypeError),
    ({"parameters": {}}, MissingKeyError),
    ({"kind": "blockade", "parameters": {"J": 1, "U": 2}, "extra": 1}, UnknownKeyError),
    ({"kind": "blockade", "parameters": {"J": 1, "U": 2}, "units": "si"}, ConfigTypeError),
    ({"kind": "blockade", "parameters": {"J": 1}, "grid": {"V": [1]}}, UnknownKeyError),
    ([1, 2], ConfigTypeError),
])
def test_validation_errors(data, err):
    with pytest.raises(err):
        validate_config(data)


def test_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigIOError):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigIOError):
        parse_config(bad)


def test_round_trip(tmp_path):
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = parse_config(path)
        dump_config(cfg, tmp_path / "again.json")
        again = parse_config(tmp_path / "again.json")
        assert again == cfg
        assert again.config_hash() == cfg.config_hash()


# -- exit codes ---------------------------------------------------------------------

def test_exit_ok_and_validate(tmp_path, capsys):
    assert cli.main(["validate", "--config", str(CONFIGS / "triangle_ab.json")]) == 0
    assert "ok" in capsys.readouterr().out


def test_exit_config_error(tmp_path, capsys):
    p = write(tmp_path, {"kind": "triangle_ab", "parameters": {"J": 1, "phi": 1}})
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "'U'" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_exit_missing_output(tmp_path):
    p = write(tmp_path, {"kind": "blockade", "parameters": {"J": 1, "U": 100}})
    assert cli.main(["run", "--config", str(p)]) == 2


def test_exit_out_of_range(tmp_path):
    p = write(tmp_path, {"kind": "blockade", "parameters": {"J": -1, "U": 100}})
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_exit_numerical(tmp_path, monkeypatch):
    def boom(cfg):
        raise NumericalContractError("Hamiltonian is not Hermitian")
    monkeypatch.setattr(cli, "run_scenario", boom)
    assert cli.main(["run", "--config", str(CONFIGS / "dynamical.json"),
                     "--out", str(tmp_path / "o")]) == 3


def test_exit_degenerate(tmp_path):
    ell = 6.326866e-4
    p = write(tmp_path, {"kind": "continuous_geometric", "parameters": {
        "omega": 1e6, "path_radius": 3 * ell, "other_x": 3.02 * ell, "other_y": 0.0,
        "field": "uniform", "B": 1.0, "n_points": 2000, "exclusion_radius": 1e-9}})
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 4
    assert not (tmp_path / "o").exists()


def test_exit_degenerate_gate(tmp_path):
    # a 45% timing error leaves most amplitude on the ancillas
    p = write(tmp_path, {"kind": "triangle_ab", "parameters": {"J": 1, "U": 1e4, "phi": 1,
                                                                "epsilon": 0.45}})
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 4


def test_unexpected_failure(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run_scenario", lambda cfg: 1 / 0)
    assert cli.main(["run", "--config", str(CONFIGS / "dynamical.json"),
                     "--out", str(tmp_path / "o")]) == 1


def test_no_partial_output_on_write_failure(tmp_path, monkeypatch):
    out = tmp_path / "o"
    real = harness.os.replace

    def flaky(src, dst):
        raise OSError("disk full")
    monkeypatch.setattr(harness.os, "replace", flaky)
    cfg = parse_config(CONFIGS / "dynamical.json").with_overrides(str(out))
    with pytest.raises(OSError):
        harness.run_scenario(cfg)
    monkeypatch.setattr(harness.os, "replace", real)
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qdotgates", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "exit codes" in proc.stdout


# -- reports ---------------------------------------------------------------------------

def test_displacement_report(tmp_path):
    out = tmp_path / "d"
    assert cli.main(["run", "--config", str(CONFIGS / "displacement.json"), "--out", str(out)]) == 0
    row = read_csv(out / "summary.csv")[0]
    assert float(row["delta_x"]) == pytest.approx(float(row["delta_x_closed_form"]), rel=1e-9)
    report = json.loads((out / "report.json").read_text())
    assert report["header"]["tool"] == "qdotgates"
    assert len(report["header"]["config_hash"]) == 64


def test_dynamical_report(tmp_path):
    out = tmp_path / "d"
    assert cli.main(["run", "--config", str(CONFIGS / "dynamical.json"), "--out", str(out)]) == 0
    row = read_csv(out / "summary.csv")[0]
    assert abs(float(row["entangling_phase"])) == pytest.approx(math.pi, abs=1e-12)
    assert (out / "gate.csv").exists()


def test_triangle_report(tmp_path):
    out = tmp_path / "t"
    assert cli.main(["run", "--config", str(CONFIGS / "triangle_ab.json"), "--out", str(out)]) == 0
    row = read_csv(out / "summary.csv")[0]
    assert float(row["gamma_diff"]) == pytest.approx(1.0, abs=1e-3)


# -- sweeps ---------------------------------------------------------------------------------

def test_blockade_sweep(tmp_path):
    out = tmp_path / "b"
    assert cli.main(["sweep", "--config", str(CONFIGS / "blockade_sweep.json"), "--out", str(out)]) == 0
    rows = read_csv(out / "sweep.csv")
    assert [float(r["U"]) for r in rows] == [100.0, 1000.0, 10000.0]
    leak = [float(r["leakage"]) for r in rows]
    assert leak[0] > leak[1] > leak[2]
    assert all(r["error"] == "" for r in rows)


def test_single_point_sweep_equals_run(tmp_path):
    run_cfg = write(tmp_path, {"kind": "triangle_ab", "parameters": {"J": 1, "U": 1e4, "phi": 0.4}},
                    "run.json")
    sweep_cfg = write(tmp_path, {"kind": "triangle_ab", "parameters": {"J": 1, "U": 1e4},
                                 "grid": {"phi": [0.4]}}, "sweep.json")
    assert cli.main(["run", "--config", str(run_cfg), "--out", str(tmp_path / "r")]) == 0
    assert cli.main(["sweep", "--config", str(sweep_cfg), "--out", str(tmp_path / "s")]) == 0
    single = read_csv(tmp_path / "r" / "summary.csv")[0]
    swept = read_csv(tmp_path / "s" / "sweep.csv")[0]
    for k, v in single.items():
        assert swept[k] == v


def test_sweep_records_failed_points(tmp_path):
    p = write(tmp_path, {"kind": "blockade", "parameters": {"J": 1}, "grid": {"U": [100, -1]}})
    assert cli.main(["sweep", "--config", str(p), "--out", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "sweep.csv")
    assert rows[0]["error"] == ""
    assert rows[1]["error"].startswith("ArgumentError")
    assert json.loads((tmp_path / "o" / "report.json").read_text())["errors"] == 1


def test_timing_sweep_zero_point(tmp_path):
    out = tmp_path / "t"
    assert cli.main(["run", "--config", str(CONFIGS / "timing_robustness.json"), "--out", str(out)]) == 0
    rows = read_csv(out / "timing_sweep.csv")
    zero = next(r for r in rows if float(r["epsilon"]) == 0.0)
    assert abs(float(zero["gamma_dev"])) < 1e-6


def test_sweep_workers_deterministic(tmp_path):
    cfg = str(CONFIGS / "flux_sweep.json")
    assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_bad_workers(tmp_path):
    assert cli.main(["sweep", "--config", str(CONFIGS / "flux_sweep.json"),
                     "--out", str(tmp_path / "a"), "--workers", "0"]) == 2
