"""Scenario execution, sweeps and artifact writing for the command line."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import shutil
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, MissingKeyError, ScenarioConfig
from .hamiltonian import wrap_phase
from .protocols import (Deformation, TriangleScenario, blockade_leakage, dynamical_gate_scenario,
                        flux_phase_difference, timing_robustness_sweep, triangle_ab_scenario)
from .trap import (FieldSpec, TrapModel, circle_path, displacement_closed_form, enclosed_area,
                   equilibrium_displacement, geometric_gate_report)

# Summary columns per kind, in CSV order.
METRICS = {
    "dynamical": ("entangling_phase", "fidelity", "leakage_max", "offdiag_residual"),
    "triangle_ab": ("gamma_phi", "gamma_zero", "gamma_diff", "gamma_dev", "leakage_max", "fidelity"),
    "blockade": ("leakage", "i_eff"),
    "timing_sweep": ("rows", "leakage_max", "gamma_dev_max_abs", "fidelity_min"),
    "continuous_geometric": ("phi1", "phi2", "entangling_phase", "area_free", "area_repelled",
                             "fidelity"),
    "displacement": ("delta_x", "delta_x_closed_form", "delta_x_estimate"),
}
SWEEP_COLUMNS = ("epsilon", "leakage_max", "gamma_dev", "fidelity")


@dataclass
class PointResult:
    summary: dict
    details: dict
    tables: dict  # file name -> csv text


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _deformations(raw) -> tuple:
    return tuple(Deformation(int(p), (int(l[0]), int(l[1]))) for p, l in raw)


def run_point(kind: str, params: dict, units: str = "natural") -> PointResult:
    """Evaluate one scenario with fully resolved parameters."""
    p = params
    if kind == "dynamical":
        rep = dynamical_gate_scenario(p["delta_e"], p["t"])
        summary = {"entangling_phase": rep.entangling_phase, "fidelity": rep.fidelity_vs_target,
                   "leakage_max": rep.leakage_max, "offdiag_residual": rep.offdiag_residual}
        return PointResult(summary, {"gate": rep.to_dict()}, {"gate.csv": _gate_csv(rep)})

    if kind == "triangle_ab":
        s = TriangleScenario(p["J"], p["U"], p["phi"], p["windings"], _deformations(p["deformations"]),
                             p["epsilon"])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep_phi, rep_zero = triangle_ab_scenario(s, p["site_phases"])
        diff = flux_phase_difference(rep_phi, rep_zero)
        summary = {"gamma_phi": rep_phi.entangling_phase, "gamma_zero": rep_zero.entangling_phase,
                   "gamma_diff": diff, "gamma_dev": wrap_phase(diff - s.windings * s.phi),
                   "leakage_max": max(rep_phi.leakage_max, rep_zero.leakage_max),
                   "fidelity": rep_phi.fidelity_vs_target}
        details = {"gate_phi": rep_phi.to_dict(), "gate_zero": rep_zero.to_dict(),
                   "warnings": [str(w.message) for w in caught]}
        return PointResult(summary, details, {"gate_phi.csv": _gate_csv(rep_phi),
                                              "gate_zero.csv": _gate_csv(rep_zero)})

    if kind == "blockade":
        res = blockade_leakage(p["J"], p["U"])
        return PointResult({"leakage": res.leakage, "i_eff": res.i_eff}, {}, {})

    if kind == "timing_sweep":
        s = TriangleScenario(p["J"], p["U"], p["phi"], p["windings"], _deformations(p["deformations"]))
        rows = timing_robustness_sweep(s, p["epsilons"])
        devs = [abs(r.gamma_dev) for r in rows if math.isfinite(r.gamma_dev)]
        fids = [r.fidelity for r in rows if math.isfinite(r.fidelity)]
        summary = {"rows": len(rows), "leakage_max": max(r.leakage_max for r in rows),
                   "gamma_dev_max_abs": max(devs) if devs else math.nan,
                   "fidelity_min": min(fids) if fids else math.nan}
        table = _csv(SWEEP_COLUMNS, [(r.epsilon, r.leakage_max, r.gamma_dev, r.fidelity) for r in rows])
        return PointResult(summary, {}, {"timing_sweep.csv": table})

    if kind == "continuous_geometric":
        model = TrapModel(p["omega"], other_electron=(p["other_x"], p["other_y"]))
        if p["field"] == "uniform":
            fld = FieldSpec.uniform(p["B"])
        elif p["field"] == "solenoid":
            fld = FieldSpec.solenoid((p["solenoid_x"], p["solenoid_y"]), p["flux"])
        else:
            raise ConfigError(f"field must be 'uniform' or 'solenoid', got {p['field']!r}", "field")
        path = circle_path(p["path_radius"], p["n_points"])
        res = geometric_gate_report(model, path, fld, units, p["exclusion_radius"])
        rep = res.report
        summary = {"phi1": res.phi1, "phi2": res.phi2, "entangling_phase": rep.entangling_phase,
                   "area_free": enclosed_area(res.free), "area_repelled": enclosed_area(res.repelled),
                   "fidelity": rep.fidelity_vs_target}
        details = {"gate": rep.to_dict(), "units": units,
                   "phases_si": {k: list(v) for k, v in res.phases_si.items()}}
        return PointResult(summary, details, {"trajectory_free.csv": res.free.to_csv(),
                                              "trajectory_repelled.csv": res.repelled.to_csv()})

    if kind == "displacement":
        w = p["omega"]
        summary = {"delta_x": equilibrium_displacement(w), "delta_x_closed_form": displacement_closed_form(w),
                   "delta_x_estimate": 10.0 / w ** (2.0 / 3.0)}
        return PointResult(summary, {"units": "m"}, {})

    raise ConfigError(f"unknown kind {kind!r}", "kind")


def _gate_csv(rep) -> str:
    rows = []
    labels = ("00", "01", "10", "11")
    for s in range(4):
        col = rep.projected[:, s]
        rows.append([labels[s], *(v for z in col for v in (z.real, z.imag)), rep.leakage[s],
                     rep.diagonal_phases[s]])
    header = ["column", *(f"{part}_{lab}" for lab in labels for part in ("re", "im")),
              "leakage", "diagonal_phase"]
    return _csv(header, rows)


def _header(cfg: ScenarioConfig) -> dict:
    return {"tool": "qdotgates", "version": __version__, "config_hash": cfg.config_hash(),
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def _write_artifacts(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Write all files or none: stage in a sibling temp dir, then rename."""
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.", dir=out_dir.parent))
    try:
        for name, text in files.items():
            with open(stage / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        if not out_dir.exists():
            os.replace(stage, out_dir)
        else:
            for name in files:
                os.replace(stage / name, out_dir / name)
    finally:
        if stage.exists():
            shutil.rmtree(stage, ignore_errors=True)
    return [out_dir / name for name in files]


def _resolve_output(cfg: ScenarioConfig) -> Path:
    if cfg.output is None:
        raise MissingKeyError("no output directory: set 'output' or pass --out", "output")
    return Path(cfg.output)


def run_scenario(cfg: ScenarioConfig) -> list[Path]:
    """Run a single scenario and write ``report.json``, ``summary.csv`` and tables."""
    out = _resolve_output(cfg)
    result = run_point(cfg.kind, cfg.resolved_parameters(), cfg.units)
    names = METRICS[cfg.kind]
    files = {
        "summary.csv": _csv(names, [[result.summary[n] for n in names]]),
        **result.tables,
    }
    report = {"header": _header(cfg), "config": cfg.to_dict(),
              "summary": result.summary, "details": result.details}
    files["report.json"] = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    return _write_artifacts(out, files)


@dataclass
class SweepResult:
    axes: dict
    rows: list  # (grid values, summary dict or None, error message or None)
    provenance: dict

    def to_csv(self, kind: str) -> str:
        names = METRICS[kind]
        header = [*self.axes, *names, "error"]
        body = []
        for values, summary, error in self.rows:
            metrics = [summary[n] for n in names] if summary is not None else [None] * len(names)
            body.append([*values, *metrics, error])
        return _csv(header, body)


def _sweep_point(args):
    kind, params, units = args
    try:
        return run_point(kind, params, units).summary, None
    except Exception as exc:  # recorded per row, never aborts the sweep
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(cfg: ScenarioConfig, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; rows come back in grid order."""
    if not cfg.grid:
        raise MissingKeyError("sweep needs a 'grid' object", "grid")
    axes = dict(cfg.grid)
    base = cfg.resolved_parameters()
    points = list(itertools.product(*axes.values()))
    jobs = [(cfg.kind, {**base, **dict(zip(axes, values))}, cfg.units) for values in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_point, jobs))
    else:
        outcomes = [_sweep_point(j) for j in jobs]
    rows = [(values, summary, error) for values, (summary, error) in zip(points, outcomes)]
    provenance = {"config_hash": cfg.config_hash(), "version": __version__}
    return SweepResult(axes, rows, provenance)


def write_sweep(cfg: ScenarioConfig, result: SweepResult) -> list[Path]:
    out = _resolve_output(cfg)
    report = {"header": _header(cfg), "config": cfg.to_dict(), "provenance": result.provenance,
              "points": len(result.rows),
              "errors": sum(1 for _, _, e in result.rows if e is not None)}
    files = {"sweep.csv": result.to_csv(cfg.kind),
             "report.json": json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"}
    return _write_artifacts(out, files)
