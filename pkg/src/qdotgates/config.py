"""Scenario configuration files.

A config is a JSON object::

    {
      "kind": "triangle_ab",
      "parameters": {"J": 1.0, "U": 10000.0, "phi": 1.0},
      "output": "out/triangle",          # optional, --out overrides
      "units": "natural",                # optional, "natural" or "si"
      "grid": {"U": [100.0, 1000.0]}     # sweeps only
    }

Unknown keys are rejected at every level.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import QDotError


class ConfigError(QDotError):
    """Base class for configuration problems; ``key`` names the culprit."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class MissingKeyError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


class ConfigIOError(ConfigError):
    pass


NUMBER = "number"
INTEGER = "integer"
STRING = "string"
NUMBER_LIST = "number list"
DEFORMATION_LIST = "deformation list"

# kind -> {parameter: (type, required, default)}
SCHEMAS: dict[str, dict[str, tuple[str, bool, Any]]] = {
    "dynamical": {
        "delta_e": (NUMBER, True, None),
        "t": (NUMBER, True, None),
    },
    "triangle_ab": {
        "J": (NUMBER, True, None),
        "U": (NUMBER, True, None),
        "phi": (NUMBER, True, None),
        "windings": (INTEGER, False, 1),
        "epsilon": (NUMBER, False, 0.0),
        "deformations": (DEFORMATION_LIST, False, []),
        "site_phases": (NUMBER_LIST, False, None),
    },
    "blockade": {
        "J": (NUMBER, True, None),
        "U": (NUMBER, True, None),
    },
    "timing_sweep": {
        "J": (NUMBER, True, None),
        "U": (NUMBER, True, None),
        "phi": (NUMBER, True, None),
        "epsilons": (NUMBER_LIST, True, None),
        "windings": (INTEGER, False, 1),
        "deformations": (DEFORMATION_LIST, False, []),
    },
    "continuous_geometric": {
        "omega": (NUMBER, True, None),
        "path_radius": (NUMBER, True, None),
        "other_x": (NUMBER, True, None),
        "other_y": (NUMBER, True, None),
        "field": (STRING, True, None),
        "n_points": (INTEGER, False, 256),
        "B": (NUMBER, False, 0.0),
        "solenoid_x": (NUMBER, False, 0.0),
        "solenoid_y": (NUMBER, False, 0.0),
        "flux": (NUMBER, False, 0.0),
        "exclusion_radius": (NUMBER, False, None),
    },
    "displacement": {
        "omega": (NUMBER, True, None),
    },
}

SI_KINDS = {"continuous_geometric", "displacement"}
TOP_LEVEL_KEYS = {"kind", "parameters", "output", "units", "grid"}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    parameters: dict
    output: str | None = None
    units: str = "natural"
    grid: dict | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind, "parameters": dict(self.parameters)}
        if self.output is not None:
            d["output"] = self.output
        d["units"] = self.units
        if self.grid is not None:
            d["grid"] = {k: list(v) for k, v in self.grid.items()}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_overrides(self, output: str | None = None, units: str | None = None) -> "ScenarioConfig":
        cfg = ScenarioConfig(self.kind, dict(self.parameters),
                             output if output is not None else self.output,
                             units if units is not None else self.units, self.grid)
        _check_units(cfg.kind, cfg.units)
        return cfg

    def resolved_parameters(self) -> dict:
        """Parameters with defaults filled in."""
        out = {}
        for name, (_, _, default) in SCHEMAS[self.kind].items():
            out[name] = self.parameters.get(name, default)
        return out


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_value(name: str, kind: str, value) -> Any:
    if kind == NUMBER:
        if not _is_number(value):
            raise ConfigTypeError(f"parameter {name!r} must be a finite number, got {value!r}", name)
        return float(value)
    if kind == INTEGER:
        if isinstance(value, bool) or not (isinstance(value, int) or
                                           (isinstance(value, float) and value.is_integer())):
            raise ConfigTypeError(f"parameter {name!r} must be an integer, got {value!r}", name)
        return int(value)
    if kind == STRING:
        if not isinstance(value, str):
            raise ConfigTypeError(f"parameter {name!r} must be a string, got {value!r}", name)
        return value
    if kind == NUMBER_LIST:
        if value is None:
            return None
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            raise ConfigTypeError(f"parameter {name!r} must be a list of numbers, got {value!r}", name)
        return [float(v) for v in value]
    if kind == DEFORMATION_LIST:
        ok = isinstance(value, list) and all(
            isinstance(d, list) and len(d) == 2 and isinstance(d[0], int) and not isinstance(d[0], bool)
            and isinstance(d[1], list) and len(d[1]) == 2
            and all(isinstance(k, int) and not isinstance(k, bool) for k in d[1])
            for d in value)
        if not ok:
            raise ConfigTypeError(
                f"parameter {name!r} must be a list of [position, [dot_a, dot_b]], got {value!r}", name)
        return [[d[0], list(d[1])] for d in value]
    raise AssertionError(kind)


def _check_units(kind: str, units: str) -> None:
    if units not in ("natural", "si"):
        raise ConfigTypeError(f"units must be 'natural' or 'si', got {units!r}", "units")
    if units == "si" and kind not in SI_KINDS:
        raise ConfigTypeError(f"units 'si' is only available for {sorted(SI_KINDS)}", "units")


def validate_config(data: Any) -> ScenarioConfig:
    """Check a decoded JSON object and build a ``ScenarioConfig``."""
    if not isinstance(data, dict):
        raise ConfigTypeError("config must be a JSON object")
    for key in data:
        if key not in TOP_LEVEL_KEYS:
            raise UnknownKeyError(f"unknown top-level key {key!r}", key)
    if "kind" not in data:
        raise MissingKeyError("missing required key 'kind'", "kind")
    kind = data["kind"]
    if kind not in SCHEMAS:
        raise ConfigTypeError(f"kind must be one of {sorted(SCHEMAS)}, got {kind!r}", "kind")
    params = data.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigTypeError("'parameters' must be an object", "parameters")
    schema = SCHEMAS[kind]

    grid = data.get("grid")
    if grid is not None:
        if not isinstance(grid, dict) or not grid:
            raise ConfigTypeError("'grid' must be a non-empty object of value lists", "grid")
        for name, values in grid.items():
            if name not in schema:
                raise UnknownKeyError(f"unknown grid axis {name!r} for kind {kind!r}", name)
            if schema[name][0] not in (NUMBER, INTEGER):
                raise ConfigTypeError(f"grid axis {name!r} is not a numeric parameter", name)
            if not isinstance(values, list) or not values:
                raise ConfigTypeError(f"grid axis {name!r} needs a non-empty list", name)
            for v in values:
                _check_value(name, schema[name][0], v)
        grid = {name: [_check_value(name, schema[name][0], v) for v in values]
                for name, values in grid.items()}

    checked = {}
    for name, value in params.items():
        if name not in schema:
            raise UnknownKeyError(f"unknown parameter {name!r} for kind {kind!r}", name)
        checked[name] = _check_value(name, schema[name][0], value)
    for name, (_, required, _) in schema.items():
        if required and name not in checked and not (grid and name in grid):
            raise MissingKeyError(f"missing required parameter {name!r} for kind {kind!r}", name)

    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigTypeError("'output' must be a path string", "output")
    units = data.get("units", "natural")
    _check_units(kind, units)
    return ScenarioConfig(kind, checked, output, units, grid)


def parse_config(path) -> ScenarioConfig:
    """Read and validate a JSON scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigIOError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    if not text.strip():
        raise ConfigIOError(f"config {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigIOError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(data)


def dump_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(cfg.dumps(), encoding="utf-8")
