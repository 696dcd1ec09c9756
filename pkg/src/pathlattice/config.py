"""Experiment configuration: JSON files validated against per-experiment schemas.

A configuration file must be complete for its experiment. When no file is
given the CLI falls back to :data:`DEFAULTS`.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from pathlib import Path

import jsonschema

from .errors import ConfigError, GuardViolation
from .lattice import PhysicalConstants, SpatialGrid, TimeSlicing
from .potentials import Harmonic, potential_from_dict

EXPERIMENTS = ("propagate", "doubleslit", "validate", "classical-limit", "action-check")

_pos = {"type": "number", "exclusiveMinimum": 0}
_num = {"type": "number"}
_grid = {
    "type": "object",
    "required": ["x_min", "x_max", "n_points"],
    "properties": {"x_min": _num, "x_max": _num, "n_points": {"type": "integer", "minimum": 2}},
    "additionalProperties": False,
}
_constants = {
    "type": "object",
    "properties": {"hbar": _pos, "mass": _pos},
    "additionalProperties": False,
}
_potential = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["free", "harmonic", "tabulated", "masked_free"]},
        "omega": _pos,
        "grid": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3},
        "samples": {"type": "array", "items": _num},
        "apertures": {"type": "array", "items": {"type": "array", "items": _num,
                                                 "minItems": 2, "maxItems": 2}},
    },
    "additionalProperties": False,
}
_interval = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_common = {"experiment": {"enum": list(EXPERIMENTS)}, "constants": _constants,
           "output": {"type": "object", "properties": {"format": {"enum": ["csv", "json"]}},
                      "additionalProperties": False}}

_endpoints = {"potential": _potential, "x_a": _num, "x_b": _num, "t_a": _num, "t_b": _num,
              "n_slices": {"type": "integer", "minimum": 1}}

SCHEMAS = {
    "propagate": {
        "type": "object",
        "required": ["experiment", "grid", "initial", "t_a", "t_b", "kernel", "cn"],
        "properties": {
            **_common, "grid": _grid, "potential": _potential, "t_a": _num, "t_b": _num,
            "initial": {"type": "object", "required": ["center", "width"],
                        "properties": {"center": _num, "width": _pos, "momentum": _num},
                        "additionalProperties": False},
            "kernel": {"type": "object", "required": ["epsilon"],
                       "properties": {"enabled": {"type": "boolean"}, "epsilon": _pos,
                                      "bandlimit": {"type": "boolean"}},
                       "additionalProperties": False},
            "cn": {"type": "object", "required": ["dt"],
                   "properties": {"enabled": {"type": "boolean"}, "dt": _pos,
                                  "record_every": {"type": "integer", "minimum": 1}},
                   "additionalProperties": False},
        },
        "additionalProperties": False,
    },
    "doubleslit": {
        "type": "object",
        "required": ["experiment", "mode"],
        "properties": {
            **_common,
            "mode": {"enum": ["coherent", "single1", "single2", "measured", "mixed"]},
            "fraction": {"type": "number", "minimum": 0, "maximum": 1},
            "window": _interval,
            "geometry": {"oneOf": [
                {"const": "reference"},
                {"type": "object",
                 "required": ["source_x", "screen_B_t", "slit1", "slit2", "screen_C_t",
                              "detector"],
                 "properties": {"source_x": _num, "screen_B_t": _pos, "screen_C_t": _pos,
                                "slit1": _interval, "slit2": _interval, "detector": _grid},
                 "additionalProperties": False},
            ]},
        },
        "additionalProperties": False,
    },
    "classical-limit": {
        "type": "object",
        "required": ["experiment", "potential", "x_a", "x_b", "t_a", "t_b", "n_slices"],
        "properties": {
            **_common, **_endpoints,
            "amplitudes": {"type": "array", "items": _pos, "minItems": 3},
            "offset": _num,
            "phase_slices": {"type": "integer", "minimum": 1},
            "phase_grid": _grid,
        },
        "additionalProperties": False,
    },
    "action-check": {
        "type": "object",
        "required": ["experiment", "potential", "x_a", "x_b", "t_a", "t_b", "n_slices"],
        "properties": {
            **_common, **_endpoints,
            "el_sweep": {"type": "array", "items": {"type": "integer", "minimum": 2},
                         "minItems": 1},
        },
        "additionalProperties": False,
    },
    "validate": {
        "type": "object",
        "required": ["experiment"],
        "properties": {
            **_common,
            "seed": {"type": "integer"},
            "criteria": {"type": "array", "items": {"type": "string", "pattern": "^C[1-9]$"}},
        },
        "additionalProperties": False,
    },
}

DEFAULTS = {
    "propagate": {
        "experiment": "propagate",
        "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 801},
        "potential": {"kind": "free"},
        "initial": {"center": 0.0, "width": 1.0, "momentum": 0.0},
        "t_a": 0.0, "t_b": 1.0,
        "kernel": {"enabled": True, "epsilon": 0.01},
        "cn": {"enabled": True, "dt": 0.001},
    },
    "doubleslit": {"experiment": "doubleslit", "mode": "coherent", "geometry": "reference"},
    "classical-limit": {
        "experiment": "classical-limit", "potential": {"kind": "free"},
        "x_a": 0.0, "x_b": 1.0, "t_a": 0.0, "t_b": 1.0, "n_slices": 1000,
        "amplitudes": [0.1, 0.01, 0.001], "phase_slices": 200,
    },
    "action-check": {
        "experiment": "action-check", "potential": {"kind": "harmonic", "omega": 1.0},
        "x_a": 1.0, "x_b": math.cos(1.0), "t_a": 0.0, "t_b": 1.0, "n_slices": 10000,
        "el_sweep": [100, 200, 400, 800, 1600],
    },
    "validate": {"experiment": "validate"},
}


def _field_path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = err.message.split("'")[1]
        parts.append(missing)
    return ".".join(parts) or "<root>"


def validate(cfg: dict, experiment: str = None) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    kind = cfg.get("experiment", experiment)
    if kind is None:
        raise ConfigError("experiment", "missing experiment kind")
    if kind not in SCHEMAS:
        raise ConfigError("experiment", f"unknown experiment {kind!r}; expected one of {EXPERIMENTS}")
    if experiment is not None and kind != experiment:
        raise ConfigError("experiment", f"config is for {kind!r} but {experiment!r} was requested")
    cfg = {**cfg, "experiment": kind}
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_field_path(err), err.message)
    _check_values(cfg)
    return cfg


def load(path, experiment: str = None) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return validate(cfg, experiment)


def defaults(experiment: str) -> dict:
    return copy.deepcopy(DEFAULTS[experiment])


def digest(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def constants(cfg: dict) -> PhysicalConstants:
    c = cfg.get("constants", {})
    return PhysicalConstants(float(c.get("hbar", 1.0)), float(c.get("mass", 1.0)))


def grid(d: dict, field: str = "grid") -> SpatialGrid:
    try:
        return SpatialGrid(float(d["x_min"]), float(d["x_max"]), int(d["n_points"]))
    except ValueError as exc:
        raise ConfigError(field, str(exc)) from exc


def slice_count(duration: float, step: float, field: str) -> int:
    n = int(round(duration / step))
    if n < 1 or abs(n * step - duration) > 1e-9 * max(1.0, abs(duration)):
        raise ConfigError(field, f"{step} does not divide the interval {duration} evenly")
    return n


def potential(cfg: dict):
    try:
        return potential_from_dict(cfg.get("potential", {"kind": "free"}))
    except (KeyError, ValueError) as exc:
        raise ConfigError("potential", str(exc)) from exc


def _check_values(cfg: dict):
    """Module preconditions that the schema cannot express."""
    kind = cfg["experiment"]
    if kind in ("propagate", "classical-limit", "action-check"):
        if not cfg["t_b"] > cfg["t_a"]:
            raise ConfigError("t_b", "t_b must exceed t_a")
        pot = potential(cfg)
    if kind == "propagate":
        grid(cfg["grid"])
        T = cfg["t_b"] - cfg["t_a"]
        slice_count(T, cfg["kernel"]["epsilon"], "kernel.epsilon")
        slice_count(T, cfg["cn"]["dt"], "cn.dt")
        if pot.kind == "masked_free" and cfg["cn"].get("enabled", True):
            raise ConfigError("potential", "masked potentials are not representable in the CN stencil")
    if kind in ("classical-limit", "action-check"):
        if pot.kind not in ("free", "harmonic"):
            raise ConfigError("potential.kind", "only free and harmonic have closed-form classical paths")
        if isinstance(pot, Harmonic):
            wT = pot.omega * (cfg["t_b"] - cfg["t_a"])
            if abs(math.sin(wT)) < 1e-9:
                raise GuardViolation(
                    "conjugate-point guard sin(omega*T) != 0",
                    f"omega*T = {wT:.12g} is a multiple of pi",
                )
        TimeSlicing(cfg["t_a"], cfg["t_b"], cfg["n_slices"])
    if kind == "classical-limit" and "phase_grid" in cfg:
        grid(cfg["phase_grid"], "phase_grid")
    if kind == "doubleslit" and cfg["mode"] == "mixed" and "fraction" not in cfg:
        raise ConfigError("fraction", "mixed mode requires a fraction in [0, 1]")
