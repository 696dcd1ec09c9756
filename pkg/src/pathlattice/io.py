"""Serialization of lattice objects.

CSV files use 17 significant digits, '.' decimals and LF line endings, so
doubles round-trip exactly. JSON files rely on Python's shortest repr,
which round-trips as well.

Formats
-------
wave function   CSV ``x,re,im``; JSON ``{"grid": {...}, "re": [...], "im": [...]}``
path            CSV ``t,x``
trajectory      CSV ``t,x,re,im`` (one row per node per stored time);
                JSON ``{"grid": {...}, "times": [...], "re": [[...]], "im": [[...]]}``
pattern         CSV ``x,P``; JSON ``{"grid": {...}, "mode": ..., "P": [...]}``
propagator      JSON ``{"header": {...}, "data": [[re, im], ...]}`` row-major;
                binary: the line ``PATHLATTICE-PROPAGATOR 1``, one line of header
                JSON, then little-endian float64 (re, im) pairs, row-major.
                The header holds x_min, x_max, n_points, t_from, t_to, hbar, mass.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .action import DiscretePath
from .doubleslit import ScreenPattern
from .kernel import PropagatorMatrix
from .lattice import NATURAL, PhysicalConstants, SpatialGrid, TimeSlicing, WaveFunction

MAGIC = b"PATHLATTICE-PROPAGATOR 1\n"


def fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write_rows(path, header, columns):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _read_columns(path, expected):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != list(expected):
            raise ValueError(f"{path}: expected columns {expected}, got {header}")
        rows = np.array([[float(v) for v in r] for r in reader if r], dtype=float)
    return rows.reshape(-1, len(expected)).T


def grid_to_dict(grid: SpatialGrid) -> dict:
    return {"x_min": grid.x_min, "x_max": grid.x_max, "n_points": grid.n_points}


def grid_from_dict(d: dict) -> SpatialGrid:
    return SpatialGrid(float(d["x_min"]), float(d["x_max"]), int(d["n_points"]))


def _grid_from_nodes(x: np.ndarray) -> SpatialGrid:
    return SpatialGrid(float(x[0]), float(x[-1]), len(x))


def write_wavefunction_csv(path, psi: WaveFunction):
    _write_rows(path, ("x", "re", "im"), (psi.x, psi.values.real, psi.values.imag))


def read_wavefunction_csv(path) -> WaveFunction:
    x, re, im = _read_columns(path, ("x", "re", "im"))
    return WaveFunction(_grid_from_nodes(x), re + 1j * im)


def wavefunction_to_json(psi: WaveFunction) -> dict:
    return {"grid": grid_to_dict(psi.grid), "re": psi.values.real.tolist(),
            "im": psi.values.imag.tolist()}


def wavefunction_from_json(d: dict) -> WaveFunction:
    return WaveFunction(grid_from_dict(d["grid"]), np.array(d["re"]) + 1j * np.array(d["im"]))


def write_path_csv(path, p: DiscretePath):
    _write_rows(path, ("t", "x"), (p.times, p.positions))


def read_path_csv(path) -> DiscretePath:
    t, x = _read_columns(path, ("t", "x"))
    return DiscretePath(TimeSlicing(float(t[0]), float(t[-1]), len(t) - 1), x)


def write_trajectory_csv(path, times, states):
    with open(path, "w", newline="") as fh:
        fh.write("t,x,re,im\n")
        for t, psi in zip(times, states):
            tt = fmt(t)
            for x, v in zip(psi.x, psi.values):
                fh.write(f"{tt},{fmt(x)},{fmt(v.real)},{fmt(v.imag)}\n")


def trajectory_to_json(times, states) -> dict:
    return {
        "grid": grid_to_dict(states[0].grid),
        "times": [float(t) for t in times],
        "re": [s.values.real.tolist() for s in states],
        "im": [s.values.imag.tolist() for s in states],
    }


def write_pattern_csv(path, pattern: ScreenPattern):
    _write_rows(path, ("x", "P"), (pattern.grid.nodes, pattern.P))


def pattern_to_json(pattern: ScreenPattern) -> dict:
    return {"grid": grid_to_dict(pattern.grid), "mode": pattern.label, "P": pattern.P.tolist()}


def read_pattern_csv(path, mode: str = "coherent") -> ScreenPattern:
    x, P = _read_columns(path, ("x", "P"))
    return ScreenPattern(_grid_from_nodes(x), P, mode)


def propagator_header(K: PropagatorMatrix, c: PhysicalConstants = NATURAL) -> dict:
    h = grid_to_dict(K.grid)
    h.update(t_from=K.t_from, t_to=K.t_to, hbar=c.hbar, mass=c.mass)
    return h


def _propagator_from(header: dict, pairs: np.ndarray):
    grid = grid_from_dict(header)
    n = grid.n_points
    entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
    K = PropagatorMatrix(grid, float(header["t_from"]), float(header["t_to"]), entries)
    return K, PhysicalConstants(float(header["hbar"]), float(header["mass"]))


def propagator_to_json(K: PropagatorMatrix, c: PhysicalConstants = NATURAL) -> dict:
    flat = K.entries.ravel()
    return {"header": propagator_header(K, c),
            "data": np.column_stack([flat.real, flat.imag]).tolist()}


def propagator_from_json(d: dict):
    """Returns (PropagatorMatrix, PhysicalConstants)."""
    return _propagator_from(d["header"], np.asarray(d["data"], dtype=float))


def write_propagator_binary(path, K: PropagatorMatrix, c: PhysicalConstants = NATURAL):
    flat = K.entries.ravel()
    pairs = np.column_stack([flat.real, flat.imag]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(propagator_header(K, c), sort_keys=True).encode() + b"\n")
        fh.write(pairs.tobytes())


def read_propagator_binary(path):
    """Returns (PropagatorMatrix, PhysicalConstants)."""
    with open(path, "rb") as fh:
        if fh.readline() != MAGIC:
            raise ValueError(f"{path}: not a propagator file")
        header = json.loads(fh.readline())
        pairs = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 2)
    n = int(header["n_points"])
    if pairs.shape[0] != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {pairs.shape[0]}")
    return _propagator_from(header, pairs)


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_table_csv(path, header, rows):
    """Rows of mixed str/number values; numbers get 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row]
            fh.write(",".join(cells) + "\n")
