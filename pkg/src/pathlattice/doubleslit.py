"""Two-slit amplitudes and screen patterns.

Each hole amplitude chains two exact free-particle kernels, source -> slit
point -> detector, integrated over the slit with Gauss-Legendre quadrature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.special import roots_legendre

from .kernel import free_particle_kernel
from .lattice import NATURAL, PhysicalConstants, SpatialGrid

MODES = ("coherent", "single", "measured", "mixed")
MIN_SLIT_NODES = 64


@dataclass(frozen=True)
class SlitGeometry:
    source_x: float
    screen_B_t: float
    slit1: tuple
    slit2: tuple
    screen_C_t: float
    detector_grid: SpatialGrid

    def __post_init__(self):
        s1 = tuple(map(float, self.slit1))
        s2 = tuple(map(float, self.slit2))
        for name, (lo, hi) in (("slit1", s1), ("slit2", s2)):
            if not hi > lo:
                raise ValueError(f"{name} [{lo}, {hi}] is empty")
        if not (s1[1] < s2[0] or s2[1] < s1[0]):
            raise ValueError("slit intervals overlap")
        if not (self.screen_B_t > 0 and self.screen_C_t > 0):
            raise ValueError("flight times must be positive")
        object.__setattr__(self, "slit1", s1)
        object.__setattr__(self, "slit2", s2)

    def slit(self, hole: int) -> tuple:
        if hole == 1:
            return self.slit1
        if hole == 2:
            return self.slit2
        raise ValueError(f"hole must be 1 or 2, got {hole}")

    @property
    def separation(self) -> float:
        return abs(sum(self.slit2) - sum(self.slit1)) / 2


def geometry_from_dict(d: dict) -> SlitGeometry:
    det = d["detector"]
    return SlitGeometry(
        float(d["source_x"]), float(d["screen_B_t"]), tuple(d["slit1"]), tuple(d["slit2"]),
        float(d["screen_C_t"]),
        SpatialGrid(float(det["x_min"]), float(det["x_max"]), int(det["n_points"])),
    )


def reference_config() -> dict:
    text = resources.files("pathlattice").joinpath("data/reference_geometry.json").read_text()
    return json.loads(text)


def reference_geometry() -> SlitGeometry:
    return geometry_from_dict(reference_config())


def slit_amplitude(geom: SlitGeometry, hole: int, x=None, c: PhysicalConstants = NATURAL,
                   n_nodes: int = 128):
    """phi_h(x) = int_slit K(x, t_B + t_C; y, t_B) K(y, t_B; source, 0) dy.

    ``x`` defaults to the detector nodes.
    """
    if n_nodes < MIN_SLIT_NODES:
        raise ValueError(f"at least {MIN_SLIT_NODES} quadrature nodes per slit are required")
    lo, hi = geom.slit(hole)
    x = geom.detector_grid.nodes if x is None else np.asarray(x, dtype=float)
    u, w = roots_legendre(n_nodes)
    half = 0.5 * (hi - lo)
    y = 0.5 * (hi + lo) + half * u
    t_B = geom.screen_B_t
    t_C = t_B + geom.screen_C_t
    first = free_particle_kernel(y, t_B, geom.source_x, 0.0, c)
    second = free_particle_kernel(np.asarray(x)[..., None], t_C, y, t_B, c)
    return (second * first) @ (w * half)


@dataclass(eq=False)
class ScreenPattern:
    grid: SpatialGrid
    P: np.ndarray = field(repr=False)
    mode: str
    hole: int = None
    fraction: float = None

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.shape != (self.grid.n_points,):
            raise ValueError("one intensity per detector node is required")
        if np.any(P < 0) or not np.all(np.isfinite(P)):
            raise ValueError("intensities must be finite and non-negative")
        self.P = P

    @property
    def label(self) -> str:
        if self.mode == "single":
            return f"single{self.hole}"
        if self.mode == "mixed":
            return f"mixed({self.fraction:g})"
        return self.mode


def hole_amplitudes(geom: SlitGeometry, c: PhysicalConstants = NATURAL):
    return slit_amplitude(geom, 1, c=c), slit_amplitude(geom, 2, c=c)


def screen_pattern(geom: SlitGeometry, mode: str = "coherent", c: PhysicalConstants = NATURAL,
                   hole: int = None, fraction: float = None, amplitudes=None) -> ScreenPattern:
    """Detector intensities for one measurement regime.

    coherent  |phi1 + phi2|^2
    single    |phi_hole|^2
    measured  |phi1|^2 + |phi2|^2
    mixed     fraction * measured + (1 - fraction) * coherent
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "mixed" and (fraction is None or not 0.0 <= fraction <= 1.0):
        raise ValueError(f"mixed mode needs a fraction in [0, 1], got {fraction}")
    if mode == "single" and hole not in (1, 2):
        raise ValueError(f"single mode needs hole 1 or 2, got {hole}")
    phi1, phi2 = hole_amplitudes(geom, c) if amplitudes is None else amplitudes
    grid = geom.detector_grid
    if mode == "single":
        P = np.abs(phi1 if hole == 1 else phi2) ** 2
        return ScreenPattern(grid, P, mode, hole=hole)
    coherent = np.abs(phi1 + phi2) ** 2
    measured = np.abs(phi1) ** 2 + np.abs(phi2) ** 2
    if mode == "coherent":
        return ScreenPattern(grid, coherent, mode)
    if mode == "measured":
        return ScreenPattern(grid, measured, mode)
    return ScreenPattern(grid, fraction * measured + (1 - fraction) * coherent, mode,
                         fraction=float(fraction))


def _window_mask(grid: SpatialGrid, window) -> np.ndarray:
    lo, hi = map(float, window)
    if not hi > lo:
        raise ValueError(f"degenerate window [{lo}, {hi}]")
    if lo < grid.x_min or hi > grid.x_max:
        raise ValueError(f"window [{lo}, {hi}] leaves the detector [{grid.x_min}, {grid.x_max}]")
    x = grid.nodes
    return (x >= lo) & (x <= hi)


def fringe_visibility(pattern: ScreenPattern, window) -> float:
    """(P_max - P_min) / (P_max + P_min) over the detector nodes inside ``window``."""
    mask = _window_mask(pattern.grid, window)
    if mask.sum() < 3:
        raise ValueError("window holds fewer than three detector nodes")
    P = pattern.P[mask]
    hi, lo = float(P.max()), float(P.min())
    if hi + lo == 0:
        raise ValueError("pattern vanishes on the window")
    return (hi - lo) / (hi + lo)


def detection_probability(pattern: ScreenPattern, x_bin, n_emitted: int = 1):
    """Probability of landing in ``x_bin`` and the expected count out of ``n_emitted``.

    Nodes with lo <= x <= hi belong to the bin.
    """
    mask = _window_mask(pattern.grid, x_bin)
    if not mask.any():
        raise ValueError(f"bin {tuple(x_bin)} contains no detector nodes")
    total = float(np.sum(pattern.P))
    if total == 0:
        raise ValueError("pattern carries no probability")
    p = float(np.sum(pattern.P[mask])) / total
    return n_emitted * p, p
