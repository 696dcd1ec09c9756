"""Uniform 1D lattices, lattice wave functions and Riemann-sum quadrature.

All integrals over space are Riemann sums with weight ``spacing`` per node.
The grid is a truncation of the real line; nothing here wraps around.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

# amplitude (relative to peak) allowed at the grid edges
EDGE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")


NATURAL = PhysicalConstants()


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid with node i at ``x_min + i * spacing``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.spacing

    def node(self, i: int) -> float:
        if not 0 <= i < self.n_points:
            raise IndexError(f"node index {i} outside [0, {self.n_points})")
        return self.x_min + i * self.spacing

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the node at coordinate ``x``; ``x`` must be a node."""
        i = int(round((x - self.x_min) / self.spacing))
        if not 0 <= i < self.n_points or abs(self.node(i) - x) > tol * max(1.0, abs(x)):
            raise ValueError(f"x={x} is not a node of {self}")
        return i

    def interior(self, margin: float) -> slice:
        """Slice excluding a fraction ``margin`` of nodes at each end."""
        if not 0 <= margin < 0.5:
            raise ValueError("margin must lie in [0, 0.5)")
        k = int(math.floor(margin * self.n_points))
        return slice(k, self.n_points - k)

    def central(self, fraction: float) -> np.ndarray:
        """Boolean mask of nodes in the central ``fraction`` of the extent."""
        mid = 0.5 * (self.x_min + self.x_max)
        half = 0.5 * fraction * (self.x_max - self.x_min)
        x = self.nodes
        return (x >= mid - half - 1e-12) & (x <= mid + half + 1e-12)


def build_grid(x_min: float, x_max: float, n_points: int) -> SpatialGrid:
    return SpatialGrid(float(x_min), float(x_max), n_points)


@dataclass(frozen=True)
class TimeSlicing:
    t_a: float
    t_b: float
    n_slices: int

    def __post_init__(self):
        if int(self.n_slices) != self.n_slices or self.n_slices < 1:
            raise ValueError(f"n_slices must be a positive integer, got {self.n_slices}")
        if not self.t_b > self.t_a:
            raise ValueError("t_b must exceed t_a")
        object.__setattr__(self, "n_slices", int(self.n_slices))

    @property
    def epsilon(self) -> float:
        return (self.t_b - self.t_a) / self.n_slices

    @property
    def duration(self) -> float:
        return self.t_b - self.t_a

    @property
    def times(self) -> np.ndarray:
        t = self.t_a + np.arange(self.n_slices + 1) * self.epsilon
        t[-1] = self.t_b
        return t


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} amplitudes, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("wave function amplitudes must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def __mul__(self, a):
        return WaveFunction(self.grid, a * self.values)

    __rmul__ = __mul__

    def __add__(self, other: WaveFunction):
        _check_same_grid(self, other)
        return WaveFunction(self.grid, self.values + other.values)

    def __sub__(self, other: WaveFunction):
        _check_same_grid(self, other)
        return WaveFunction(self.grid, self.values - other.values)


def _check_same_grid(a: WaveFunction, b: WaveFunction):
    if a.grid != b.grid:
        raise ValueError("wave functions live on different grids")


def inner(psi: WaveFunction, phi: WaveFunction) -> complex:
    """<psi, phi> = sum conj(psi_i) phi_i dx."""
    _check_same_grid(psi, phi)
    return complex(np.vdot(psi.values, phi.values) * psi.grid.spacing)


def l2_norm(psi: WaveFunction) -> float:
    return math.sqrt(float(np.sum(psi.density)) * psi.grid.spacing)


def normalized(psi: WaveFunction) -> WaveFunction:
    n = l2_norm(psi)
    if n == 0:
        raise ValueError("cannot normalize the zero wave function")
    return psi * (1.0 / n)


def position_moments(psi: WaveFunction) -> tuple[float, float]:
    """Mean and standard deviation of x under the density |psi|^2."""
    rho = psi.density
    total = float(np.sum(rho))
    if total == 0:
        raise ValueError("zero wave function has no moments")
    x = psi.x
    mean = float(np.sum(x * rho) / total)
    var = float(np.sum((x - mean) ** 2 * rho) / total)
    return mean, math.sqrt(var)


def gaussian_packet(grid: SpatialGrid, center: float, width: float,
                    momentum: float = 0.0) -> WaveFunction:
    """Normalized Gaussian with density standard deviation ``width``.

    ``momentum`` is the wavenumber k0 of the carrier exp(i k0 x).
    """
    if not width > 0:
        raise ValueError("width must be positive")
    if center - 4 * width < grid.x_min or center + 4 * width > grid.x_max:
        raise ValueError(
            f"packet support [{center - 4 * width}, {center + 4 * width}] "
            f"leaves the grid [{grid.x_min}, {grid.x_max}]"
        )
    x = grid.nodes
    values = (2 * math.pi * width**2) ** -0.25 * np.exp(
        -((x - center) ** 2) / (4 * width**2) + 1j * momentum * x
    )
    edge = max(abs(values[0]), abs(values[-1])) / (2 * math.pi * width**2) ** -0.25
    if edge > EDGE_TOLERANCE:
        warnings.warn(
            f"packet amplitude at the grid edge is {edge:.2e} of peak "
            f"(tolerance {EDGE_TOLERANCE:g})",
            stacklevel=2,
        )
    return WaveFunction(grid, values)


def discrete_delta(grid: SpatialGrid, node_index: int) -> WaveFunction:
    """Lattice delta: 1/dx at one node, so that sum(delta) * dx == 1."""
    if not 0 <= node_index < grid.n_points:
        raise IndexError(f"node index {node_index} outside [0, {grid.n_points})")
    values = np.zeros(grid.n_points, dtype=complex)
    values[node_index] = 1.0 / grid.spacing
    return WaveFunction(grid, values)
