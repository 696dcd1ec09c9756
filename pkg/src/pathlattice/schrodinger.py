"""Finite-difference Schrodinger solver used to cross-check the kernel engine.

The Hamiltonian is the 3-point stencil with Dirichlet ends (psi = 0 outside
the grid). Time stepping is Crank-Nicolson, i.e. the Cayley transform
(1 + i dt H / 2 hbar)^-1 (1 - i dt H / 2 hbar), which is exactly unitary for a
Hermitian stencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from . import kernel
from .lattice import (NATURAL, PhysicalConstants, SpatialGrid, TimeSlicing, WaveFunction,
                      l2_norm)
from .potentials import Potential


@dataclass(frozen=True, eq=False)
class HamiltonianStencil:
    grid: SpatialGrid
    potential: np.ndarray = field(repr=False)
    constants: PhysicalConstants = NATURAL

    def __post_init__(self):
        v = np.array(self.potential)
        if v.shape != (self.grid.n_points,):
            raise ValueError("one potential sample per node is required")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential samples must be finite for the finite-difference stencil")
        v.setflags(write=False)
        object.__setattr__(self, "potential", v)

    @property
    def kinetic_coefficient(self) -> float:
        c = self.constants
        return -(c.hbar**2) / (2 * c.mass * self.grid.spacing**2)


def build_stencil(grid: SpatialGrid, pot: Potential, t: float = 0.0,
                  c: PhysicalConstants = NATURAL) -> HamiltonianStencil:
    return HamiltonianStencil(grid, pot(grid.nodes, t, c), c)


def _check(psi: WaveFunction, stencil: HamiltonianStencil):
    if psi.grid != stencil.grid:
        raise ValueError("wave function and stencil live on different grids")


def _apply(values: np.ndarray, stencil: HamiltonianStencil) -> np.ndarray:
    lap = -2 * values
    lap[1:] += values[:-1]
    lap[:-1] += values[1:]
    return stencil.kinetic_coefficient * lap + stencil.potential * values


def apply_hamiltonian(psi: WaveFunction, stencil: HamiltonianStencil) -> WaveFunction:
    _check(psi, stencil)
    return WaveFunction(psi.grid, _apply(psi.values, stencil))


def hermiticity_defect(stencil: HamiltonianStencil, psi: WaveFunction, phi: WaveFunction) -> float:
    """|<H psi, phi> - <psi, H phi>| dx."""
    _check(psi, stencil)
    _check(phi, stencil)
    lhs = np.vdot(_apply(psi.values, stencil), phi.values)
    rhs = np.vdot(psi.values, _apply(phi.values, stencil))
    return float(abs(lhs - rhs) * stencil.grid.spacing)


def _cayley_bands(stencil: HamiltonianStencil, dt: float) -> np.ndarray:
    n = stencil.grid.n_points
    g = 1j * dt / (2 * stencil.constants.hbar)
    k = stencil.kinetic_coefficient
    ab = np.empty((3, n), dtype=complex)
    ab[0, :] = g * k
    ab[1, :] = 1 + g * (stencil.potential - 2 * k)
    ab[2, :] = g * k
    return ab


def _cn_values(values, stencil, dt, ab=None):
    if ab is None:
        ab = _cayley_bands(stencil, dt)
    rhs = values - 1j * dt / (2 * stencil.constants.hbar) * _apply(values, stencil)
    try:
        return solve_banded((1, 1), ab, rhs, overwrite_b=True, check_finite=False)
    except LinAlgError as exc:  # cannot happen for a Hermitian stencil
        raise AssertionError(f"Crank-Nicolson system singular: {exc}") from exc


def cn_step(psi: WaveFunction, stencil: HamiltonianStencil, dt: float) -> WaveFunction:
    _check(psi, stencil)
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return psi
    return WaveFunction(psi.grid, _cn_values(psi.values, stencil, dt))


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    states: list

    @property
    def final(self) -> WaveFunction:
        return self.states[-1]


def evolve(psi: WaveFunction, pot: Potential, t_a: float, t_b: float, n_steps: int,
           c: PhysicalConstants = NATURAL, record: bool = False) -> Trajectory:
    """Repeated Crank-Nicolson steps; V(x, t) is sampled at each step midpoint.

    With ``record`` every intermediate state is kept, otherwise only the
    initial and final states.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    if t_b < t_a:
        raise ValueError("t_b must not precede t_a")
    if t_b == t_a:
        return Trajectory(np.array([t_a, t_b]), [psi, psi])
    dt = (t_b - t_a) / n_steps
    grid = psi.grid
    v = psi.values.copy()
    stencil = ab = None
    times, states = [t_a], [psi]
    for n in range(n_steps):
        t = t_a + n * dt
        if stencil is None or pot.time_dependent:
            stencil = build_stencil(grid, pot, t + 0.5 * dt, c)
            ab = _cayley_bands(stencil, dt)
        v = _cn_values(v, stencil, dt, ab.copy())
        if record:
            times.append(t + dt)
            states.append(WaveFunction(grid, v))
    if not record:
        times.append(t_b)
        states.append(WaveFunction(grid, v))
    times[-1] = t_b
    return Trajectory(np.array(times), states)


def kernel_vs_schrodinger(psi0: WaveFunction, pot: Potential, t_a: float, t_b: float,
                          kernel_slices: int, cn_steps: int, c: PhysicalConstants = NATURAL,
                          bandlimit: bool = True) -> float:
    """||psi_kernel(t_b) - psi_CN(t_b)|| / ||psi0||."""
    if t_b == t_a:
        return 0.0
    slicing = TimeSlicing(t_a, t_b, kernel_slices)
    kernel.check_stability(psi0.grid, slicing.epsilon, c)
    via_kernel = kernel.propagate_sliced(psi0, slicing, pot, c, bandlimit)
    via_cn = evolve(psi0, pot, t_a, t_b, cn_steps, c).final
    return l2_norm(via_kernel - via_cn) / l2_norm(psi0)
