"""Lagrangians, discretized actions and classical-path diagnostics.

Slice actions use the midpoint rule in both position and time, with the
forward-difference velocity (x_{i+1} - x_i) / eps on each slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lattice import NATURAL, PhysicalConstants, TimeSlicing
from .potentials import Free, Harmonic, Potential


@dataclass(frozen=True, eq=False)
class DiscretePath:
    slicing: TimeSlicing
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        if x.shape != (self.slicing.n_slices + 1,):
            raise ValueError(
                f"a path over {self.slicing.n_slices} slices needs "
                f"{self.slicing.n_slices + 1} positions, got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ValueError("path positions must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @property
    def times(self) -> np.ndarray:
        return self.slicing.times

    @property
    def x_a(self) -> float:
        return float(self.positions[0])

    @property
    def x_b(self) -> float:
        return float(self.positions[-1])

    def perturbed(self, delta) -> "DiscretePath":
        return DiscretePath(self.slicing, self.positions + np.asarray(delta, dtype=float))


def lagrangian(v, x, t, pot: Potential, c: PhysicalConstants = NATURAL):
    return 0.5 * c.mass * np.asarray(v, dtype=float) ** 2 - pot(x, t, c)


def slice_action(x_i, x_next, t_i, slicing: TimeSlicing, pot: Potential,
                 c: PhysicalConstants = NATURAL):
    eps = slicing.epsilon
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    v = (np.asarray(x_next, dtype=float) - x_i) / eps
    mid = 0.5 * (np.asarray(x_next, dtype=float) + x_i)
    return eps * lagrangian(v, mid, t_i + 0.5 * eps, pot, c)


def path_action(path: DiscretePath, pot: Potential, c: PhysicalConstants = NATURAL) -> float:
    x, t = path.positions, path.times
    return float(np.sum(slice_action(x[:-1], x[1:], t[:-1], path.slicing, pot, c)))


def abbreviated_action(path: DiscretePath, pot: Potential = None,
                       c: PhysicalConstants = NATURAL) -> float:
    """Maupertuis' S0 = integral of 2T dt along the path."""
    eps = path.slicing.epsilon
    v = np.diff(path.positions) / eps
    return float(np.sum(eps * c.mass * v**2))


def _check_quadratic(pot: Potential):
    if not isinstance(pot, (Free, Harmonic)):
        raise TypeError(
            f"closed-form classical paths exist only for Free and Harmonic, got {pot.kind}"
        )


def _harmonic_sin(pot: Harmonic, duration: float) -> float:
    s = math.sin(pot.omega * duration)
    # conjugate point: omega*T a multiple of pi
    if abs(s) < 1e-9:
        raise ValueError(
            f"degenerate harmonic interval: omega*T = {pot.omega * duration:.12g} "
            "is a multiple of pi (conjugate point), boundary-value problem not unique"
        )
    return s


def classical_trajectory(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing):
    """Analytic x(t) and v(t) callables for Free/Harmonic boundary data."""
    _check_quadratic(pot)
    t_a, T = slicing.t_a, slicing.duration
    if isinstance(pot, Free):
        v0 = (x_b - x_a) / T
        return (lambda t: x_a + v0 * (np.asarray(t) - t_a)), (lambda t: v0 + 0 * np.asarray(t))
    w = pot.omega
    s = _harmonic_sin(pot, T)
    t_b = slicing.t_b

    def x(t):
        t = np.asarray(t, dtype=float)
        return (x_a * np.sin(w * (t_b - t)) + x_b * np.sin(w * (t - t_a))) / s

    def v(t):
        t = np.asarray(t, dtype=float)
        return w * (-x_a * np.cos(w * (t_b - t)) + x_b * np.cos(w * (t - t_a))) / s

    return x, v


def classical_path(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing,
                   c: PhysicalConstants = NATURAL) -> DiscretePath:
    x, _ = classical_trajectory(pot, x_a, x_b, slicing)
    positions = x(slicing.times)
    positions[0], positions[-1] = x_a, x_b
    return DiscretePath(slicing, positions)


def classical_energy(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing,
                     c: PhysicalConstants = NATURAL) -> float:
    """E = T + V of the analytic trajectory, evaluated at t_a."""
    _, v = classical_trajectory(pot, x_a, x_b, slicing)
    return float(0.5 * c.mass * v(slicing.t_a) ** 2 + pot(x_a, slicing.t_a, c))


def classical_action(pot: Potential, x_a: float, x_b: float, duration: float,
                     c: PhysicalConstants = NATURAL) -> float:
    """Closed-form S along the classical path (continuum)."""
    _check_quadratic(pot)
    if isinstance(pot, Free):
        return 0.5 * c.mass * (x_b - x_a) ** 2 / duration
    w = pot.omega
    s = _harmonic_sin(pot, duration)
    return c.mass * w / (2 * s) * ((x_a**2 + x_b**2) * math.cos(w * duration) - 2 * x_a * x_b)


def maupertuis_defect(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing,
                      c: PhysicalConstants = NATURAL) -> float:
    """|S - (S0 - E (t_b - t_a))| along the sampled classical path."""
    path = classical_path(pot, x_a, x_b, slicing, c)
    S = path_action(path, pot, c)
    S0 = abbreviated_action(path, pot, c)
    E = classical_energy(pot, x_a, x_b, slicing, c)
    return abs(S - (S0 - E * slicing.duration))


def euler_lagrange_residual(path: DiscretePath, pot: Potential,
                            c: PhysicalConstants = NATURAL) -> np.ndarray:
    """m x'' + dV/dx at each interior node, with a 3-point second difference."""
    if path.slicing.n_slices < 2:
        raise ValueError("at least two slices are needed for an interior node")
    x, t, eps = path.positions, path.times, path.slicing.epsilon
    accel = (x[2:] - 2 * x[1:-1] + x[:-2]) / eps**2
    return c.mass * accel + pot.gradient(x[1:-1], t[1:-1], c)


def perturbation(shape: Callable, slicing: TimeSlicing) -> np.ndarray:
    """Sample ``shape`` at tau = (t - t_a) / T; it must vanish at both ends."""
    tau = (slicing.times - slicing.t_a) / slicing.duration
    d = np.asarray(shape(tau), dtype=float)
    scale = max(1.0, float(np.max(np.abs(d))))
    if abs(d[0]) > 1e-12 * scale or abs(d[-1]) > 1e-12 * scale:
        raise ValueError("perturbation must vanish at the path endpoints")
    d[0] = d[-1] = 0.0
    return d


def action_variation(base: DiscretePath, delta: np.ndarray, amplitude: float,
                     pot: Potential, c: PhysicalConstants = NATURAL) -> float:
    """S[base + a * delta] - S[base]."""
    if amplitude == 0:
        return 0.0
    return path_action(base.perturbed(amplitude * delta), pot, c) - path_action(base, pot, c)


def stationarity_exponent(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing,
                          c: PhysicalConstants = NATURAL,
                          perturbation_shape: Callable = lambda tau: np.sin(np.pi * tau),
                          amplitudes=(1e-1, 1e-2, 1e-3),
                          base_path: DiscretePath = None) -> float:
    """Log-log slope of |S[x + a dx] - S[x]| against a.

    Around a path where the first variation vanishes the slope is 2; anywhere
    else the linear term dominates and the slope tends to 1. The base path
    defaults to the classical path.
    """
    a = np.asarray(amplitudes, dtype=float)
    if a.ndim != 1 or a.size < 3:
        raise ValueError("at least three amplitudes are required")
    if np.any(a <= 0):
        raise ValueError("amplitudes must be positive")
    base = classical_path(pot, x_a, x_b, slicing, c) if base_path is None else base_path
    delta = perturbation(perturbation_shape, base.slicing)
    dS = np.array([action_variation(base, delta, ai, pot, c) for ai in a])
    if np.any(dS == 0):
        raise ValueError("action variation vanished exactly; exponent undefined")
    slope, _ = np.polyfit(np.log(a), np.log(np.abs(dS)), 1)
    return float(slope)
