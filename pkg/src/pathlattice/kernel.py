"""Short-time kernels, propagator matrices and their composition.

A :class:`PropagatorMatrix` stores kernel *values* K(x_j, t_to; x_i, t_from).
The quadrature weight dx is applied when matrices are multiplied, by
:func:`compose` and :func:`propagate`, never stored in the entries.

Lattice regularization
----------------------
On a lattice the one-slice kernel (1/A) exp(i m s^2 / (2 hbar eps)) can only
be sampled faithfully where its phase changes by less than pi between
neighbouring nodes, |s| < pi hbar eps / (m dx). Beyond that separation the
Riemann sum aliases the chirp back onto the diagonal and composed kernels
grow without bound. With ``bandlimit=True`` (the default) the free factor of
every entry is multiplied by a Fresnel window W(s) which keeps exactly those
wavenumbers the lattice can carry, |k| <= pi/dx. Inside the resolved band W
ripples about 1 (Fresnel ripple, up to ~20% near the band edge) and it falls
to ~1/2 at the edge and towards 0 beyond it. For the free particle the windowed entries are
the exact band-limited propagator, so free slices compose as a semigroup on
an unbounded lattice. ``bandlimit=False`` gives the raw sampled values.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import fresnel, roots_legendre

from .action import classical_path, path_action, _check_quadratic, _harmonic_sin
from .errors import GuardViolation
from .lattice import (NATURAL, PhysicalConstants, SpatialGrid, TimeSlicing, WaveFunction,
                      discrete_delta)
from .potentials import Free, Harmonic, Potential

STABILITY_GUARD = "stability guard m*dx^2/(hbar*eps) < pi"


def normalization_constant(epsilon: float, c: PhysicalConstants = NATURAL) -> complex:
    """A = (2 pi i hbar eps / m)^(1/2), principal branch."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return math.sqrt(2 * math.pi * c.hbar * epsilon / c.mass) * cmath.exp(0.25j * math.pi)


def _potential_phase(V, epsilon, c):
    V = np.asarray(V, dtype=float)
    finite = np.isfinite(V)
    return np.where(finite, np.exp(-1j * epsilon / c.hbar * np.where(finite, V, 0.0)), 0.0)


def short_time_kernel(x_to, x_from, t, epsilon, pot: Potential, c: PhysicalConstants = NATURAL):
    """(1/A) exp[(i eps / hbar) L((x_to - x_from)/eps, midpoint, t + eps/2)]."""
    A = normalization_constant(epsilon, c)
    x_to = np.asarray(x_to, dtype=float)
    x_from = np.asarray(x_from, dtype=float)
    s = x_to - x_from
    mid = 0.5 * (x_to + x_from)
    kinetic = np.exp(1j * c.mass * s**2 / (2 * c.hbar * epsilon))
    out = kinetic * _potential_phase(pot(mid, t + 0.5 * epsilon, c), epsilon, c) / A
    out = out * (pot.transmits(x_to) & pot.transmits(x_from))
    return complex(out) if out.ndim == 0 else out


def lattice_window(separation, epsilon: float, spacing: float,
                   c: PhysicalConstants = NATURAL):
    """Fresnel window restricting the one-slice free kernel to |k| <= pi/dx."""
    s = np.asarray(separation, dtype=float)
    beta = c.hbar * epsilon / (2 * c.mass)
    k_cut = math.pi / spacing
    shift = c.mass * s / (c.hbar * epsilon)
    scale = math.sqrt(2 * beta / math.pi)
    S_hi, C_hi = fresnel((k_cut - shift) * scale)
    S_lo, C_lo = fresnel((-k_cut - shift) * scale)
    return cmath.exp(0.25j * math.pi) / math.sqrt(2) * ((C_hi - C_lo) - 1j * (S_hi - S_lo))


def stability_ratio(grid: SpatialGrid, epsilon: float, c: PhysicalConstants = NATURAL) -> float:
    return c.mass * grid.spacing**2 / (c.hbar * epsilon)


def check_stability(grid: SpatialGrid, epsilon: float, c: PhysicalConstants = NATURAL):
    r = stability_ratio(grid, epsilon, c)
    if not r < math.pi:
        raise GuardViolation(
            STABILITY_GUARD,
            f"m*dx^2/(hbar*eps) = {r:.6g} >= pi (dx={grid.spacing:g}, eps={epsilon:g}); "
            "refine the grid or lengthen the slice",
        )
    return r


@dataclass(eq=False)
class PropagatorMatrix:
    grid: SpatialGrid
    t_from: float
    t_to: float
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        n = self.grid.n_points
        if e.shape != (n, n):
            raise ValueError(f"propagator must be {n}x{n}, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("propagator entries must be finite")
        e.setflags(write=False)
        self.entries = e

    def scaled(self, a) -> "PropagatorMatrix":
        return PropagatorMatrix(self.grid, self.t_from, self.t_to, a * self.entries)


def identity_propagator(grid: SpatialGrid, t: float = 0.0) -> PropagatorMatrix:
    """The lattice delta as a kernel: 1/dx on the diagonal."""
    return PropagatorMatrix(grid, t, t, np.eye(grid.n_points) / grid.spacing)


def build_propagator(grid: SpatialGrid, t: float, epsilon: float, pot: Potential,
                     c: PhysicalConstants = NATURAL, bandlimit: bool = True) -> PropagatorMatrix:
    """One-slice propagator from t to t + epsilon on ``grid``."""
    check_stability(grid, epsilon, c)
    n, dx = grid.n_points, grid.spacing
    s = np.arange(n) * dx
    free = np.exp(1j * c.mass * s**2 / (2 * c.hbar * epsilon)) / normalization_constant(epsilon, c)
    if bandlimit:
        free = free * lattice_window(s, epsilon, dx, c)
    entries = toeplitz(free, free)
    if not isinstance(pot, Free):
        # midpoint (x_j + x_i)/2 depends only on j + i
        mids = grid.x_min + 0.5 * dx * np.arange(2 * n - 1)
        phase = _potential_phase(pot(mids, t + 0.5 * epsilon, c), epsilon, c)
        idx = np.add.outer(np.arange(n), np.arange(n))
        entries = entries * phase[idx]
        open_ = pot.transmits(grid.nodes)
        if not open_.all():
            entries = entries * np.outer(open_, open_)
    return PropagatorMatrix(grid, t, t + epsilon, entries)


def _check_grids(a: SpatialGrid, b: SpatialGrid):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def compose(K_later: PropagatorMatrix, K_earlier: PropagatorMatrix) -> PropagatorMatrix:
    """K(b, a) = sum_c K(b, c) K(c, a) dx_c."""
    _check_grids(K_later.grid, K_earlier.grid)
    gap = abs(K_later.t_from - K_earlier.t_to)
    if gap > 1e-12 * max(1.0, abs(K_later.t_from)):
        raise ValueError(
            f"time mismatch: earlier kernel ends at {K_earlier.t_to}, "
            f"later starts at {K_later.t_from}"
        )
    entries = (K_later.entries @ K_earlier.entries) * K_later.grid.spacing
    return PropagatorMatrix(K_later.grid, K_earlier.t_from, K_later.t_to, entries)


def sliced_propagator(grid: SpatialGrid, slicing: TimeSlicing, pot: Potential,
                      c: PhysicalConstants = NATURAL, bandlimit: bool = True) -> PropagatorMatrix:
    """Compose all slices of ``slicing``; static potentials use repeated squaring."""
    eps = slicing.epsilon
    if pot.time_dependent:
        K = None
        for t in slicing.times[:-1]:
            step = build_propagator(grid, t, eps, pot, c, bandlimit)
            K = step if K is None else compose(step, K)
        return K
    step = build_propagator(grid, slicing.t_a, eps, pot, c, bandlimit).entries
    dx = grid.spacing
    result, power, n = None, step, slicing.n_slices
    while n:
        if n & 1:
            result = power if result is None else (power @ result) * dx
        n >>= 1
        if n:
            power = (power @ power) * dx
    return PropagatorMatrix(grid, slicing.t_a, slicing.t_b, result)


def propagate(psi: WaveFunction, K: PropagatorMatrix) -> WaveFunction:
    """psi'_j = sum_i K[j][i] psi_i dx."""
    _check_grids(psi.grid, K.grid)
    return WaveFunction(psi.grid, (K.entries @ psi.values) * psi.grid.spacing)


def propagate_sliced(psi: WaveFunction, slicing: TimeSlicing, pot: Potential,
                     c: PhysicalConstants = NATURAL, bandlimit: bool = True) -> WaveFunction:
    """Apply the slices of ``slicing`` one at a time without forming their product."""
    grid, eps = psi.grid, slicing.epsilon
    v, dx = psi.values.copy(), grid.spacing
    step = None
    for t in slicing.times[:-1]:
        if step is None or pot.time_dependent:
            step = build_propagator(grid, t, eps, pot, c, bandlimit).entries
        v = (step @ v) * dx
    return WaveFunction(grid, v)


def free_particle_kernel(x_b, t_b, x_a, t_a, c: PhysicalConstants = NATURAL):
    """sqrt(m / (2 pi i hbar T)) exp(i m (x_b - x_a)^2 / (2 hbar T)), principal branch."""
    T = t_b - t_a
    if not T > 0:
        raise ValueError(f"t_b must exceed t_a, got T = {T}")
    d = np.asarray(x_b, dtype=float) - np.asarray(x_a, dtype=float)
    pref = math.sqrt(c.mass / (2 * math.pi * c.hbar * T)) * cmath.exp(-0.25j * math.pi)
    out = pref * np.exp(1j * c.mass * d**2 / (2 * c.hbar * T))
    return complex(out) if out.ndim == 0 else out


class ExtrapolationWarning(RuntimeWarning):
    pass


_GL_NODES, _GL_WEIGHTS = roots_legendre(12)


def _damped_half_line(power: int, a: float, damping: float, chunk: int = 100_000) -> complex:
    """int_0^inf eta^power exp(i a eta^2 - damping eta^2) d eta.

    Panels are bounded by the zeros of the phase, a eta^2 = k pi, so every
    panel holds half an oscillation; 12-point Gauss-Legendre on each.
    """
    eta2_max = (60.0 + 2.0 * power) / damping
    n_panels = int(math.ceil(a * eta2_max / math.pi))
    total = 0j
    for start in range(0, n_panels, chunk):
        k = np.arange(start, min(start + chunk, n_panels) + 1)
        edges = np.sqrt(k * math.pi / a)
        lo, hi = edges[:-1, None], edges[1:, None]
        half = 0.5 * (hi - lo)
        eta = lo + half * (1 + _GL_NODES)
        f = eta**power * np.exp((1j * a - damping) * eta**2)
        total += complex(np.sum(f @ _GL_WEIGHTS * half[:, 0]))
    return total


def damped_moment(power: int, epsilon: float, damping: float,
                  c: PhysicalConstants = NATURAL) -> complex:
    """int eta^power exp(i m eta^2 / (2 hbar eps)) exp(-damping eta^2) over the real line."""
    if not damping > 0:
        raise ValueError("damping must be positive")
    a = c.mass / (2 * c.hbar * epsilon)
    half = _damped_half_line(power, a, damping)
    # the negative half-line mirrors the positive one with sign (-1)^power
    return half + (-1) ** power * half


def _extrapolate_to_zero(h, f):
    """Neville's polynomial extrapolation of f(h) to h = 0."""
    h = list(h)
    p = list(f)
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i])
    return p[0]


def gaussian_moments(epsilon: float, c: PhysicalConstants = NATURAL,
                     dampings=(1e-2, 5e-3, 2.5e-3), rtol: float = 1e-6):
    """Raw Fresnel moments (I0, I1, I2) of exp(i m eta^2 / (2 hbar eps)).

    Each conditionally convergent integral is regularized with a factor
    exp(-d eta^2), evaluated for every d in ``dampings`` and extrapolated to
    d -> 0. Expected values are (A, 0, A i hbar eps / m). An
    :class:`ExtrapolationWarning` is issued when dropping the smallest
    damping moves the extrapolant by more than ``rtol``.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    dampings = sorted(float(d) for d in dampings)[::-1]
    if len(dampings) < 2:
        raise ValueError("at least two damping values are needed")
    out = []
    for power in (0, 1, 2):
        f = [damped_moment(power, epsilon, d, c) for d in dampings]
        best = _extrapolate_to_zero(dampings, f)
        coarse = _extrapolate_to_zero(dampings[:-1], f[:-1])
        scale = max(abs(best), abs(f[-1]))
        if scale > 0 and abs(best - coarse) > rtol * scale and power != 1:
            warnings.warn(
                f"damping extrapolation of moment {power} not converged: "
                f"|change| = {abs(best - coarse) / scale:.2e} relative",
                ExtrapolationWarning,
                stacklevel=2,
            )
        out.append(complex(best))
    return tuple(out)


def unitarity_defect(K: PropagatorMatrix, margin: float = 0.0) -> float:
    """max |sum_j K*[j][i'] K[j][i] dx - delta_ii'/dx| * dx over columns i, i'.

    ``margin`` drops that fraction of columns at each edge; the sum over j
    always runs over the whole grid.
    """
    dx = K.grid.spacing
    cols = K.entries[:, K.grid.interior(margin)]
    gram = (cols.conj().T @ cols) * dx * dx
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


class PhaseCheck(NamedTuple):
    numeric_phase: float
    action_over_hbar: float
    prefactor_phase: float

    @property
    def mismatch(self) -> float:
        """numeric phase minus predicted phase, wrapped to (-pi, pi]."""
        return wrap_phase(self.numeric_phase - self.action_over_hbar - self.prefactor_phase)


def wrap_phase(phi: float) -> float:
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


def prefactor_phase(pot: Potential, duration: float) -> float:
    """Phase of the quadratic-Lagrangian prefactor, including caustic (Maslov) jumps."""
    _check_quadratic(pot)
    if isinstance(pot, Harmonic):
        _harmonic_sin(pot, duration)
        return -0.25 * math.pi - 0.5 * math.pi * math.floor(pot.omega * duration / math.pi)
    return -0.25 * math.pi


DEFAULT_PHASE_GRID = SpatialGrid(-40.0, 40.0, 1601)


def classical_phase_check(pot: Potential, x_a: float, x_b: float, slicing: TimeSlicing,
                          c: PhysicalConstants = NATURAL, grid: SpatialGrid = None,
                          bandlimit: bool = True) -> PhaseCheck:
    """Phase of the composed lattice kernel K(x_b <- x_a) against S_cl/hbar.

    The kernel entry is obtained as propagate(delta at x_a), i.e. column x_a
    of the composed propagator, so the full product is never formed.
    """
    _check_quadratic(pot)
    grid = DEFAULT_PHASE_GRID if grid is None else grid
    ia, ib = grid.index_of(x_a), grid.index_of(x_b)
    path = classical_path(pot, x_a, x_b, slicing, c)
    action = path_action(path, pot, c) / c.hbar
    column = propagate_sliced(discrete_delta(grid, ia), slicing, pot, c, bandlimit)
    numeric = cmath.phase(column.values[ib])
    return PhaseCheck(numeric, action, prefactor_phase(pot, slicing.duration))
