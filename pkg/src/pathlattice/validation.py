"""The validation suite: every acceptance check as a callable returning a result.

Used by ``pathlattice validate`` and by the test-suite acceptance module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import action, doubleslit, kernel, schrodinger
from .lattice import (NATURAL, TimeSlicing, WaveFunction, build_grid, gaussian_packet, l2_norm,
                      normalized, position_moments)
from .potentials import Free, Harmonic


def _show(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    metrics: dict
    tolerances: dict
    notes: str = ""
    tables: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_show(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.key} {self.title}: {shown}"


def spread_width(sigma: float, T: float, c=NATURAL) -> float:
    return sigma * math.sqrt(1 + (c.hbar * T / (2 * c.mass * sigma**2)) ** 2)


# ---------------------------------------------------------------------------

def moments_check(epsilon: float = 0.01) -> CriterionResult:
    I0, I1, I2 = kernel.gaussian_moments(epsilon)
    A = kernel.normalization_constant(epsilon)
    m = {
        "I0_rel_err": abs(I0 / A - 1),
        "I1_abs": abs(I1),
        "I2_rel_err": abs(I2 / (A * 1j * epsilon) - 1),
    }
    tol = {"I0_rel_err": 1e-3, "I1_abs": 1e-10, "I2_rel_err": 1e-3}
    return CriterionResult("C1", "normalization constant and Gaussian moments",
                           all(m[k] < tol[k] for k in tol), m, tol)


COMPOSITION_LEVELS = ((0.01, 801), (0.005, 1132), (0.0025, 1601))


@lru_cache(maxsize=4)
def composed_free(epsilon: float, n_points: int, x_max: float = 20.0, duration: float = 1.0):
    grid = build_grid(-x_max, x_max, n_points)
    slicing = TimeSlicing(0.0, duration, int(round(duration / epsilon)))
    return kernel.sliced_propagator(grid, slicing, Free())


def central_relative_error(K: kernel.PropagatorMatrix, fraction: float = 0.5) -> float:
    grid = K.grid
    sel = grid.central(fraction)
    x = grid.nodes[sel]
    ref = kernel.free_particle_kernel(x[:, None], K.t_to, x[None, :], K.t_from)
    got = K.entries[np.ix_(sel, sel)]
    return float(np.max(np.abs(got - ref) / np.abs(ref)))


def composition_check(levels=COMPOSITION_LEVELS, x_max: float = 20.0) -> CriterionResult:
    rows = []
    for eps, n in levels:
        K = composed_free(eps, n, x_max)
        rows.append((eps, K.grid.spacing, n, int(round(1 / eps)), central_relative_error(K)))
    errs = [r[-1] for r in rows]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    m = {"max_rel_err": errs[0], "refined_errs": [float(e) for e in errs[1:]],
         "decreasing": decreasing}
    tol = {"max_rel_err": 0.02}
    return CriterionResult(
        "C2", "composed free kernel vs analytic kernel (central 50%)",
        errs[0] < tol["max_rel_err"] and decreasing, m, tol,
        tables={"convergence_table": (("epsilon", "dx", "n_points", "n_slices",
                                       "max_rel_err"), rows)},
    )


def unitarity_check() -> CriterionResult:
    eps, n = COMPOSITION_LEVELS[0]
    K = composed_free(eps, n)
    grid = K.grid
    step = kernel.build_propagator(grid, 0.0, eps, Free())
    psi = gaussian_packet(grid, 0.0, 1.0)
    out = kernel.propagate_sliced(psi, TimeSlicing(0.0, 1.0, 100), Free())
    m = {
        "composed_defect": kernel.unitarity_defect(K, margin=0.1),
        "norm_drift": abs(l2_norm(out) - l2_norm(psi)),
        "single_step_defect": kernel.unitarity_defect(step, margin=0.1),
    }
    tol = {"composed_defect": 1e-3, "norm_drift": 1e-3}
    return CriterionResult("C3", "unitarity / delta-function condition",
                           all(m[k] < tol[k] for k in tol), m, tol)


def equivalence_check(kernel_slices: int = 1000, cn_steps: int = 10000) -> CriterionResult:
    grid = build_grid(-20, 20, 801)
    psi = gaussian_packet(grid, 0.0, 1.0)
    m = {
        "free": schrodinger.kernel_vs_schrodinger(psi, Free(), 0.0, 1.0, kernel_slices, cn_steps),
        "harmonic": schrodinger.kernel_vs_schrodinger(psi, Harmonic(1.0), 0.0, 1.0,
                                                      kernel_slices, cn_steps),
    }
    tol = {"free": 1e-2, "harmonic": 2e-2}
    return CriterionResult("C4", "kernel <-> Schrodinger equivalence",
                           all(m[k] < tol[k] for k in tol), m, tol)


def conservation_check(seed: int = 0, n_pairs: int = 20) -> CriterionResult:
    grid = build_grid(-20, 20, 801)
    stencil = schrodinger.build_stencil(grid, Harmonic(1.0))
    rng = np.random.default_rng(seed)

    def rand():
        return normalized(WaveFunction(grid, rng.normal(size=grid.n_points)
                                       + 1j * rng.normal(size=grid.n_points)))

    herm = max(schrodinger.hermiticity_defect(stencil, rand(), rand()) for _ in range(n_pairs))
    psi = gaussian_packet(grid, 0.0, 1.0)
    traj = schrodinger.evolve(psi, Free(), 0.0, 1.0, 1000, record=True)
    n0 = l2_norm(psi)
    drift = max(abs(l2_norm(s) - n0) for s in traj.states)
    m = {"hermiticity_defect": herm, "cn_norm_drift": drift}
    tol = {"hermiticity_defect": 1e-12, "cn_norm_drift": 1e-10}
    return CriterionResult("C5", "conservation of probability (PDE side)",
                           all(m[k] < tol[k] for k in tol), m, tol)


def classical_limit_check(n_exponent: int = 1000, n_phase: int = 200,
                          offset: float = 0.5) -> CriterionResult:
    sl = TimeSlicing(0.0, 1.0, n_exponent)
    shape = lambda tau: np.sin(np.pi * tau)
    m, tol = {}, {}
    ok = True
    for name, pot in (("free", Free()), ("harmonic", Harmonic(1.0))):
        e = action.stationarity_exponent(pot, 0.0, 1.0, sl)
        base = action.classical_path(pot, 0.0, 1.0, sl)
        off = base.perturbed(offset * action.perturbation(shape, sl))
        e_off = action.stationarity_exponent(pot, 0.0, 1.0, sl, base_path=off)
        ph = kernel.classical_phase_check(pot, 0.0, 1.0, TimeSlicing(0.0, 1.0, n_phase))
        m[f"{name}_exponent"] = e
        m[f"{name}_offpath_exponent"] = e_off
        m[f"{name}_phase_mismatch"] = abs(ph.mismatch)
        ok &= abs(e - 2) <= 0.05 and abs(e_off - 1) <= 0.05 and abs(ph.mismatch) < 0.05
        tol[f"{name}_exponent"] = "2 +/- 0.05"
        tol[f"{name}_offpath_exponent"] = "1 +/- 0.05"
        tol[f"{name}_phase_mismatch"] = 0.05
    return CriterionResult("C6", "classical limit (stationarity and phase)", bool(ok), m, tol)


def maupertuis_check(n_slices: int = 10_000) -> CriterionResult:
    sl = TimeSlicing(0.0, 1.0, n_slices)
    m = {
        "free": action.maupertuis_defect(Free(), 0.0, 1.0, sl),
        "harmonic": action.maupertuis_defect(Harmonic(1.0), 1.0, math.cos(1.0), sl),
    }
    tol = {"free": 1e-6, "harmonic": 1e-6}
    return CriterionResult("C7", "Maupertuis/Hamilton identity",
                           all(m[k] < tol[k] for k in tol), m, tol)


def doubleslit_check() -> CriterionResult:
    cfg = doubleslit.reference_config()
    geom = doubleslit.geometry_from_dict(cfg)
    window = tuple(cfg["central_window"])
    amps = doubleslit.hole_amplitudes(geom)
    phi1, phi2 = amps
    pat = lambda mode, **kw: doubleslit.screen_pattern(geom, mode, amplitudes=amps, **kw)
    coherent, measured = pat("coherent"), pat("measured")
    s1, s2 = pat("single", hole=1), pat("single", hole=2)
    fractions = (0.0, 0.25, 0.5, 0.75, 1.0)
    vis_mixed = [doubleslit.fringe_visibility(pat("mixed", fraction=f), window)
                 for f in fractions]
    diff = coherent.P - measured.P
    interference = 2 * np.real(np.conj(phi1) * phi2)
    sign_changes = int(np.sum(np.signbit(diff[:-1]) != np.signbit(diff[1:])))
    m = {
        "measured_vs_sum": float(np.max(np.abs(measured.P - (s1.P + s2.P)))),
        "interference_identity": float(np.max(np.abs(diff - interference))),
        "coherent_visibility": doubleslit.fringe_visibility(coherent, window),
        "measured_visibility": doubleslit.fringe_visibility(measured, window),
        "mixed_monotone": all(b <= a for a, b in zip(vis_mixed, vis_mixed[1:])),
        "sign_changes": sign_changes,
    }
    tol = {"measured_vs_sum": 0.0, "interference_identity": 1e-12,
           "coherent_visibility": "> 0.9", "measured_visibility": "< 0.2",
           "mixed_monotone": True, "sign_changes": ">= 2 with both signs"}
    ok = (m["measured_vs_sum"] == 0.0 and m["interference_identity"] < 1e-12
          and m["coherent_visibility"] > 0.9 and m["measured_visibility"] < 0.2
          and m["mixed_monotone"] and sign_changes >= 2
          and bool(np.any(diff > 0)) and bool(np.any(diff < 0)))
    rows = [(float(x), float(a), float(b)) for x, a, b in
            zip(geom.detector_grid.nodes, coherent.P, measured.P)]
    return CriterionResult(
        "C8", "double-slit postulates", ok, m, tol,
        tables={
            "doubleslit_patterns": (("x", "P_coherent", "P_measured"), rows),
            "mixed_visibility": (("fraction", "visibility"),
                                 [(f, v) for f, v in zip(fractions, vis_mixed)]),
        },
    )


def spreading_check(kernel_eps: float = 0.01, cn_steps: int = 10000) -> CriterionResult:
    grid = build_grid(-20, 20, 801)
    psi = gaussian_packet(grid, 0.0, 1.0)
    target = spread_width(1.0, 1.0)
    via_kernel = kernel.propagate_sliced(psi, TimeSlicing(0.0, 1.0, int(round(1 / kernel_eps))),
                                         Free())
    via_cn = schrodinger.evolve(psi, Free(), 0.0, 1.0, cn_steps).final
    m = {
        "kernel_width_err": abs(position_moments(via_kernel)[1] - target),
        "cn_width_err": abs(position_moments(via_cn)[1] - target),
    }
    tol = {"kernel_width_err": 1e-3, "cn_width_err": 1e-3}
    return CriterionResult("C9", "Gaussian spreading oracle",
                           all(m[k] < tol[k] for k in tol), m, tol)


SUITE = {
    "C1": moments_check,
    "C2": composition_check,
    "C3": unitarity_check,
    "C4": equivalence_check,
    "C5": conservation_check,
    "C6": classical_limit_check,
    "C7": maupertuis_check,
    "C8": doubleslit_check,
    "C9": spreading_check,
}


def run_suite(keys=None) -> list:
    keys = list(SUITE) if keys is None else list(keys)
    return [SUITE[k]() for k in keys]
