"""Command-line front end.

    pathlattice {propagate,doubleslit,validate,classical-limit,action-check,run}
                [--config PATH] [--out DIR] [--format csv|json] [--seed INT]

Exit codes: 0 success, 2 configuration error, 3 guard violation,
4 validation-suite failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, action, config, doubleslit, io, kernel, schrodinger, validation
from .errors import ConfigError, GuardViolation
from .lattice import TimeSlicing, gaussian_packet, l2_norm, position_moments

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_VALIDATION = 0, 2, 3, 4


class Outputs:
    """Writes data files into one directory and remembers their digests."""

    def __init__(self, out_dir, fmt: str):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.fmt = fmt
        self.files = {}

    def _done(self, name):
        path = self.dir / name
        self.files[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        return path

    def table(self, stem, header, rows):
        name = f"{stem}.{self.fmt}"
        if self.fmt == "csv":
            io.write_table_csv(self.dir / name, header, rows)
        else:
            io.write_json(self.dir / name, {"columns": list(header),
                                            "rows": [list(map(_plain, r)) for r in rows]})
        return self._done(name)

    def wavefunction(self, stem, psi):
        name = f"{stem}.{self.fmt}"
        if self.fmt == "csv":
            io.write_wavefunction_csv(self.dir / name, psi)
        else:
            io.write_json(self.dir / name, io.wavefunction_to_json(psi))
        return self._done(name)

    def trajectory(self, stem, times, states):
        name = f"{stem}.{self.fmt}"
        if self.fmt == "csv":
            io.write_trajectory_csv(self.dir / name, times, states)
        else:
            io.write_json(self.dir / name, io.trajectory_to_json(times, states))
        return self._done(name)

    def pattern(self, stem, pattern):
        name = f"{stem}.{self.fmt}"
        if self.fmt == "csv":
            io.write_pattern_csv(self.dir / name, pattern)
        else:
            io.write_json(self.dir / name, io.pattern_to_json(pattern))
        return self._done(name)

    def path(self, stem, p):
        if self.fmt == "csv":
            name = f"{stem}.csv"
            io.write_path_csv(self.dir / name, p)
            return self._done(name)
        return self.table(stem, ("t", "x"), list(zip(p.times, p.positions)))


def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


# ---------------------------------------------------------------------------

def _propagate(cfg, out: Outputs):
    c = config.constants(cfg)
    grid = config.grid(cfg["grid"])
    pot = config.potential(cfg)
    init = cfg["initial"]
    psi0 = gaussian_packet(grid, init["center"], init["width"], init.get("momentum", 0.0))
    t_a, t_b = cfg["t_a"], cfg["t_b"]
    T = t_b - t_a
    metrics, finals = {"initial_norm": l2_norm(psi0)}, {}
    kcfg, ccfg = cfg["kernel"], cfg["cn"]
    if kcfg.get("enabled", True):
        n = config.slice_count(T, kcfg["epsilon"], "kernel.epsilon")
        kernel.check_stability(grid, kcfg["epsilon"], c)
        psi = kernel.propagate_sliced(psi0, TimeSlicing(t_a, t_b, n), pot, c,
                                      kcfg.get("bandlimit", True))
        out.wavefunction("psi_kernel", psi)
        metrics.update(kernel_norm=l2_norm(psi), kernel_width=position_moments(psi)[1],
                       kernel_slices=n)
        finals["kernel"] = psi
    if ccfg.get("enabled", True):
        n = config.slice_count(T, ccfg["dt"], "cn.dt")
        every = ccfg.get("record_every")
        traj = schrodinger.evolve(psi0, pot, t_a, t_b, n, c, record=every is not None)
        psi = traj.final
        out.wavefunction("psi_cn", psi)
        if every is not None:
            keep = list(range(0, len(traj.states), every))
            if keep[-1] != len(traj.states) - 1:
                keep.append(len(traj.states) - 1)
            out.trajectory("trajectory_cn", traj.times[keep], [traj.states[i] for i in keep])
        metrics.update(cn_norm=l2_norm(psi), cn_width=position_moments(psi)[1], cn_steps=n)
        finals["cn"] = psi
    if len(finals) == 2:
        metrics["l2_discrepancy"] = l2_norm(finals["kernel"] - finals["cn"]) / l2_norm(psi0)
    if pot.kind == "free" and init.get("momentum", 0.0) == 0.0:
        metrics["analytic_width"] = validation.spread_width(init["width"], T, c)
    return metrics, {}, None


def _doubleslit(cfg, out: Outputs):
    c = config.constants(cfg)
    ref = doubleslit.reference_config()
    geo = cfg.get("geometry", "reference")
    try:
        geom = doubleslit.geometry_from_dict(ref if geo == "reference" else geo)
    except ValueError as exc:
        raise ConfigError("geometry", str(exc)) from exc
    window = tuple(cfg.get("window", ref["central_window"]))
    mode = cfg["mode"]
    kw = {}
    if mode.startswith("single"):
        kw["hole"] = int(mode[-1])
        mode = "single"
    if mode == "mixed":
        kw["fraction"] = cfg["fraction"]
    pattern = doubleslit.screen_pattern(geom, mode, c, **kw)
    out.pattern("pattern", pattern)
    try:
        vis = doubleslit.fringe_visibility(pattern, window)
    except ValueError as exc:
        raise ConfigError("window", str(exc)) from exc
    metrics = {"mode": pattern.label, "visibility": vis, "window": list(window),
               "total_intensity": float(np.sum(pattern.P) * geom.detector_grid.spacing)}
    return metrics, {}, None


def _endpoints(cfg):
    sl = TimeSlicing(cfg["t_a"], cfg["t_b"], cfg["n_slices"])
    return config.potential(cfg), float(cfg["x_a"]), float(cfg["x_b"]), sl, config.constants(cfg)


def _classical_limit(cfg, out: Outputs):
    pot, x_a, x_b, sl, c = _endpoints(cfg)
    amps = cfg.get("amplitudes", [0.1, 0.01, 0.001])
    shape = lambda tau: np.sin(np.pi * tau)
    exponent = action.stationarity_exponent(pot, x_a, x_b, sl, c, shape, amps)
    base = action.classical_path(pot, x_a, x_b, sl, c)
    off = base.perturbed(cfg.get("offset", 0.5) * action.perturbation(shape, sl))
    off_exponent = action.stationarity_exponent(pot, x_a, x_b, sl, c, shape, amps, base_path=off)
    phase_sl = TimeSlicing(sl.t_a, sl.t_b, cfg.get("phase_slices", 200))
    pgrid = config.grid(cfg["phase_grid"], "phase_grid") if "phase_grid" in cfg else None
    try:
        ph = kernel.classical_phase_check(pot, x_a, x_b, phase_sl, c, pgrid)
    except ValueError as exc:
        if isinstance(exc, GuardViolation):
            raise
        raise ConfigError("x_a/x_b", str(exc)) from exc
    out.path("classical_path", base)
    metrics = {"exponent": exponent, "offpath_exponent": off_exponent,
               "numeric_phase": ph.numeric_phase, "action_over_hbar": ph.action_over_hbar,
               "prefactor_phase": ph.prefactor_phase, "phase_mismatch": ph.mismatch}
    tol = {"exponent": "2 +/- 0.05", "offpath_exponent": "1 +/- 0.05", "phase_mismatch": 0.05}
    passed = abs(exponent - 2) <= 0.05 and abs(off_exponent - 1) <= 0.05 and abs(ph.mismatch) < 0.05
    return metrics, tol, bool(passed)


def _action_check(cfg, out: Outputs):
    pot, x_a, x_b, sl, c = _endpoints(cfg)
    defect = action.maupertuis_defect(pot, x_a, x_b, sl, c)
    path = action.classical_path(pot, x_a, x_b, sl, c)
    rows = []
    for n in cfg.get("el_sweep", [100, 200, 400, 800, 1600]):
        s = TimeSlicing(sl.t_a, sl.t_b, n)
        res = action.euler_lagrange_residual(action.classical_path(pot, x_a, x_b, s, c), pot, c)
        rows.append((n, s.epsilon, float(np.max(np.abs(res)))))
    out.path("classical_path", path)
    out.table("el_residuals", ("n_slices", "epsilon", "max_abs_residual"), rows)
    orders = [math.log2(a[2] / b[2]) for a, b in zip(rows, rows[1:]) if b[2] > 0]
    metrics = {"maupertuis_defect": defect, "action": action.path_action(path, pot, c),
               "abbreviated_action": action.abbreviated_action(path, pot, c),
               "energy": action.classical_energy(pot, x_a, x_b, sl, c),
               "el_observed_orders": orders}
    return metrics, {"maupertuis_defect": 1e-6}, defect < 1e-6


def _validate(cfg, out: Outputs):
    keys = cfg.get("criteria")
    results = []
    for key in keys or validation.SUITE:
        fn = validation.SUITE[key]
        r = fn(seed=cfg["seed"]) if key == "C5" and "seed" in cfg else fn()
        results.append(r)
        print(r.line())
        for stem, (header, rows) in r.tables.items():
            out.table(stem, header, rows)
    rows = []
    for r in results:
        for k, v in r.metrics.items():
            rows.append((r.key, k, json.dumps(_plain(v)), json.dumps(_plain(r.tolerances.get(k))),
                         "pass" if r.passed else "fail"))
    out.table("metrics", ("criterion", "metric", "value", "tolerance", "status"), rows)
    metrics = {r.key: _plain(r.metrics) for r in results}
    tol = {r.key: _plain(r.tolerances) for r in results}
    flags = {r.key: r.passed for r in results}
    return metrics, tol, flags


RUNNERS = {
    "propagate": _propagate,
    "doubleslit": _doubleslit,
    "validate": _validate,
    "classical-limit": _classical_limit,
    "action-check": _action_check,
}


def run(config_path=None, out_dir="out", fmt=None, experiment=None, seed=None):
    """Run one experiment; returns (exit_code, manifest dict).

    Raises ConfigError / GuardViolation, which :func:`main` maps to exit codes.
    """
    if config_path is None:
        if experiment is None:
            raise ConfigError("--config", "a config file is required when no experiment is named")
        cfg = config.validate(config.defaults(experiment), experiment)
    else:
        cfg = config.load(config_path, experiment)
    kind = cfg["experiment"]
    if seed is not None and kind == "validate":
        cfg["seed"] = seed
    fmt = fmt or cfg.get("output", {}).get("format", "csv")
    out = Outputs(out_dir, fmt)
    metrics, tolerances, passed = RUNNERS[kind](cfg, out)
    if isinstance(passed, dict):
        all_passed = all(passed.values())
    else:
        all_passed = passed
    manifest = {
        "experiment": kind,
        "config_sha256": config.digest(cfg),
        "config": cfg,
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "seed": seed,
        "format": fmt,
        "metrics": _plain(metrics),
        "tolerances": _plain(tolerances),
        "passed": passed,
        "files": dict(sorted(out.files.items())),
    }
    io.write_json(out.dir / "manifest.json", manifest)
    code = EXIT_VALIDATION if kind == "validate" and not all_passed else EXIT_OK
    return code, manifest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pathlattice", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*config.EXPERIMENTS, "run"):
        sp = sub.add_parser(name, help="run the experiment named in the config file"
                            if name == "run" else f"run the {name} experiment")
        sp.add_argument("--config", help="JSON experiment config (defaults if omitted)")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--format", choices=("csv", "json"), help="data file format")
        sp.add_argument("--seed", type=int, help="seed for the random states of the validate suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    experiment = None if args.command == "run" else args.command
    try:
        code, manifest = run(args.config, args.out, args.format, experiment, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    summary = {k: v for k, v in manifest["metrics"].items()} if manifest["experiment"] != "validate" \
        else manifest["passed"]
    print(json.dumps(summary, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
