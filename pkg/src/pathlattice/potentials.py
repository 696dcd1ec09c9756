"""Potential models V(x, t).

Every model is evaluated as ``pot(x, t, c)`` and vectorizes over ``x``.
``time_dependent`` tells the propagators whether a single step operator can
be reused across slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import NATURAL, PhysicalConstants, SpatialGrid


class PotentialDomainError(ValueError):
    pass


class Potential:
    kind = "abstract"
    time_dependent = False

    def __call__(self, x, t=0.0, c: PhysicalConstants = NATURAL):
        raise NotImplementedError

    def gradient(self, x, t=0.0, c: PhysicalConstants = NATURAL):
        """dV/dx by central difference; subclasses override with closed forms."""
        h = 1e-6
        x = np.asarray(x, dtype=float)
        return (self(x + h, t, c) - self(x - h, t, c)) / (2 * h)

    def transmits(self, x):
        """Boolean mask: where amplitude may pass. Only masks block."""
        return np.ones(np.shape(x), dtype=bool)

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Free(Potential):
    kind = "free"

    def __call__(self, x, t=0.0, c=NATURAL):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0

    def gradient(self, x, t=0.0, c=NATURAL):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0


@dataclass(frozen=True)
class Harmonic(Potential):
    omega: float = 1.0
    kind = "harmonic"

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError("omega must be positive and finite")

    def __call__(self, x, t=0.0, c=NATURAL):
        return 0.5 * c.mass * self.omega**2 * np.asarray(x, dtype=float) ** 2

    def gradient(self, x, t=0.0, c=NATURAL):
        return c.mass * self.omega**2 * np.asarray(x, dtype=float)

    def to_dict(self):
        return {"kind": self.kind, "omega": self.omega}


@dataclass(frozen=True, eq=False)
class Tabulated(Potential):
    """Samples on a grid, linearly interpolated; evaluating outside raises."""

    grid: SpatialGrid
    samples: np.ndarray = field(repr=False)
    kind = "tabulated"

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.grid.n_points,):
            raise ValueError("one potential sample per grid node is required")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __call__(self, x, t=0.0, c=NATURAL):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid.x_min, self.grid.x_max
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise PotentialDomainError(
                f"tabulated potential evaluated outside [{lo}, {hi}]"
            )
        out = np.interp(x, self.grid.nodes, self.samples)
        return out if out.ndim else float(out)

    def to_dict(self):
        return {
            "kind": self.kind,
            "grid": [self.grid.x_min, self.grid.x_max, self.grid.n_points],
            "samples": self.samples.tolist(),
        }


@dataclass(frozen=True)
class MaskedFree(Potential):
    """Free motion through apertures; V is +inf on the blocked complement."""

    apertures: tuple = ()
    kind = "masked_free"

    def __post_init__(self):
        aps = tuple(tuple(map(float, a)) for a in self.apertures)
        if not aps:
            raise ValueError("at least one aperture interval is required")
        for lo, hi in aps:
            if not hi > lo:
                raise ValueError(f"empty aperture [{lo}, {hi}]")
        object.__setattr__(self, "apertures", aps)

    def transmits(self, x):
        x = np.asarray(x, dtype=float)
        ok = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.apertures:
            ok |= (x >= lo) & (x <= hi)
        return ok

    def __call__(self, x, t=0.0, c=NATURAL):
        v = np.where(self.transmits(x), 0.0, np.inf)
        return v if v.ndim else float(v)

    def gradient(self, x, t=0.0, c=NATURAL):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0

    def to_dict(self):
        return {"kind": self.kind, "apertures": [list(a) for a in self.apertures]}


def potential_from_dict(d: dict) -> Potential:
    kind = d.get("kind", "free")
    if kind == "free":
        return Free()
    if kind == "harmonic":
        return Harmonic(float(d.get("omega", 1.0)))
    if kind == "tabulated":
        x_min, x_max, n = d["grid"]
        return Tabulated(SpatialGrid(float(x_min), float(x_max), int(n)), d["samples"])
    if kind == "masked_free":
        return MaskedFree(tuple(d["apertures"]))
    raise ValueError(f"unknown potential kind {kind!r}")
