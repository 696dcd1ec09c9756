"""Lattice path-integral propagation in one dimension."""

__version__ = "0.1.0"

from .errors import ConfigError, GuardViolation
from .lattice import (NATURAL, PhysicalConstants, SpatialGrid, TimeSlicing, WaveFunction,
                      build_grid, discrete_delta, gaussian_packet, inner, l2_norm,
                      position_moments)
from .potentials import Free, Harmonic, MaskedFree, Tabulated

__all__ = [
    "ConfigError", "GuardViolation", "NATURAL", "PhysicalConstants", "SpatialGrid",
    "TimeSlicing", "WaveFunction", "build_grid", "discrete_delta", "gaussian_packet", "inner",
    "l2_norm", "position_moments", "Free", "Harmonic", "MaskedFree", "Tabulated",
]
