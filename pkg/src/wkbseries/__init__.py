"""All-order WKB quantisation of V(x) = U0 / cos^2(alpha x)."""

from .coeffs import c_k0_sequence, half_binomial, phase_coefficient, phase_term
from .model import DimensionlessSpec, PotentialSpec, action_variable, derive_dimensionless
from .spectrum import (
    asymptotic_error,
    error_in_spacings,
    error_limit,
    exact_energy,
    fit_scaling_slope,
    torus_energy,
    wkb_energy,
)

__all__ = [
    "DimensionlessSpec",
    "PotentialSpec",
    "action_variable",
    "asymptotic_error",
    "c_k0_sequence",
    "derive_dimensionless",
    "error_in_spacings",
    "error_limit",
    "exact_energy",
    "fit_scaling_slope",
    "half_binomial",
    "phase_coefficient",
    "phase_term",
    "torus_energy",
    "wkb_energy",
]

__version__ = "0.1.0"
