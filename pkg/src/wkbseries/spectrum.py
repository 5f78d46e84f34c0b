"""Exact, torus and truncated-WKB levels, and the error in units of the level spacing.

Truncation is indexed by K, the number of series terms kept beyond the
leading one in the bracket

    (nu + 1/2) + (1/2) sum_{k=0}^{K} binom(1/2, k) B^(1-2k).

K = 0 is the torus (Bohr-Sommerfeld-Maslov) rule and the hbar order is N = 2K.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coeffs import half_binomial, inner_partial_sum
from .model import DimensionlessSpec, PotentialSpec, as_dimensionless, check_quantum_number

__all__ = [
    "SeriesDivergenceWarning",
    "SpectrumRow",
    "asymptotic_error",
    "error_in_spacings",
    "error_limit",
    "exact_energy",
    "fit_scaling_slope",
    "hbar_order",
    "inner_bracket",
    "mean_spacing",
    "spectrum_rows",
    "summed_series_energy",
    "torus_energy",
    "wkb_energy",
]

Spec = PotentialSpec | DimensionlessSpec


class SeriesDivergenceWarning(RuntimeWarning):
    """Truncated series used with B <= 1, where the binomial series does not converge."""


def hbar_order(K: int) -> int:
    return 2 * K


def _check_order(K: int) -> int:
    if isinstance(K, bool) or int(K) != K or K < 0:
        raise ValueError(f"order K must be a non-negative integer, got {K!r}")
    return int(K)


def exact_energy(nu: int, spec: Spec) -> float:
    d = as_dimensionless(spec)
    nu = check_quantum_number(nu)
    return d.A * ((nu + 0.5) + 0.5 * math.sqrt(1.0 + d.B * d.B)) ** 2


def torus_energy(nu: int, spec: Spec) -> float:
    d = as_dimensionless(spec)
    nu = check_quantum_number(nu)
    return d.A * ((nu + 0.5) + 0.5 * d.B) ** 2


def summed_series_energy(nu: int, spec: Spec) -> float:
    """K -> infinity limit of :func:`wkb_energy`, using sum_k binom(1/2,k) B^(1-2k) = sqrt(1+B^2)."""
    d = as_dimensionless(spec)
    nu = check_quantum_number(nu)
    if not d.converges:
        warnings.warn(f"B={d.B} <= 1: series does not converge", SeriesDivergenceWarning, 2)
    return d.A * ((nu + 0.5) + 0.5 * math.sqrt(1.0 + d.B * d.B)) ** 2


def inner_bracket(nu: int, K: int, B) -> Fraction:
    """Exact (nu + 1/2) + (1/2) sum_{k<=K} binom(1/2,k) B^(1-2k) for rational (or float) B."""
    nu = check_quantum_number(nu)
    K = _check_order(K)
    return Fraction(2 * nu + 1, 2) + inner_partial_sum(K, B) / 2


def wkb_energy(nu: int, K: int, spec: Spec) -> float:
    d = as_dimensionless(spec)
    K = _check_order(K)
    if K >= 1 and d.B <= 1.0:
        warnings.warn(
            f"B={d.B} <= 1: truncated series at K={K} is outside its convergence region",
            SeriesDivergenceWarning,
            stacklevel=2,
        )
    return d.A * float(inner_bracket(nu, K, d.B)) ** 2


def mean_spacing(nu: int, spec: Spec) -> float:
    """E_{nu+1} - E_nu of the exact spectrum, = A (2 nu + 2 + sqrt(1 + B^2))."""
    d = as_dimensionless(spec)
    nu = check_quantum_number(nu)
    return d.A * (2 * nu + 2 + math.sqrt(1.0 + d.B * d.B))


def _half_tail(K: int, B: float) -> float:
    """s - s_K = (1/2) sum_{k>K} binom(1/2,k) B^(1-2k), summed term by term for B > 1."""
    if B <= 1.0:
        return 0.5 * (math.sqrt(1.0 + B * B) - float(inner_partial_sum(K, B)))
    coef = float(half_binomial(K + 1))
    inv2 = 1.0 / (B * B)
    term = coef * B ** (-2 * K - 1)
    total = 0.0
    k = K + 1
    while True:
        total += term
        if abs(term) <= 1e-18 * abs(total) or k > 200_000:
            break
        term *= (0.5 - k) / (k + 1) * inv2
        k += 1
    return 0.5 * total


def error_in_spacings(nu: int, K: int, spec: Spec) -> float:
    """(E_exact - E_K) / (E_exact(nu+1) - E_exact(nu)).

    The numerator uses A (s - s_K)(2 nu + 1 + s + s_K), with the tail s - s_K
    summed directly, so large nu and large B do not lose digits to cancellation.
    """
    d = as_dimensionless(spec)
    nu = check_quantum_number(nu)
    K = _check_order(K)
    s = 0.5 * math.sqrt(1.0 + d.B * d.B)
    tail = _half_tail(K, d.B)
    s_k = s - tail
    return tail * (2 * nu + 1 + s + s_k) / (2 * nu + 2 + 2 * s)


def error_limit(K: int, spec: Spec) -> float:
    """nu -> infinity limit of :func:`error_in_spacings`: (1/2) sum_{k>K} binom(1/2,k) B^(1-2k)."""
    d = as_dimensionless(spec)
    K = _check_order(K)
    if d.B <= 1.0:
        raise ValueError(f"error limit is not applicable for B={d.B} <= 1")
    return _half_tail(K, d.B)


def asymptotic_error(K: int, spec: Spec) -> float:
    """Leading term (1/2) binom(1/2, K+1) B^(-2K-1) of the error limit (signed)."""
    d = as_dimensionless(spec)
    K = _check_order(K)
    if d.B <= 1.0:
        raise ValueError(f"asymptotic error needs B > 1, got B={d.B}")
    return 0.5 * float(half_binomial(K + 1)) * d.B ** (-2 * K - 1)


def fit_scaling_slope(K: int, B_grid, A: float = 1.0) -> float:
    """Least-squares slope of log|error limit| against log B."""
    K = _check_order(K)
    b = np.asarray(B_grid, dtype=float)
    if b.ndim != 1 or b.size < 5:
        raise ValueError("B grid needs at least 5 points")
    if np.any(np.diff(b) <= 0):
        raise ValueError("B grid must be strictly increasing")
    if np.any(b <= 1.0):
        raise ValueError("B grid values must all exceed 1")
    limits = np.array([error_limit(K, DimensionlessSpec(A=A, B=float(x))) for x in b])
    slope, _ = np.polyfit(np.log(b), np.log(np.abs(limits)), 1)
    return float(slope)


@dataclass(frozen=True)
class SpectrumRow:
    nu: int
    e_exact: float
    e_torus: float
    e_wkb: dict[int, float]
    err_spacings: dict[int, float]
    divergent: bool = False


def spectrum_rows(spec: Spec, nus, orders) -> list[SpectrumRow]:
    d = as_dimensionless(spec)
    orders = [_check_order(K) for K in orders]
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesDivergenceWarning)
        for nu in nus:
            rows.append(
                SpectrumRow(
                    nu=check_quantum_number(nu),
                    e_exact=exact_energy(nu, d),
                    e_torus=torus_energy(nu, d),
                    e_wkb={K: wkb_energy(nu, K, d) for K in orders},
                    err_spacings={K: error_in_spacings(nu, K, d) for K in orders},
                    divergent=d.B <= 1.0 and any(K >= 1 for K in orders),
                )
            )
    return rows
