"""Physical and dimensionless parameterisation of the V(x) = U0 / cos^2(alpha x) well.

Two parameter sets are used throughout the package:

* :class:`PotentialSpec` holds the physical constants (m, U0, alpha, hbar).
* :class:`DimensionlessSpec` holds the pair (A, B) that the spectra depend on,
  with ``A = alpha^2 hbar^2 / (2m)`` and ``B = sqrt(8 m U0) / (alpha hbar)``.

The exact-rational algebra in :mod:`wkbseries.coeffs` and
:mod:`wkbseries.symbolic` works in canonical units ``2m = 1, alpha = 1, U0 = 1``,
where ``B = 2 / hbar`` and ``A = hbar^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "BelowBarrierError",
    "DimensionlessSpec",
    "PotentialSpec",
    "action_variable",
    "check_quantum_number",
    "derive_dimensionless",
    "energy_from_action",
]


class BelowBarrierError(ValueError):
    """Raised when an energy lies below the bottom of the well (E < U0)."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class PotentialSpec:
    """Physical parameters of H = p^2/2m + U0 / cos^2(alpha x)."""

    mass: float
    well_depth: float
    width: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        _require_positive(
            mass=self.mass, well_depth=self.well_depth, width=self.width, hbar=self.hbar
        )

    @property
    def A(self) -> float:
        return self.width**2 * self.hbar**2 / (2.0 * self.mass)

    @property
    def B(self) -> float:
        return math.sqrt(8.0 * self.mass * self.well_depth) / (self.width * self.hbar)

    def dimensionless(self) -> DimensionlessSpec:
        return DimensionlessSpec(A=self.A, B=self.B, hbar=self.hbar)

    @classmethod
    def from_dimensionless(cls, A: float, B: float, hbar: float = 1.0) -> PotentialSpec:
        """Build physical parameters for a given (A, B, hbar) with 2m = 1.

        The width and depth follow as ``alpha = sqrt(A) / hbar`` and
        ``U0 = A B^2 / 4``.
        """
        _require_positive(A=A, B=B, hbar=hbar)
        return cls(mass=0.5, well_depth=A * B * B / 4.0, width=math.sqrt(A) / hbar, hbar=hbar)


@dataclass(frozen=True)
class DimensionlessSpec:
    """The (A, B, hbar) triple on which every energy formula depends."""

    A: float
    B: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        _require_positive(A=self.A, B=self.B, hbar=self.hbar)

    @property
    def converges(self) -> bool:
        # sum_k binom(1/2, k) B^(-2k) converges iff B^-2 <= 1
        return self.B >= 1.0

    def physical(self) -> PotentialSpec:
        return PotentialSpec.from_dimensionless(self.A, self.B, self.hbar)


def derive_dimensionless(spec: PotentialSpec) -> DimensionlessSpec:
    return spec.dimensionless()


def as_dimensionless(spec: PotentialSpec | DimensionlessSpec) -> DimensionlessSpec:
    if isinstance(spec, DimensionlessSpec):
        return spec
    if isinstance(spec, PotentialSpec):
        return spec.dimensionless()
    raise TypeError(f"expected PotentialSpec or DimensionlessSpec, got {type(spec).__name__}")


def check_quantum_number(nu: int) -> int:
    """Validate a quantum number; returns it as a plain ``int``."""
    if isinstance(nu, bool) or int(nu) != nu or nu < 0:
        raise ValueError(f"quantum number must be a non-negative integer, got {nu!r}")
    return int(nu)


def action_variable(E: float, spec: PotentialSpec) -> float:
    """Action I(E) = (sqrt(2m)/alpha) (sqrt(E) - sqrt(U0)) of the bound orbit at energy E.

    ``E == U0`` gives 0 (the two turning points coalesce); ``E < U0`` raises
    :class:`BelowBarrierError`.
    """
    if E < spec.well_depth:
        raise BelowBarrierError(f"E={E!r} lies below the well bottom U0={spec.well_depth!r}")
    return math.sqrt(2.0 * spec.mass) / spec.width * (math.sqrt(E) - math.sqrt(spec.well_depth))


def energy_from_action(I: float, spec: PotentialSpec) -> float:
    """H(I) = (alpha^2/2m) I^2 + 2 alpha sqrt(U0/2m) I + U0."""
    if I < 0:
        raise ValueError(f"action must be >= 0, got {I!r}")
    m, U0, a = spec.mass, spec.well_depth, spec.width
    return a * a / (2.0 * m) * I * I + 2.0 * a * math.sqrt(U0 / (2.0 * m)) * I + U0
