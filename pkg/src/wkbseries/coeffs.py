"""Exact-rational coefficients of the all-order WKB series.

Everything here is a :class:`fractions.Fraction`; floats only appear in
:func:`phase_term` and in the float conveniences of :func:`inner_partial_sum`.

Sign convention for the leading Laurent coefficients C_{2k,0}
--------------------------------------------------------------
Running the quadratic recursion (:func:`c_k0_sequence`) gives

    C_{2k,0} = binom(1/2, k) * (p/2)^(2k),   p = 2 m alpha U0,

i.e. *without* an extra factor (-1)^k; the generating function is
``G(t) = p t / 2 + sqrt(1 + p^2 t^2 / 4)``.  Reducing the contour integral
carries a factor ``(hbar/i)^(2k) * (-1)^(3k-1) = -(-1)^(4k)`` so that the
per-order phase is ``-(1/2) binom(1/2, k) 2 pi hbar B^(1-2k)``; this matches
the independently known second- and fourth-order values
``-2 pi hbar / (4B)`` and ``+2 pi hbar / (16 B^3)`` (see
:mod:`wkbseries.oracle`).  A variant carrying (-1)^k on C_{2k,0}
together with (-1)^(5k-1) on the reduction gives the same phase, because the
two extra signs cancel; :func:`c_2k0_sign_flipped` reproduces it for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = [
    "PhaseTerm",
    "c_2k0_closed_form",
    "c_2k0_sign_flipped",
    "c_k0_sequence",
    "half_binomial",
    "half_binomials",
    "inner_half_series",
    "inner_partial_sum",
    "phase_coefficient",
    "phase_term",
    "tail_bound",
]

HALF = Fraction(1, 2)


def half_binomials(k_max: int) -> list[Fraction]:
    """binom(1/2, k) for k = 0..k_max."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    out = [Fraction(1)]
    for k in range(1, k_max + 1):
        out.append(out[-1] * (HALF - (k - 1)) / k)
    return out


def half_binomial(k: int) -> Fraction:
    """binom(1/2, k) = prod_{j<k} (1/2 - j) / k!, exact."""
    return half_binomials(k)[k]


def c_k0_sequence(k_max: int, prefactor: Rational = 1) -> list[Fraction]:
    """Leading coefficients C_{0,0}, ..., C_{k_max,0} from the quadratic recursion

        C_k = (p C_{k-1} - sum_{j=1}^{k-1} C_j C_{k-j}) / 2,   C_0 = 1,

    with ``p = prefactor = 2 m alpha U0`` (``p = 1`` in canonical units).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    p = Fraction(prefactor)
    c = [Fraction(1)]
    for k in range(1, k_max + 1):
        conv = sum((c[j] * c[k - j] for j in range(1, k)), Fraction(0))
        c.append((p * c[k - 1] - conv) / 2)
    return c


def c_2k0_closed_form(k: int, prefactor: Rational = 1) -> Fraction:
    """Closed form of C_{2k,0} that the recursion actually satisfies."""
    p = Fraction(prefactor)
    return half_binomial(k) * (p / 2) ** (2 * k)


def c_2k0_sign_flipped(k: int, prefactor: Rational = 1) -> Fraction:
    """C_{2k,0} with the alternating sign (-1)^k; differs from the recursion for odd k."""
    return (-1) ** k * c_2k0_closed_form(k, prefactor)


def phase_coefficient(k: int) -> Fraction:
    """Rational r_k with  (hbar/i)^(2k) oint d sigma_{2k} = r_k * 2 pi hbar * B^(1-2k)."""
    if k < 1:
        raise ValueError("phase terms are defined for k >= 1")
    return -HALF * half_binomial(k)


@dataclass(frozen=True)
class PhaseTerm:
    order: int
    coefficient: Fraction

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be >= 1")

    @classmethod
    def of_order(cls, k: int) -> PhaseTerm:
        return cls(order=k, coefficient=phase_coefficient(k))

    def value(self, B: float, hbar: float) -> float:
        return float(self.coefficient) * 2.0 * math.pi * hbar * B ** (1 - 2 * self.order)


def phase_term(k: int, B: float, hbar: float) -> float:
    """-(1/2) binom(1/2, k) * 2 pi hbar * B^(1-2k)."""
    if B <= 0:
        raise ValueError("B must be > 0")
    return PhaseTerm.of_order(k).value(B, hbar)


def inner_half_series(K: int) -> dict[int, Fraction]:
    """Laurent coefficients of (1/2) sum_{k=0}^{K} binom(1/2, k) B^(1-2k), keyed by power of B."""
    if K < 0:
        raise ValueError("K must be >= 0")
    return {1 - 2 * k: HALF * b for k, b in enumerate(half_binomials(K))}


def inner_partial_sum(K: int, B: Rational | float) -> Fraction:
    """sum_{k=0}^{K} binom(1/2, k) B^(1-2k), evaluated exactly.

    Float ``B`` is converted to the exactly equal :class:`Fraction` first, so
    the only rounding happens when the caller converts the result.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    b = Fraction(B)
    if b <= 0:
        raise ValueError("B must be > 0")
    inv2 = 1 / (b * b)
    total = Fraction(0)
    power = b
    for coef in half_binomials(K):
        total += coef * power
        power *= inv2
    return total


def tail_bound(K: int, B: float) -> float:
    """Upper bound |binom(1/2, K+1)| B^(-2K-1) / (1 - B^-2) on the omitted tail, B > 1."""
    if B <= 1:
        raise ValueError("tail bound requires B > 1")
    return abs(float(half_binomial(K + 1))) * B ** (-2 * K - 1) / (1.0 - B**-2)
