"""Independent numerical checks: turning-point quadrature and a finite-difference eigensolver.

Quadrature.  Between the turning points, z = tan(alpha x) = sqrt(beta) sin(theta)
with beta = (E - U0)/U0 maps the open interval onto theta in (-pi/2, pi/2)
and turns E - V(x) into U0 beta cos^2(theta), so the inverse square-root
endpoint singularity cancels against the Jacobian.  The remaining integrand
is smooth and Gauss-Legendre converges geometrically.

E-derivatives.  The integrals of V'^2, V''^2 and V'^2 V'' against
(E - V)^(-1/2) are polynomials in beta.  :func:`beta_polynomial` builds them
exactly from the potential's z-representation; the numeric route samples the
quadrature on a Chebyshev stencil in beta and differentiates the interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre
from scipy.linalg import eigh_tridiagonal

from .model import BelowBarrierError, PotentialSpec

__all__ = [
    "EigensolverConfig",
    "EigensolverConvergenceError",
    "QuadratureConfig",
    "action_integral_numeric",
    "beta_derivative_coefficient",
    "beta_polynomial",
    "fd_eigenvalues",
    "fd_raw_eigenvalues",
    "inner_integral_numeric",
    "inner_integral_symbolic",
    "sigma2_integral_numeric",
    "sigma2_integral_symbolic",
    "sigma4_integral_numeric",
    "sigma4_integral_symbolic",
]

KINDS = ("v1sq", "v2sq", "v1sq_v2")


@dataclass(frozen=True)
class QuadratureConfig:
    node_count: int = 256
    scheme: str = "gauss-legendre/sine-substitution"
    rtol: float = 1e-8
    stencil_points: int = 9

    def __post_init__(self) -> None:
        if self.node_count < 16:
            raise ValueError("node_count must be >= 16")
        if not 0 < self.rtol <= 1e-4:
            raise ValueError("rtol must lie in (0, 1e-4]")
        if self.stencil_points < 6:
            raise ValueError("stencil_points must be >= 6")


@lru_cache(maxsize=16)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = legendre.leggauss(n)
    return 0.5 * math.pi * x, 0.5 * math.pi * w


def _beta(E: float, spec: PotentialSpec) -> float:
    if E <= spec.well_depth:
        raise BelowBarrierError(f"E={E!r} leaves no classically allowed region")
    return (E - spec.well_depth) / spec.well_depth


def action_integral_numeric(E: float, spec: PotentialSpec, cfg: QuadratureConfig | None = None) -> float:
    """2 int sqrt(2m (E - V(x))) dx between the turning points."""
    cfg = cfg or QuadratureConfig()
    if E == spec.well_depth:
        return 0.0
    beta = _beta(E, spec)
    theta, w = _gauss(cfg.node_count)
    dx_dtheta = math.sqrt(beta) * np.cos(theta) / (spec.width * (1.0 + beta * np.sin(theta) ** 2))
    # E - V(x(theta)) = U0 beta cos^2(theta)
    p = np.sqrt(2.0 * spec.mass * spec.well_depth * beta) * np.cos(theta)
    return 2.0 * float(np.dot(w, p * dx_dtheta))


def _v_derivs(x: np.ndarray, spec: PotentialSpec) -> tuple[np.ndarray, np.ndarray]:
    a, U0 = spec.width, spec.well_depth
    c, s = np.cos(a * x), np.sin(a * x)
    v1 = 2.0 * a * U0 * s / c**3
    v2 = 2.0 * a * a * U0 * (1.0 + 2.0 * s * s) / c**4
    return v1, v2


def inner_integral_numeric(
    kind: str, beta: float, spec: PotentialSpec, cfg: QuadratureConfig | None = None
) -> float:
    """int F(x) / sqrt(E - V(x)) dx between turning points, F one of V'^2, V''^2, V'^2 V''."""
    cfg = cfg or QuadratureConfig()
    if beta <= 0:
        raise ValueError("beta must be > 0")
    theta, w = _gauss(cfg.node_count)
    st = np.sin(theta)
    x = np.arctan(math.sqrt(beta) * st) / spec.width
    v1, v2 = _v_derivs(x, spec)
    f = {"v1sq": v1 * v1, "v2sq": v2 * v2, "v1sq_v2": v1 * v1 * v2}[kind]
    # dx / sqrt(E - V) = [sqrt(beta) cos / (alpha (1 + beta sin^2))] / [sqrt(U0 beta) cos]
    jac = 1.0 / (spec.width * math.sqrt(spec.well_depth) * (1.0 + beta * st * st))
    return float(np.dot(w, f * jac))


# --- exact beta-polynomials -----------------------------------------------------------

# z-representations in canonical alpha = U0 = 1, with d/dx = (1 + z^2) d/dz:
#   V = 1 + z^2,  V' = 2 z (1 + z^2),  V'' = 2 (1 + z^2)(1 + 3 z^2)


def _pmul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _pdiv_1pz2(p: list[Fraction]) -> list[Fraction]:
    """Exact division by 1 + z^2; raises if there is a remainder."""
    p = list(p)
    q = [Fraction(0)] * max(len(p) - 2, 1)
    for i in range(len(p) - 1, 1, -1):
        q[i - 2] = p[i]
        p[i - 2] -= p[i]
        p[i] = Fraction(0)
    if any(p):
        raise ArithmeticError("integrand not divisible by 1 + z^2")
    return q


def _d_dx(p: list[Fraction]) -> list[Fraction]:
    dp = [i * c for i, c in enumerate(p)][1:] or [Fraction(0)]
    return _pmul([Fraction(1), Fraction(0), Fraction(1)], dp)


_V = [Fraction(1), Fraction(0), Fraction(1)]
_V1 = _d_dx(_V)
_V2 = _d_dx(_V1)
_NUMERATORS = {
    "v1sq": (_pmul(_V1, _V1), 1),
    "v2sq": (_pmul(_V2, _V2), 3),
    "v1sq_v2": (_pmul(_pmul(_V1, _V1), _V2), 3),
}
# powers of U0 carried by each numerator: V^2 -> U0^2, V^3 -> U0^3
_U0_POWER = {"v1sq": 2, "v2sq": 2, "v1sq_v2": 3}


@lru_cache(maxsize=None)
def beta_polynomial(kind: str) -> tuple[Fraction, ...]:
    """Rational q_j with int F dx / sqrt(E - V) = pi alpha^a U0^(b - 1/2) sum_j q_j beta^j.

    (a, b) = (1, 2) for V'^2, (3, 2) for V''^2, (3, 3) for V'^2 V''.
    """
    num, _ = _NUMERATORS[kind]
    integrand = _pdiv_1pz2(num)  # dx = dz / (alpha (1 + z^2))
    out: dict[int, Fraction] = {}
    for i, c in enumerate(integrand):
        if i % 2 or not c:
            continue  # odd powers integrate to zero
        j = i // 2
        # int z^2j / sqrt(beta - z^2) dz = pi beta^j (2j-1)!! / (2^j j!)
        dfact = math.prod(range(1, 2 * j, 2))
        out[j] = out.get(j, Fraction(0)) + c * Fraction(dfact, 2**j * factorial(j))
    return tuple(out.get(j, Fraction(0)) for j in range(max(out) + 1))


def _alpha_power(kind: str) -> int:
    return _NUMERATORS[kind][1]


def inner_integral_symbolic(kind: str, beta: float, spec: PotentialSpec) -> float:
    q = beta_polynomial(kind)
    scale = math.pi * spec.width ** _alpha_power(kind) * spec.well_depth ** (_U0_POWER[kind] - 0.5)
    return scale * sum(float(c) * beta**j for j, c in enumerate(q))


def beta_derivative_coefficient(kind: str, order: int, beta: Fraction | int = 0) -> Fraction:
    """Rational R with d^order/dE^order int F / sqrt(E-V) dx = R pi alpha^a U0^(b - 1/2 - order).

    For V''^2 (order 3) and V'^2 V'' (order 4) the result is independent of beta.
    """
    q = beta_polynomial(kind)
    total = Fraction(0)
    for j, c in enumerate(q):
        if j >= order:
            total += c * Fraction(math.perm(j, order)) * Fraction(beta) ** (j - order)
    return total


def _e_derivative_symbolic(kind: str, order: int, E: float, spec: PotentialSpec) -> float:
    beta = _beta(E, spec)
    q = beta_polynomial(kind)
    val = sum(float(c) * math.perm(j, order) * beta ** (j - order) for j, c in enumerate(q) if j >= order)
    U0 = spec.well_depth
    return math.pi * spec.width ** _alpha_power(kind) * U0 ** (_U0_POWER[kind] - 0.5 - order) * val


def _e_derivative_numeric(kind: str, order: int, E: float, spec: PotentialSpec, cfg: QuadratureConfig) -> float:
    """d^order/dE^order of the quadrature via a Chebyshev interpolant on a beta stencil."""
    beta = _beta(E, spec)
    half = 0.9 * beta
    nodes = np.cos(np.pi * (np.arange(cfg.stencil_points) + 0.5) / cfg.stencil_points)
    betas = beta + half * nodes
    values = np.array([inner_integral_numeric(kind, b, spec, cfg) for b in betas])
    coef = C.chebfit(nodes, values, cfg.stencil_points - 1)
    # t = (beta' - beta) / half;  d/dE = (1/U0) d/dbeta = 1/(U0 half) d/dt
    deriv = C.chebval(0.0, C.chebder(coef, order))
    return float(deriv) / (spec.well_depth * half) ** order


def _sigma2(d2: float, spec: PotentialSpec) -> float:
    return -(spec.hbar**2) / math.sqrt(2.0 * spec.mass) / 12.0 * d2


def _sigma4(d3: float, d4: float, spec: PotentialSpec) -> float:
    return spec.hbar**4 / (2.0 * spec.mass) ** 1.5 * (d3 / 120.0 - d4 / 288.0)


def sigma2_integral_numeric(E: float, spec: PotentialSpec, cfg: QuadratureConfig | None = None) -> float:
    """-(hbar^2 / sqrt(2m)) (1/12) d^2/dE^2 int V'^2 / sqrt(E - V) dx, by quadrature."""
    cfg = cfg or QuadratureConfig()
    return _sigma2(_e_derivative_numeric("v1sq", 2, E, spec, cfg), spec)


def sigma4_integral_numeric(E: float, spec: PotentialSpec, cfg: QuadratureConfig | None = None) -> float:
    """hbar^4/(2m)^(3/2) [ (1/120) d^3/dE^3 int V''^2/sqrt(E-V) - (1/288) d^4/dE^4 int V'^2 V''/sqrt(E-V) ]."""
    cfg = cfg or QuadratureConfig()
    d3 = _e_derivative_numeric("v2sq", 3, E, spec, cfg)
    d4 = _e_derivative_numeric("v1sq_v2", 4, E, spec, cfg)
    return _sigma4(d3, d4, spec)


def sigma2_integral_symbolic(E: float, spec: PotentialSpec) -> float:
    return _sigma2(_e_derivative_symbolic("v1sq", 2, E, spec), spec)


def sigma4_integral_symbolic(E: float, spec: PotentialSpec) -> float:
    d3 = _e_derivative_symbolic("v2sq", 3, E, spec)
    d4 = _e_derivative_symbolic("v1sq_v2", 4, E, spec)
    return _sigma4(d3, d4, spec)


# --- finite-difference eigensolver -----------------------------------------------------


class EigensolverConvergenceError(RuntimeError):
    def __init__(self, message: str, observed_order: float, deviation: float):
        self.observed_order = observed_order
        self.deviation = deviation
        super().__init__(f"{message} (observed order {observed_order:.2f}, deviation {deviation:.3e})")


@dataclass(frozen=True)
class EigensolverConfig:
    grid_points: int = 2000
    margin: float | None = None  # default 1e-3 / alpha
    refinements: int = 3
    rtol: float = 1e-6

    def __post_init__(self) -> None:
        if self.grid_points < 100:
            raise ValueError("grid_points must be >= 100")
        if self.refinements < 2:
            raise ValueError("need at least 2 grids for Richardson extrapolation")
        if not self.rtol > 0:
            raise ValueError("rtol must be > 0")


def _margin(spec: PotentialSpec, cfg: EigensolverConfig) -> float:
    eps = 1e-3 / spec.width if cfg.margin is None else cfg.margin
    if not 0 < eps < math.pi / (4.0 * spec.width):
        raise ValueError(f"margin must lie in (0, pi/(4 alpha)), got {eps}")
    return eps


def fd_raw_eigenvalues(spec: PotentialSpec, n_levels: int, interior_points: int, margin: float) -> np.ndarray:
    """Lowest eigenvalues of the 3-point discretisation with Dirichlet walls at +-(pi/2alpha - margin)."""
    half = math.pi / (2.0 * spec.width) - margin
    h = 2.0 * half / (interior_points + 1)
    x = -half + h * np.arange(1, interior_points + 1)
    kin = spec.hbar**2 / (2.0 * spec.mass * h * h)
    diag = 2.0 * kin + spec.well_depth / np.cos(spec.width * x) ** 2
    off = np.full(interior_points - 1, -kin)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1), eigvals_only=True)


def fd_eigenvalues(spec: PotentialSpec, n_levels: int, cfg: EigensolverConfig | None = None) -> np.ndarray:
    """Richardson-extrapolated lowest ``n_levels`` eigenvalues of -(hbar^2/2m) d^2/dx^2 + V.

    The grid spacing halves across ``cfg.refinements`` solves; the table
    eliminates h^2, h^4, ... in turn.  If the last two table diagonals differ
    by more than ``cfg.rtol`` (relative), :class:`EigensolverConvergenceError`
    is raised with the observed order of the raw scheme.
    """
    cfg = cfg or EigensolverConfig()
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    eps = _margin(spec, cfg)
    raw = [
        fd_raw_eigenvalues(spec, n_levels, (cfg.grid_points + 1) * 2**i - 1, eps)
        for i in range(cfg.refinements)
    ]
    table = [raw]
    for j in range(1, cfg.refinements):
        prev = table[-1]
        f = 4.0**j
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1.0) for i in range(len(prev) - 1)])
    best, previous = table[-1][-1], table[-2][-1]
    deviation = float(np.max(np.abs(best - previous) / np.abs(best)))
    if deviation > cfg.rtol:
        raise EigensolverConvergenceError(
            "Richardson estimates disagree beyond tolerance", observed_order(raw), deviation
        )
    return np.sort(best)


def observed_order(raw: list[np.ndarray]) -> float:
    """log2 of successive-difference ratios of the lowest level over the last three grids."""
    if len(raw) < 3:
        return float("nan")
    d1 = abs(raw[-2][0] - raw[-3][0])
    d2 = abs(raw[-1][0] - raw[-2][0])
    return math.log2(d1 / d2) if d2 > 0 else float("inf")
