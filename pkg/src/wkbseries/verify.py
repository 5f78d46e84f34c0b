"""Cross-checks between the closed forms, the exact recursion, quadrature and the eigensolver."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import coeffs, oracle, spectrum, symbolic
from .model import DimensionlessSpec, PotentialSpec


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def check_fourth_order_bracket() -> Check:
    got = coeffs.inner_half_series(2)
    want = {1: Fraction(1, 2), -1: Fraction(1, 4), -3: Fraction(-1, 16)}
    return Check("fourth_order_bracket", got == want, 0.0 if got == want else 1.0, 0.0,
                 "inner bracket K=2: B/2 + 1/(4B) - 1/(16B^3)")


def check_phase_terms(k_max: int = 6) -> Check:
    sigmas = symbolic.recurse_sigma(2 * k_max)
    bad = []
    for k in range(1, k_max + 1):
        value = symbolic.contour_integral_even(sigmas[2 * k]).value
        if value != coeffs.phase_coefficient(k):
            bad.append(f"k={k}: {value}")
    return Check("phase_terms_symbolic", not bad, float(len(bad)), 0.0,
                 "; ".join(bad) or f"k=1..{k_max} equal -(1/2) binom(1/2,k)")


def check_maslov() -> Check:
    r = symbolic.maslov_coefficient(symbolic.recurse_sigma(1)[1])
    return Check("maslov_term", r == Fraction(-1, 2), float(abs(r + Fraction(1, 2))), 0.0,
                 f"(hbar/i) oint sigma_1' = {r} * 2 pi hbar")


def check_odd_vanishing(n_max: int = 11) -> Check:
    rep = symbolic.verify_odd_vanishing(n_max)
    return Check("odd_terms_vanish", rep.passed, float(len(rep.failures)), 0.0,
                 f"odd n in 3..{n_max}; failing: {rep.failures}")


def check_coefficient_parity(k_max: int = 40) -> Check:
    c = coeffs.c_k0_sequence(k_max)
    odd_bad = [k for k in range(3, k_max + 1, 2) if c[k] != 0]
    mag_bad = [k for k in range(1, k_max // 2 + 1) if abs(c[2 * k]) != abs(coeffs.c_2k0_sign_flipped(k))]
    sign_bad = [k for k in range(1, k_max // 2 + 1) if c[2 * k] != coeffs.c_2k0_closed_form(k)]
    ok = not (odd_bad or mag_bad or sign_bad)
    return Check("coefficient_parity_magnitude", ok, float(len(odd_bad) + len(mag_bad) + len(sign_bad)), 0.0,
                 "C_{k,0}=0 for odd k>=3; |C_{2k,0}| = binom magnitude; sign = +binom(1/2,k)(p/2)^2k")


def check_engines_agree(n_max: int = 12) -> Check:
    ok = symbolic.leading_coefficients_agree(n_max)
    return Check("engines_agree", ok, 0.0 if ok else 1.0, 0.0, f"C_(n,0) symbolic == scalar recursion, n<={n_max}")


def check_quadrature(spec: PotentialSpec, rtol: float = 1e-8) -> list[Check]:
    cfg = oracle.QuadratureConfig()
    d = spec.dimensionless()
    want2 = coeffs.phase_term(1, d.B, d.hbar)
    want4 = coeffs.phase_term(2, d.B, d.hbar)
    energies = [f * spec.well_depth for f in (2.0, 5.0, 10.0)]
    s2 = [oracle.sigma2_integral_numeric(E, spec, cfg) for E in energies]
    s4 = [oracle.sigma4_integral_numeric(E, spec, cfg) for E in energies]
    dev2 = max(_rel(v, want2) for v in s2)
    dev4 = max(_rel(v, want4) for v in s4)
    spread = max((max(s2) - min(s2)) / abs(want2), (max(s4) - min(s4)) / abs(want4))
    E = 4.0 * spec.well_depth
    act = oracle.action_integral_numeric(E, spec, cfg)
    act_want = 2 * math.pi * d.hbar * (math.sqrt(E / d.A) - d.B / 2)
    sym = max(
        [_rel(oracle.sigma2_integral_symbolic(E, spec), v) for E, v in zip(energies, s2)]
        + [_rel(oracle.sigma4_integral_symbolic(E, spec), v) for E, v in zip(energies, s4)]
    )
    return [
        Check("quadrature_sigma2", dev2 <= rtol, dev2, rtol, "vs -2 pi hbar/(4B) at E=2,5,10 U0"),
        Check("quadrature_sigma4", dev4 <= rtol, dev4, rtol, "vs 2 pi hbar/(16B^3) at E=2,5,10 U0"),
        Check("quadrature_e_independence", spread <= 2 * rtol, spread, 2 * rtol, "spread over E"),
        Check("quadrature_symbolic_vs_numeric", sym <= 10 * rtol, sym, 10 * rtol, "beta-polynomial route"),
        Check("action_integral", _rel(act, act_want) <= rtol, _rel(act, act_want), rtol, "E=4U0"),
    ]


def check_beta_derivative_intermediates() -> Check:
    d3 = oracle.beta_derivative_coefficient("v2sq", 3)
    d4 = oracle.beta_derivative_coefficient("v1sq_v2", 4)
    ok = d3 == Fraction(135, 2) and d4 == Fraction(315, 2)
    return Check("beta_derivative_intermediates", ok, float(abs(d3 - Fraction(135, 2)) + abs(d4 - Fraction(315, 2))), 0.0,
                 f"d3/dE3 -> {d3} pi a^3 U0^-3/2, d4/dE4 -> {d4} pi a^3 U0^-3/2")


def check_eigensolver(spec: PotentialSpec, rtol: float = 1e-6, n_levels: int = 8) -> Check:
    cfg = oracle.EigensolverConfig(rtol=rtol)
    try:
        ev = oracle.fd_eigenvalues(spec, n_levels, cfg)
    except oracle.EigensolverConvergenceError as exc:
        return Check("eigensolver_exact_spectrum", False, exc.deviation, rtol, str(exc))
    exact = np.array([spectrum.exact_energy(n, spec) for n in range(n_levels)])
    dev = float(np.max(np.abs(ev - exact) / exact))
    return Check("eigensolver_exact_spectrum", dev <= rtol, dev, rtol, f"lowest {n_levels} levels")


def check_series_convergence() -> Check:
    partial = coeffs.inner_partial_sum(40, 2)
    dev = abs(float(partial - Fraction(math.sqrt(5))))
    d = DimensionlessSpec(A=1.0, B=2.0)
    same = all(spectrum.summed_series_energy(n, d) == spectrum.exact_energy(n, d) for n in range(20))
    return Check("series_to_exact", dev < 1e-12 and same, dev, 1e-12, "K=40, B=2 vs sqrt(5); summed == exact")


def check_error_limit() -> Check:
    d = DimensionlessSpec(A=1.0, B=5.0)
    limit = 0.5 * (math.sqrt(26.0) - 5.0)
    seq = [spectrum.error_in_spacings(nu, 0, d) for nu in (10, 100, 1000, 10000)]
    gaps = [abs(v - limit) for v in seq]
    monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    dev = abs(spectrum.error_in_spacings(1000, 0, d) - limit)
    return Check("error_does_not_vanish", dev <= 1e-3 and monotone, dev, 1e-3,
                 f"B=5, K=0 -> {limit:.7f}; monotone={monotone}")


def check_scaling(orders=(0, 1, 2)) -> list[Check]:
    grid = np.geomspace(10.0, 100.0, 10)
    out = []
    for K in orders:
        slope = spectrum.fit_scaling_slope(K, grid)
        target = -(2 * K + 1)
        dev = abs(slope - target) / abs(target)
        out.append(Check(f"scaling_slope_k{K}", dev <= 0.02, dev, 0.02, f"slope {slope:.5f} vs {target}"))
    return out


def run_all(spec: PotentialSpec, quad_tol: float = 1e-8, eig_tol: float = 1e-6) -> list[Check]:
    checks = [
        check_fourth_order_bracket(),
        check_phase_terms(),
        check_maslov(),
        check_odd_vanishing(),
        check_coefficient_parity(),
        check_engines_agree(),
        *check_quadrature(spec, quad_tol),
        check_beta_derivative_intermediates(),
        check_eigensolver(spec, eig_tol),
        check_series_convergence(),
        check_error_limit(),
        *check_scaling(),
    ]
    return checks
