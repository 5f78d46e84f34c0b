import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from wkbseries.coeffs import c_k0_sequence, phase_coefficient
from wkbseries.symbolic import (
    AnsatzViolation,
    ContourValue,
    SigmaPoly,
    contour_integral_even,
    contour_z_moment,
    evaluate_poly,
    integrand_exponents,
    leading_coefficients_agree,
    maslov_coefficient,
    recurse_sigma,
    residual,
    sigma0_squared,
    verify_odd_vanishing,
)

N_MAX = 12


@pytest.fixture(scope="module")
def sigmas():
    return recurse_sigma(N_MAX)


def test_sigma0_squared():
    s2 = sigma0_squared()
    E = 3.0
    assert evaluate_poly(s2, E, 1.0) == E - 1.0  # x = 0
    xt = math.acos(1 / math.sqrt(E))
    assert abs(evaluate_poly(s2, E, math.cos(xt))) < 1e-15
    phys = sigma0_squared(mass2=Fraction(3), depth=Fraction(2))
    assert evaluate_poly(phys, 5.0, 1.0) == pytest.approx(3 * (5.0 - 2.0))


def test_first_order_is_standard_correction(sigmas):
    s1 = sigmas[1]
    assert (s1.sigma0_power, s1.sine_parity) == (-2, 1)
    assert s1.coeffs == {0: (Fraction(1, 2),)}


def test_second_order_table(sigmas):
    # hand expansion of -(sigma_1'' + sigma_1'^2) / (2 sigma_0')
    s2 = sigmas[2]
    assert s2.coeffs[0] == (Fraction(1, 8),)
    assert s2.coefficient(1) == (Fraction(1, 8), Fraction(-3, 4))
    assert s2.coefficient(2, E=Fraction(2)) == 1


def test_structure_of_every_order(sigmas):
    for n, sp in enumerate(sigmas[1:], start=1):
        assert sp.sigma0_power == 1 - 3 * n
        assert sp.sine_parity == n % 2
        bound = (3 * n - 2) // 2 if n % 2 == 0 else (3 * n - 3) // 2
        assert max(sp.coeffs) <= bound
        assert min(sp.coeffs) >= 0


def test_exact_residual_vanishes(sigmas):
    for n in range(1, N_MAX + 1):
        assert residual(sigmas, n) == {}


def test_leading_coefficients_match_scalar_recursion(sigmas):
    scalar = c_k0_sequence(N_MAX)
    for n in range(1, N_MAX + 1):
        lead = sigmas[n].coefficient(0)
        assert lead == ((scalar[n],) if scalar[n] else ())
    assert leading_coefficients_agree(N_MAX)


def test_leading_coefficient_is_energy_free_but_others_are_not(sigmas):
    for n in range(1, N_MAX + 1):
        assert len(sigmas[n].coefficient(0)) <= 1
    # C_{2,1} = 1/8 - 3E/4 genuinely depends on E
    assert sigmas[2].coefficient(1, E=Fraction(2)) != sigmas[2].coefficient(1, E=Fraction(5))


def test_ansatz_violation_is_reported():
    from wkbseries.symbolic import _Expr

    bad = _Expr(1 - 3 * 2, 0, {(0, 1): Fraction(1)})  # cos^+1 is outside 2l - 6
    with pytest.raises(AnsatzViolation) as info:
        SigmaPoly._from_expr(2, bad)
    assert info.value.n == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_recursion_against_numerical_differentiation(sigmas, n):
    """sigma_n' from the table equals the recursion evaluated with mpmath derivatives."""
    mp.mp.dps = 40
    E = mp.mpf(3)

    def s0(x):
        return mp.sqrt(E - 1 / mp.cos(x) ** 2)

    funcs = [s0]
    for m in range(1, n + 1):
        prev = list(funcs)

        def sm(x, prev=prev, m=m):
            acc = mp.diff(prev[m - 1], x)
            for k in range(1, m):
                acc += prev[k](x) * prev[m - k](x)
            return -acc / (2 * prev[0](x))

        funcs.append(sm)
    x = mp.mpf("0.37")
    assert float(funcs[n](x)) == pytest.approx(sigmas[n].evaluate(3.0, 0.37), rel=1e-10)


def test_integrand_exponents_bookkeeping(sigmas):
    for k in range(1, N_MAX // 2 + 1):
        for l, p, r in integrand_exponents(sigmas[2 * k]):
            assert p == 3 * k - l - 1
            assert r == Fraction(6 * k - 1, 2)


def test_contour_moment_base_cases():
    # (1/2pi) * 2 int sqrt(beta - z^2) dz = beta / 2
    assert contour_z_moment(0, 0) == (0, Fraction(1, 2))
    # (1/2pi) oint (beta - z^2)^(-1/2) dz = 1
    assert contour_z_moment(0, 1) == (Fraction(1),)
    # analytic outside the cut and O(z^-3) at infinity -> zero
    assert contour_z_moment(0, 2) == (0,)


@pytest.mark.parametrize("k", range(1, 7))
def test_contour_integral_even(sigmas, k):
    cv = contour_integral_even(sigmas[2 * k])
    assert isinstance(cv, ContourValue)
    assert cv.value == phase_coefficient(k)


def test_contour_integral_named_values(sigmas):
    assert contour_integral_even(sigmas[2]).value == Fraction(-1, 4)
    assert contour_integral_even(sigmas[4]).value == Fraction(1, 16)
    assert contour_integral_even(sigmas[6]).value == Fraction(-1, 32)
    with pytest.raises(ValueError):
        contour_integral_even(sigmas[3])


def test_maslov_and_odd_vanishing(sigmas):
    assert maslov_coefficient(sigmas[1]) == Fraction(-1, 2)
    report = verify_odd_vanishing(11)
    assert set(report.residues) == {3, 5, 7, 9, 11}
    assert report.passed


# --- independent oracle: integrate on an actual loop in the complex x plane ---------


def _loop_integrals(sp_list, E=4.0, a=1.35, b=0.6, n=4096):
    t = 2 * np.pi * np.arange(n) / n
    x = a * np.cos(t) + 1j * b * np.sin(t)  # counter-clockwise around both turning points
    dx = (-a * np.sin(t) + 1j * b * np.cos(t)) * (2 * np.pi / n)
    w = E - 1 / np.cos(x) ** 2
    s0 = np.sqrt(w.astype(complex))
    for i in range(1, n):  # continue the branch along the loop
        if abs(s0[i] - s0[i - 1]) > abs(s0[i] + s0[i - 1]):
            s0[i] = -s0[i]
    if np.sum(s0 * dx).real < 0:  # orientation convention: oint sigma_0' dx = 2 int p dx > 0
        s0 = -s0
    c, s = np.cos(x), np.sin(x)
    out = {}
    for sp in sp_list:
        poly = sum(complex(coef) * E**ea * c**cb for (ea, cb), coef in sp.to_poly().items())
        out[sp.order] = np.sum(s0**sp.sigma0_power * s**sp.sine_parity * poly * dx)
    return out, np.sum(s0 * dx)


def test_complex_loop_oracle(sigmas):
    vals, action = _loop_integrals(sigmas[:7])
    # canonical units, E = 4: 2 int sqrt(E - sec^2) dx = 2 pi (sqrt(E) - 1)
    assert action.real == pytest.approx(2 * math.pi, rel=1e-10)
    assert vals[1] == pytest.approx(-math.pi * 1j, abs=1e-9)  # (hbar/i) * (-i pi) = -pi hbar
    assert abs(vals[3]) < 1e-8 and abs(vals[5]) < 1e-6
    # oint sigma_2k' = (-1)^k r_k 2 pi 2^(1-2k)
    for k in (1, 2, 3):
        want = (-1) ** k * float(phase_coefficient(k)) * 2 * math.pi * 2.0 ** (1 - 2 * k)
        assert vals[2 * k] == pytest.approx(want, rel=1e-7, abs=1e-9)
