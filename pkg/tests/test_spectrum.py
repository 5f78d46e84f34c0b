import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wkbseries.coeffs import half_binomial, inner_partial_sum
from wkbseries.model import DimensionlessSpec, PotentialSpec
from wkbseries.spectrum import (
    SeriesDivergenceWarning,
    asymptotic_error,
    error_in_spacings,
    error_limit,
    exact_energy,
    fit_scaling_slope,
    inner_bracket,
    mean_spacing,
    spectrum_rows,
    summed_series_energy,
    torus_energy,
    wkb_energy,
)

D43 = DimensionlessSpec(A=1.0, B=4.0 / 3.0)


def test_exact_energy_examples():
    assert exact_energy(0, D43) == pytest.approx(16 / 9, rel=1e-15)
    spec = PotentialSpec(0.5, 4.0, 1.0, 1.0)
    assert exact_energy(0, spec) == pytest.approx(4.5 + math.sqrt(17) / 2, rel=1e-15)
    for nu in range(5):  # B -> 0 boundary
        assert exact_energy(nu, DimensionlessSpec(A=1.0, B=1e-12)) == pytest.approx((nu + 1) ** 2, rel=1e-12)


def test_torus_energy_examples():
    assert torus_energy(0, D43) == pytest.approx(49 / 36, rel=1e-15)
    d = DimensionlessSpec(A=2.5, B=3.3)
    for nu in range(10):
        s, s0 = 0.5 * math.sqrt(1 + d.B**2), 0.5 * d.B
        diff = exact_energy(nu, d) - torus_energy(nu, d)
        assert diff == pytest.approx(d.A * (s - s0) * (2 * (nu + 0.5) + s + s0), rel=1e-12)
        step = math.sqrt(torus_energy(nu + 1, d) / d.A) - math.sqrt(torus_energy(nu, d) / d.A)
        assert step == pytest.approx(1.0, rel=1e-14)


def test_fourth_order_bracket_is_exact_identity():
    for B in (Fraction(2), Fraction(7, 3), Fraction(101, 10)):
        for nu in (0, 3):
            want = nu + Fraction(1, 2) + B / 2 + 1 / (4 * B) - 1 / (16 * B**3)
            assert inner_bracket(nu, 2, B) == want


def test_k0_equals_torus_and_large_k_equals_exact():
    d = DimensionlessSpec(A=1.0, B=2.0)
    for nu in range(6):
        assert wkb_energy(nu, 0, d) == pytest.approx(torus_energy(nu, d), rel=1e-15)
        assert summed_series_energy(nu, d) == exact_energy(nu, d)
    assert abs(float(inner_partial_sum(40, 2)) - math.sqrt(5)) < 1e-12


def test_divergence_warning():
    d = DimensionlessSpec(A=1.0, B=0.8)
    with pytest.warns(SeriesDivergenceWarning):
        wkb_energy(0, 1, d)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        wkb_energy(0, 0, d)  # torus term alone is fine
    rows = spectrum_rows(d, [0, 1], [0, 1])
    assert all(r.divergent for r in rows)
    with pytest.raises(ValueError):
        error_limit(1, d)


@pytest.mark.parametrize(
    "K, B, want",
    [
        (0, 2.0, 0.5 * (math.sqrt(5) - 2)),
        (2, 2.0, 0.5 * (math.sqrt(5) - 143 / 64)),
        (0, 5.0, 0.5 * (math.sqrt(26) - 5)),
    ],
)
def test_error_limit_closed_forms(K, B, want):
    assert error_limit(K, DimensionlessSpec(A=1.0, B=B)) == pytest.approx(want, rel=1e-12)


def test_error_limit_matches_exact_rational_tail():
    # oracle: exact partial sum to high order minus exact partial sum to K
    for B in (Fraction(3, 2), Fraction(10), Fraction(60)):
        for K in range(5):
            tail = (inner_partial_sum(300, B) - inner_partial_sum(K, B)) / 2
            got = error_limit(K, DimensionlessSpec(A=1.0, B=float(B)))
            assert got == pytest.approx(float(tail), rel=1e-12)


def test_error_in_spacings_matches_direct_definition():
    d = DimensionlessSpec(A=1.7, B=3.0)
    for K in (0, 1, 2):
        for nu in (0, 4, 20):
            direct = (exact_energy(nu, d) - wkb_energy(nu, K, d)) / (exact_energy(nu + 1, d) - exact_energy(nu, d))
            assert error_in_spacings(nu, K, d) == pytest.approx(direct, rel=1e-9)


def test_mean_spacing_identity():
    d = DimensionlessSpec(A=0.3, B=7.0)
    for nu in (0, 1, 50, 1000):
        assert mean_spacing(nu, d) == pytest.approx(exact_energy(nu + 1, d) - exact_energy(nu, d), rel=1e-12)


@pytest.mark.parametrize("K", [0, 1, 2, 3])
def test_error_approaches_nonzero_limit(K):
    d = DimensionlessSpec(A=1.0, B=5.0)
    limit = error_limit(K, d)
    assert limit != 0.0
    assert math.copysign(1.0, limit) == math.copysign(1.0, float(half_binomial(K + 1)))
    nus = [10, 100, 1000, 10000]
    gaps = [abs(error_in_spacings(nu, K, d) - limit) for nu in nus]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    # |err - limit| ~ C / nu: nu * gap settles to a constant instead of growing
    scaled = [nu * g for nu, g in zip(nus, gaps)]
    C = max(scaled)
    assert min(scaled) > 0.5 * C
    for nu, g in zip(nus, gaps):
        assert g <= C / nu


def test_asymptotic_error_examples():
    d = DimensionlessSpec(A=1.0, B=10.0)
    assert asymptotic_error(0, d) == pytest.approx(0.025, rel=1e-15)
    assert asymptotic_error(1, d) == pytest.approx(-6.25e-5, rel=1e-15)
    for K in (0, 1, 2):
        ratios = [asymptotic_error(K, DimensionlessSpec(1.0, B)) / error_limit(K, DimensionlessSpec(1.0, B)) for B in (10, 100, 1000)]
        assert abs(ratios[-1] - 1) < abs(ratios[0] - 1) and abs(ratios[-1] - 1) < 1e-5


@pytest.mark.parametrize("K", [0, 1, 2])
def test_fit_scaling_slope(K):
    slope = fit_scaling_slope(K, np.geomspace(10, 100, 10))
    assert abs(slope + (2 * K + 1)) / (2 * K + 1) < 0.02


@pytest.mark.parametrize("grid", [[10.0], [10, 20, 30, 40], [10, 30, 20, 40, 50], [0.5, 2, 3, 4, 5]])
def test_fit_scaling_slope_rejects_bad_grids(grid):
    with pytest.raises(ValueError):
        fit_scaling_slope(0, grid)


@given(nu=st.integers(0, 10_000), B=st.floats(0.01, 1e3), A=st.floats(1e-3, 1e3))
def test_exact_above_torus_and_increasing(nu, B, A):
    d = DimensionlessSpec(A=A, B=B)
    assert exact_energy(nu, d) > torus_energy(nu, d)
    assert exact_energy(nu + 1, d) > exact_energy(nu, d)
