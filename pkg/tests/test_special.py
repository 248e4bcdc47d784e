import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import iv

from spheroid_spectrum.errors import DomainError
from spheroid_spectrum.special import (
    bessel_half,
    bessel_half_scaled,
    bessel_ratio,
    bessel_ratios,
    legendre,
    legendre_with_derivatives,
    log_bessel_half,
)

# 50-digit mpmath references
GOLDEN_I = {
    (5, 2.5): 0.015016560121825450741,  # I_{11/2}(2.5)
    (1, 1.0): 0.29352532634747979979,  # I_{3/2}(1)
}

radii = st.floats(min_value=1e-3, max_value=200.0, allow_nan=False)
orders = st.integers(min_value=0, max_value=60)


@pytest.mark.parametrize("key,expected", sorted(GOLDEN_I.items()))
def test_golden_values(key, expected):
    m, r = key
    assert bessel_half(m, r) == pytest.approx(expected, rel=1e-14)


def test_i_half_closed_form():
    for r in (0.01, 0.7, 3.0, 40.0):
        assert bessel_half(0, r) == pytest.approx(math.sqrt(2 / (math.pi * r)) * math.sinh(r), rel=1e-14)


@pytest.mark.parametrize("m", [0, 1, 3, 10, 30])
@pytest.mark.parametrize("r", [1e-3, 0.5, 5.0, 49.0, 51.0, 120.0])
def test_against_scipy(m, r):
    assert bessel_half(m, r) == pytest.approx(iv(m + 0.5, r), rel=1e-12)
    assert log_bessel_half(m, r) == pytest.approx(math.log(iv(m + 0.5, r)), rel=1e-12, abs=1e-12)


def test_scaled_survives_overflow():
    assert math.isinf(bessel_half(0, 800.0))
    assert bessel_half_scaled(0, 800.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi * 800.0), rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_half(0, 0.0)
    with pytest.raises(DomainError):
        bessel_half(-1, 1.0)
    with pytest.raises(DomainError):
        bessel_ratio(0, -2.0)


def test_ratio_small_and_large_argument_limits():
    # q_k ~ r / (2k + 3) as r -> 0 and q_k -> 1 as r -> infinity
    assert bessel_ratio(4, 1e-6) == pytest.approx(1e-6 / 11, rel=1e-9)
    assert bessel_ratio(0, 1e4) == pytest.approx(1.0 / math.tanh(1e4) - 1e-4, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(min_value=1, max_value=40), r=st.floats(min_value=0.05, max_value=50.0))
def test_three_term_recurrence(m, r):
    lo, mid, hi = bessel_half(m - 1, r), bessel_half(m, r), bessel_half(m + 1, r)
    assert abs(lo - hi - (2 * m + 1) / r * mid) <= 1e-9 * lo


@settings(max_examples=200, deadline=None)
@given(m=orders, r=st.floats(min_value=0.05, max_value=50.0))
def test_ratio_matches_series_quotient(m, r):
    mid, hi = bessel_half(m, r), bessel_half(m + 1, r)
    if hi > 1e-290:
        assert bessel_ratio(m, r) == pytest.approx(hi / mid, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(r=radii)
def test_ratios_bounded_and_decreasing(r):
    q = bessel_ratios(60, r)
    assert np.all(q > 0) and np.all(q < 1)
    assert np.all(np.diff(q) < 0)


@settings(max_examples=100, deadline=None)
@given(m=orders, r=st.floats(min_value=0.01, max_value=40.0))
def test_increasing_in_argument(m, r):
    assert bessel_half(m, r * 1.01) > bessel_half(m, r)


def test_vector_ratios_agree_with_scalar():
    q = bessel_ratios(25, 3.7)
    assert np.allclose(q, [bessel_ratio(k, 3.7) for k in range(26)], rtol=1e-14, atol=0)


@pytest.mark.parametrize("x", [-1.0, -0.3, 0.0, 0.45, 1.0])
def test_legendre_low_orders(x):
    assert legendre(0, x) == 1.0
    assert legendre(1, x) == x
    assert legendre(2, x) == pytest.approx(1.5 * x * x - 0.5, abs=1e-15)
    assert legendre(3, x) == pytest.approx(2.5 * x**3 - 1.5 * x, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(k=st.integers(min_value=1, max_value=30), x=st.floats(min_value=-1.0, max_value=1.0))
def test_legendre_derivatives_satisfy_ode(k, x):
    p, dp, d2p = legendre_with_derivatives(k, x)
    # (1 - x^2) P'' - 2x P' + k(k+1) P = 0
    scale = 1.0 + k * k * (abs(p) + abs(dp) + abs(d2p))
    assert abs((1 - x * x) * d2p - 2 * x * dp + k * (k + 1) * p) <= 1e-11 * scale
    assert legendre_with_derivatives(k, 1.0)[1] == pytest.approx(k * (k + 1) / 2)
