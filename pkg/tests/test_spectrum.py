import math

import numpy as np
import pytest

from spheroid_spectrum import (
    Branch,
    ModelParams,
    Stability,
    classify,
    coefficients,
    compute_spectrum,
    gamma_thresholds,
    h_j_of_k,
    lambda_k_direct,
    lambda_k_hj,
    linearized_curvature,
    solve_stationary,
    state_from_radius,
)
from spheroid_spectrum.errors import DomainError
from spheroid_spectrum.oracle import solve_mode_bvp
from spheroid_spectrum.spectrum import classify_state, coefficients_from_profiles

# mpmath references on the larger root of (1, 0.3, 1, 0.1)
C1 = 0.00065203440286684361164
C2 = -0.87438463371357563998
C3 = -0.68858041679511162184
LAMBDA = {0: 0.085953179451672538534, 2: -0.073112748785990660573, 7: -0.29860929557731354539}


@pytest.fixture
def large(default_states):
    return default_states[1]


def test_coefficient_goldens(large):
    c = coefficients(large)
    assert c.c1 == pytest.approx(C1, rel=1e-12)
    assert c.c2 == pytest.approx(C2, rel=1e-12)
    assert c.c3 == pytest.approx(C3, rel=1e-12)


def test_coefficients_from_profiles_agree(default_states):
    for state in default_states:
        a, b = coefficients(state), coefficients_from_profiles(state)
        assert b.c2 == pytest.approx(a.c2, rel=1e-11)
        assert b.c3 == pytest.approx(a.c3, rel=1e-11)


@pytest.mark.parametrize("k", sorted(LAMBDA))
def test_lambda_goldens(large, k):
    assert lambda_k_direct(coefficients(large), large, k) == pytest.approx(LAMBDA[k], rel=1e-11)
    assert lambda_k_hj(large, k) == pytest.approx(LAMBDA[k], rel=1e-10)


def test_translation_mode_and_radial_mode(default_states):
    for state in default_states:
        sp = compute_spectrum(state, 10)
        p = state.params
        assert abs(sp.lambdas[1]) < 1e-12
        assert sp.lambdas[0] == pytest.approx(-p.mu * p.sigma_bar * state.radius * state.f_prime, rel=1e-10)


def test_lambda_7_against_fd_oracle(large):
    exact = lambda_k_direct(coefficients(large), large, 7)
    assert solve_mode_bvp(large, 7, 4096).lambda_fd == pytest.approx(exact, rel=1e-6)


def test_h_j_signs(large):
    sp = compute_spectrum(large, 100)
    assert sp.h[0] < 0 and sp.h[1] == pytest.approx(0.0, abs=1e-15)
    assert np.all(sp.h[2:] > 0)
    assert sp.j[0] < 0 and abs(sp.j[1]) < 1e-12 and np.all(sp.j[2:] > 0)


def test_h_j_depend_only_on_radius():
    a = state_from_radius(2.5, 1.0, 0.2, 1.0)
    b = state_from_radius(2.5, 3.0, 1.1, 4.0)
    for k in (0, 2, 9):
        assert h_j_of_k(a, k) == h_j_of_k(b, k)


def test_lambda_vanishes_at_gamma_k():
    R = 3.0
    scan = gamma_thresholds(R, 30)
    for k in (2, 5, 17):
        state = state_from_radius(R, 1.0, float(scan.gamma_k[k - 2]), 1.0)
        lam = lambda_k_direct(coefficients(state), state, k)
        assert abs(lam) < 1e-11 * max(1.0, abs(lambda_k_direct(coefficients(state), state, 0)))


def test_lambda_sign_follows_gamma_k():
    R = 3.0
    scan = gamma_thresholds(R, 30)
    g5 = float(scan.gamma_k[3])
    above = state_from_radius(R, 1.0, 1.05 * g5, 1.0)
    below = state_from_radius(R, 1.0, 0.95 * g5, 1.0)
    assert lambda_k_hj(above, 5) > 0 > lambda_k_hj(below, 5)


def test_large_k_asymptotics():
    # small radius: q_k ~ R/(2k+3), so Lambda_k grows like mu gamma sigma_bar k / (4 R)
    state = solve_stationary(ModelParams(1.0, 0.3, 1.0, 0.1))[0]
    p, R = state.params, state.radius
    lam = lambda_k_direct(coefficients(state), state, 200)
    assert lam / (p.mu * p.gamma * p.sigma_bar * 200 / (4 * R)) == pytest.approx(1.0, rel=0.02)
    sp = compute_spectrum(state, 400)
    assert np.all(np.diff(sp.lambdas[50:]) > 0)


def test_gamma_thresholds_properties():
    for R in (0.3, 1.0, 5.0, 20.0):
        scan = gamma_thresholds(R, 60)
        assert np.all(scan.gamma_k > 0)
        assert np.all(scan.gamma_k < R)
        assert scan.gamma_star == pytest.approx(scan.gamma_k.max())
        assert scan.k_scanned >= 60
        tail = scan.ks >= 50
        assert np.all(scan.gamma_k[tail] < 8 * R / scan.ks[tail])


def test_gamma_thresholds_tiny_radius_is_fast():
    scan = gamma_thresholds(0.011, 200)
    assert scan.k_scanned < 10_000
    assert scan.gamma_star > 0


def test_classification_default(default_params):
    report = classify(default_params)
    small, large = report.branches
    assert small.classification is Stability.UNSTABLE and small.lambda_0 < 0
    assert large.classification is Stability.UNSTABLE
    assert large.gamma_star == pytest.approx(2.8146, rel=1e-4)
    assert large.attained_at == 2
    assert 2 in large.unstable_modes


def test_classification_stable_state():
    scan = gamma_thresholds(2.0, 64)
    state = state_from_radius(2.0, 1.0, 1.01 * scan.gamma_star, 1.0)
    assert state.branch is Branch.LARGER
    report = classify_state(state)
    assert report.classification is Stability.STABLE
    assert report.unstable_modes == []


def test_classify_no_equilibria():
    report = classify(ModelParams(1.0, 5.0, 1.0, 0.1))
    assert report.branches == []
    assert "no equilibria" in report.message


def test_report_serializes(default_params):
    d = classify(default_params).to_dict()
    assert d["branches"][1]["classification"] == "unstable"


def test_linearized_curvature():
    assert linearized_curvature(2.0, 0) == pytest.approx(-0.25)
    assert linearized_curvature(2.0, 1) == 0.0
    assert linearized_curvature(2.0, 3) == pytest.approx(5 / 4)


def test_mu_scales_lambda_but_not_thresholds():
    a = compute_spectrum(state_from_radius(2.0, 1.0, 0.5, 1.0), 40)
    b = compute_spectrum(state_from_radius(2.0, 1.0, 0.5, 7.3), 40)
    assert np.allclose(b.lambdas, 7.3 * a.lambdas, rtol=1e-13, atol=1e-15)
    assert np.array_equal(a.gamma_k[2:], b.gamma_k[2:])


def test_bad_k_rejected(large):
    with pytest.raises(DomainError):
        lambda_k_direct(coefficients(large), large, -1)
    with pytest.raises(DomainError):
        compute_spectrum(large, 1)
    with pytest.raises(DomainError):
        h_j_of_k(large, 2.5)
