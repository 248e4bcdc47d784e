"""Oracle suite: every closed form checked against an independent computation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .oracle import (
    REFINEMENT_GRIDS,
    boundary_velocity_extrapolated,
    convergence_ratios,
    curvature_derivative,
    solve_mode_bvp,
)
from .special import bessel_half, bessel_ratio, legendre_with_derivatives
from .spectrum import coefficients, compute_spectrum, lambda_k_direct, linearized_curvature
from .stationary import Branch, ModelParams, f_of_R, f_prime_of_R, f_prime_via_bessel, solve_stationary
from .dynamics import radial_rhs

DEFAULT_TOLERANCES = {
    "bessel_recurrence": 1e-9,
    "bessel_ratio_quotient": 1e-12,
    "stationary_residual": 1e-12,
    "f_prime_dual": 1e-8,
    "lambda1_zero": 1e-10,
    "lambda0_identity": 1e-9,
    "dual_formula": 1e-9,
    "fd_mode_eigenvalue": 1e-6,
    "fd_convergence_order": 0.5,
    "curvature_linearization": 1e-4,
    "radial_rhs_gate": 1e-6,
}
CURVATURE_MODES = (0, 1, 2, 3, 5, 8)
CURVATURE_ANGLES = (0.0, 0.4, 1.1, math.pi / 2, 2.3, math.pi)
# differences this small are rounding noise, not discretization error
CONVERGENCE_NOISE = 1e-12


@dataclass
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["measured"]):
            d["measured"] = None
        return d


def _result(name: str, measured: float, tolerances: dict, detail: str = "", extra_ok: bool = True) -> CheckResult:
    tol = tolerances[name]
    return CheckResult(name, float(measured), float(tol), bool(measured <= tol and extra_ok), detail)


def check_bessel(tolerances: dict) -> list[CheckResult]:
    worst_rec = 0.0
    worst_ratio = 0.0
    for m in range(1, 51):
        for r in (0.05, 0.5, 1.0, 3.0, 10.0, 25.0, 50.0):
            lo, mid, hi = bessel_half(m - 1, r), bessel_half(m, r), bessel_half(m + 1, r)
            worst_rec = max(worst_rec, abs(lo - hi - (2 * m + 1) / r * mid) / lo)
            if mid > 0 and math.isfinite(hi) and hi > 0:
                worst_ratio = max(worst_ratio, abs(bessel_ratio(m, r) / (hi / mid) - 1.0))
    return [
        _result("bessel_recurrence", worst_rec, tolerances, "m in [1,50], r in (0,50]"),
        _result("bessel_ratio_quotient", worst_ratio, tolerances, "continued fraction vs series quotient"),
    ]


def check_stationary(params: ModelParams, states, tolerances: dict) -> list[CheckResult]:
    level = params.theta / 3.0
    residual = max(abs(f_of_R(params, s.radius) - level) for s in states)
    signs_ok = all(
        (s.branch is Branch.SMALLER and s.f_prime > 0) or (s.branch is Branch.LARGER and s.f_prime < 0)
        for s in states
    )
    dual = max(
        abs(f_prime_of_R(params, s.radius) - f_prime_via_bessel(params, s.radius)) / abs(s.f_prime)
        for s in states
    )
    return [
        _result("stationary_residual", residual, tolerances, f"f' signs ok: {signs_ok}", signs_ok),
        _result("f_prime_dual", dual, tolerances, "analytic f' vs h_0/j_0 identity"),
    ]


def check_spectrum_identities(states, tolerances: dict) -> list[CheckResult]:
    lam1 = lam0 = dual = 0.0
    signs_ok = True
    for s in states:
        sp = compute_spectrum(s, 200)
        p = s.params
        scale0 = max(1.0, abs(sp.lambdas[0]))
        lam1 = max(lam1, abs(sp.lambdas[1]) / scale0)
        lam0 = max(lam0, abs(sp.lambdas[0] + p.mu * p.sigma_bar * s.radius * s.f_prime) / (1.0 + abs(sp.lambdas[0])))
        ks = slice(2, 201)
        dual = max(dual, float(np.max(np.abs(sp.lambdas[ks] - sp.lambdas_hj[ks]) / np.maximum(1.0, np.abs(sp.lambdas[ks])))))
        signs_ok &= bool(sp.j[0] < 0 and abs(sp.j[1]) < 1e-12 and np.all(sp.j[2:] > 0))
    return [
        _result("lambda1_zero", lam1, tolerances),
        _result("lambda0_identity", lam0, tolerances),
        _result("dual_formula", dual, tolerances, f"k in [2,200]; j-sign facts ok: {signs_ok}", signs_ok),
    ]


def check_fd_modes(states, tolerances: dict, n_grid: int = 4096, k_max: int = 20, grids=REFINEMENT_GRIDS) -> list[CheckResult]:
    worst = 0.0
    worst_order = 0.0
    for s in states:
        coeffs = coefficients(s)
        for k in range(k_max + 1):
            exact = lambda_k_direct(coeffs, s, k)
            scale = max(1.0, abs(exact))
            worst = max(worst, abs(solve_mode_bvp(s, k, n_grid).lambda_fd - exact) / scale)
            values = [solve_mode_bvp(s, k, n).lambda_fd for n in grids]
            diffs = np.abs(np.diff(values))
            for i, ratio in enumerate(convergence_ratios(values)):
                if diffs[i + 1] < CONVERGENCE_NOISE * scale:
                    continue
                worst_order = max(worst_order, abs(ratio - 4.0))
    return [
        _result("fd_mode_eigenvalue", worst, tolerances, f"k in [0,{k_max}], n_grid={n_grid}"),
        _result("fd_convergence_order", worst_order, tolerances, "max |ratio - 4| over refinements"),
    ]


def check_curvature(R: float, tolerances: dict) -> list[CheckResult]:
    worst = 0.0
    for k in CURVATURE_MODES:
        coef = linearized_curvature(R, k)
        scale = max(abs(coef), 1.0 / R**2)
        for theta in CURVATURE_ANGLES:
            p_k = legendre_with_derivatives(k, math.cos(theta))[0]
            worst = max(worst, abs(curvature_derivative(R, k, theta) - coef * p_k) / scale)
    return [_result("curvature_linearization", worst, tolerances, f"k in {list(CURVATURE_MODES)}")]


def check_radial_rhs(params: ModelParams, states, tolerances: dict, n_grid: int = 2048) -> list[CheckResult]:
    lo = min(s.radius for s in states) / 2.0
    hi = 2.0 * max(s.radius for s in states)
    worst = 0.0
    for R in np.geomspace(lo, hi, 10):
        formula = radial_rhs(params, R)
        worst = max(worst, abs(boundary_velocity_extrapolated(params, R, n_grid) - formula) / abs(formula))
    return [_result("radial_rhs_gate", worst, tolerances, "10 radii in (R_s1/2, 2 R_s2)")]


def run_suite(params: ModelParams, tolerances: dict | None = None, n_grid: int = 4096, k_max: int = 20) -> list[CheckResult]:
    """Run every oracle check for ``params``; requires two stationary radii."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    states = [s for s in solve_stationary(params) if s.branch is not Branch.DEGENERATE]
    results = check_bessel(tol)
    if not states:
        results.append(CheckResult("stationary_residual", math.nan, tol["stationary_residual"], False, "no equilibria"))
        return results
    results += check_stationary(params, states, tol)
    results += check_spectrum_identities(states, tol)
    results += check_fd_modes(states, tol, n_grid=n_grid, k_max=k_max)
    results += check_curvature(states[-1].radius, tol)
    results += check_radial_rhs(params, states, tol)
    return results
