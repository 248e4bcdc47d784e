"""Eigenvalues of the linearized boundary evolution at a stationary ball.

Perturbing the boundary by a spherical harmonic of degree k multiplies it by
``Lambda_k``; a positive value means the mode decays.  Two algebraically
equivalent formulas are provided (they agree only at genuine stationary
radii), together with the adhesiveness thresholds ``gamma_k`` where
``Lambda_k`` changes sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special import bessel_ratio, bessel_ratios
from .stationary import (
    Branch,
    ModelParams,
    StationaryState,
    pressure_second_derivative_at_boundary,
    sigma_prime_at_boundary,
    solve_stationary,
)

TAIL_RUN = 50


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class LinearizationCoefficients:
    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class ThresholdScan:
    """Per-mode thresholds ``gamma_k`` for ``k = ks[0]..ks[-1]`` (``ks[0] == 2``)."""

    ks: np.ndarray
    gamma_k: np.ndarray
    gamma_star: float
    attained_at: int

    @property
    def k_scanned(self) -> int:
        return int(self.ks[-1])


@dataclass(frozen=True)
class ModeSpectrum:
    """Spectrum data for k = 0..k_max; ``gamma_k`` is NaN for k < 2."""

    state: StationaryState
    k_max: int
    lambdas: np.ndarray
    lambdas_hj: np.ndarray
    h: np.ndarray
    j: np.ndarray
    gamma_k: np.ndarray
    gamma_star: float
    attained_at: int
    classification: Stability


@dataclass
class BranchReport:
    branch: Branch
    radius: float
    f_prime: float
    lambda_0: float
    gamma: float
    gamma_star: float
    attained_at: int
    classification: Stability
    unstable_modes: list[int] = field(default_factory=list)
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "branch": self.branch.value,
            "radius": self.radius,
            "f_prime": self.f_prime,
            "lambda_0": self.lambda_0,
            "gamma": self.gamma,
            "gamma_star": self.gamma_star,
            "attained_at": self.attained_at,
            "classification": self.classification.value,
            "unstable_modes": list(self.unstable_modes),
            "reason": self.reason,
        }


@dataclass
class ClassificationReport:
    params: ModelParams
    branches: list[BranchReport]
    message: str = ""

    @property
    def has_equilibria(self) -> bool:
        return bool(self.branches)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "message": self.message,
            "branches": [b.to_dict() for b in self.branches],
        }


def _check_k(k: int, minimum: int = 0) -> int:
    if int(k) != k or k < minimum:
        raise DomainError(f"mode index must be an integer >= {minimum}, got {k!r}")
    return int(k)


def coefficients(state: StationaryState) -> LinearizationCoefficients:
    p = state.params
    R = state.radius
    c1 = p.mu * p.gamma * p.sigma_bar / (2.0 * R * R)
    c2 = p.mu * p.gamma * p.sigma_bar / (R * R) - p.mu * p.sigma_tilde * R / 3.0
    c3 = -p.mu * (p.sigma_bar * (1.0 - p.gamma / R) - p.sigma_tilde)
    return LinearizationCoefficients(c1=c1, c2=c2, c3=c3)


def coefficients_from_profiles(state: StationaryState) -> LinearizationCoefficients:
    """Same constants, built from the profile derivatives at the boundary.

    Agrees with :func:`coefficients` only at a true stationary radius, where
    sigma_s'(R_s) = sigma_tilde R_s / 3.
    """
    p = state.params
    R = state.radius
    c1 = p.mu * p.gamma * p.sigma_bar / (2.0 * R * R)
    c2 = p.mu * p.gamma * p.sigma_bar / (R * R) - p.mu * sigma_prime_at_boundary(state)
    c3 = pressure_second_derivative_at_boundary(state)
    return LinearizationCoefficients(c1=c1, c2=c2, c3=c3)


def boundary_amplitude(coeffs: LinearizationCoefficients, k: int) -> float:
    """Nutrient perturbation on the boundary for a unit degree-k displacement."""
    return coeffs.c2 - coeffs.c1 * k * (k + 1)


def lambda_k_direct(coeffs: LinearizationCoefficients, state: StationaryState, k: int) -> float:
    """Lambda_k = -(c2 - c1 k(k+1)) I_{k+3/2}(R_s)/I_{k+1/2}(R_s) + c3."""
    k = _check_k(k)
    return -boundary_amplitude(coeffs, k) * bessel_ratio(k, state.radius) + coeffs.c3


def h_j_of_k(state: StationaryState, k: int) -> tuple[float, float]:
    k = _check_k(k)
    R = state.radius
    q0 = bessel_ratio(0, R)
    qk = bessel_ratio(k, R)
    h = ((k * k + k) / 2.0 - 1.0) * qk / R
    j = 1.0 - 3.0 * q0 / R - q0 * qk
    return h, j


def h_j_arrays(R: float, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``h_k``, ``j_k`` for k = 0..k_max at radius R."""
    q = bessel_ratios(k_max, R)
    k = np.arange(k_max + 1, dtype=float)
    h = ((k * k + k) / 2.0 - 1.0) * q / R
    j = 1.0 - 3.0 * q[0] / R - q[0] * q
    return h, j


def lambda_k_hj(state: StationaryState, k: int) -> float:
    """Lambda_k = (mu sigma_bar / R_s) (gamma (h_k + j_k) - j_k R_s).

    Stated for k >= 2 in the threshold analysis, but valid for every k >= 0.
    """
    p = state.params
    h, j = h_j_of_k(state, k)
    R = state.radius
    return p.mu * p.sigma_bar / R * (p.gamma * (h + j) - j * R)


def _gamma_k_from_hj(h: np.ndarray, j: np.ndarray, R: float) -> np.ndarray:
    return j / (h + j) * R


def gamma_thresholds(state: StationaryState | float, k_max: int) -> ThresholdScan:
    """Thresholds gamma_k and their supremum gamma_*.

    The scan covers k = 2..k_max and is doubled until the bound
    ``gamma_k < j_inf R_s / h_k`` (from j_k < j_inf = 1 - 3 q_0/R_s) has
    stayed below the running maximum for the last 50 modes, so no later
    mode can exceed it.  ``gamma_k`` depends only on the radius, so a bare
    radius is accepted.
    """
    k_max = _check_k(k_max, 2)
    R = state.radius if isinstance(state, StationaryState) else float(state)
    k_end = max(k_max, TAIL_RUN + 2)
    while True:
        h, j = h_j_arrays(R, k_end)
        g = _gamma_k_from_hj(h[2:], j[2:], R)
        g_max = float(np.max(g))
        j_inf = 1.0 - 3.0 * bessel_ratio(0, R) / R
        bound = j_inf * R / h[-TAIL_RUN:]
        if np.all(bound < g_max) and np.all(np.diff(h[-TAIL_RUN:]) > 0):
            break
        k_end *= 2
    i = int(np.argmax(g))
    return ThresholdScan(
        ks=np.arange(2, len(g) + 2), gamma_k=g, gamma_star=float(g[i]), attained_at=i + 2
    )


def linearized_curvature(state: StationaryState | float, k: int) -> float:
    """Per-mode coefficient of the curvature derivative: -(1 - k(k+1)/2) / R_s**2."""
    k = _check_k(k)
    R = state.radius if isinstance(state, StationaryState) else float(state)
    return -(1.0 - (k * k + k) / 2.0) / (R * R)


def compute_spectrum(state: StationaryState, k_max: int) -> ModeSpectrum:
    k_max = _check_k(k_max, 2)
    p = state.params
    R = state.radius
    coeffs = coefficients(state)
    q = bessel_ratios(k_max, R)
    k = np.arange(k_max + 1, dtype=float)
    lambdas = -(coeffs.c2 - coeffs.c1 * k * (k + 1)) * q + coeffs.c3
    h, j = h_j_arrays(R, k_max)
    lambdas_hj = p.mu * p.sigma_bar / R * (p.gamma * (h + j) - j * R)
    scan = gamma_thresholds(R, k_max)
    gamma_k = np.full(k_max + 1, np.nan)
    gamma_k[2:] = scan.gamma_k[: k_max - 1]
    classification, _, _ = _classify_state(state, lambdas[0], scan)
    return ModeSpectrum(
        state=state,
        k_max=k_max,
        lambdas=lambdas,
        lambdas_hj=lambdas_hj,
        h=h,
        j=j,
        gamma_k=gamma_k,
        gamma_star=scan.gamma_star,
        attained_at=scan.attained_at,
        classification=classification,
    )


def _classify_state(
    state: StationaryState, lambda_0: float, scan: ThresholdScan
) -> tuple[Stability, list[int], str]:
    gamma = state.params.gamma
    # sign(Lambda_k) = sign(gamma - gamma_k) for k >= 2; beyond the scan gamma_k < gamma_*
    negative = [int(k) for k in scan.ks[scan.gamma_k > gamma]]
    if state.branch is Branch.DEGENERATE:
        return Stability.MARGINAL, negative, "tangency root: Lambda_0 = 0"
    if lambda_0 < 0:
        modes = [0] + negative
        return Stability.UNSTABLE, modes, "Lambda_0 < 0 (f'(R_s) > 0): radially unstable"
    if negative:
        return Stability.UNSTABLE, negative, "gamma < gamma_*: a non-radial mode grows"
    return Stability.STABLE, [], "Lambda_0 > 0 and gamma > gamma_*: all modes k != 1 decay"


def classify_state(state: StationaryState, k_max: int = 64) -> BranchReport:
    coeffs = coefficients(state)
    lambda_0 = lambda_k_direct(coeffs, state, 0)
    scan = gamma_thresholds(state, k_max)
    classification, modes, reason = _classify_state(state, lambda_0, scan)
    return BranchReport(
        branch=state.branch,
        radius=state.radius,
        f_prime=state.f_prime,
        lambda_0=lambda_0,
        gamma=state.params.gamma,
        gamma_star=scan.gamma_star,
        attained_at=scan.attained_at,
        classification=classification,
        unstable_modes=modes,
        reason=reason,
    )


def classify(params: ModelParams, k_max: int = 64) -> ClassificationReport:
    """Stability of every radial stationary solution for ``params``."""
    states = solve_stationary(params)
    if not states:
        return ClassificationReport(params=params, branches=[], message="no equilibria (theta >= theta_*)")
    return ClassificationReport(params=params, branches=[classify_state(s, k_max) for s in states])
