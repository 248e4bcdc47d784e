"""Brute-force checks for the closed-form spectrum.

The degree-k radial problems

    a'' + 2a'/r - k(k+1) a / r^2 = a,      a(R_s) = c2 - c1 k(k+1)
    b'' + 2b'/r - k(k+1) b / r^2 = -a,     b(R_s) = 0

are solved by second-order finite differences, and ``b'(R_s) + c3`` is the
oracle eigenvalue.  Writing ``a = (r/R_s)^k u`` removes the ``r^k`` behaviour
at the origin; ``u`` is even and smooth, so a cell-centred grid with a mirror
ghost node handles r = 0 for every k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, NumericalFailure
from .special import legendre_with_derivatives, log_bessel_half
from .spectrum import boundary_amplitude, coefficients
from .stationary import ModelParams, ProfileKind, RadialProfile, StationaryState, f_of_R

DEFAULT_GRID = 2048
REFINEMENT_GRIDS = (512, 1024, 2048, 4096)
CURVATURE_EPS = (1e-3, 5e-4, 2.5e-4)
MIN_GRID = 64


@dataclass(frozen=True)
class ModeBvpSolution:
    k: int
    grid: np.ndarray
    a: np.ndarray
    b: np.ndarray
    b_prime_at_Rs: float
    lambda_fd: float


def radial_grid(R: float, n: int) -> tuple[np.ndarray, float]:
    """Cell-centred nodes ``(i + 1/2) h``, i = 0..n, with the last node at R."""
    h = R / (n + 0.5)
    return (np.arange(n + 1) + 0.5) * h, h


def solve_radial(
    k: int, R: float, n: int, shift: float, source: np.ndarray | None, boundary_value: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """Solve ``u'' + (2k+2)/r u' - shift u = source`` with ``u(R) = boundary_value``.

    ``source`` is given at the n interior nodes.  Returns ``(r, u, h)`` with
    ``u`` including the boundary node.
    """
    if n < MIN_GRID:
        raise DomainError(f"n_grid must be at least {MIN_GRID}, got {n}")
    r, h = radial_grid(R, n)
    ri = r[:-1]
    m = 2 * k + 2
    inv_h2 = 1.0 / (h * h)
    upper = inv_h2 + m / (2.0 * h * ri)
    lower = inv_h2 - m / (2.0 * h * ri)
    diag = np.full(n, -2.0 * inv_h2 - shift)
    # u is even in r: the ghost node at -h/2 mirrors node 0
    diag[0] += lower[0]
    rhs = np.zeros(n) if source is None else np.array(source, dtype=float)
    rhs[-1] -= upper[-1] * boundary_value
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    try:
        u = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular radial system for k={k}, n={n}") from exc
    if not np.all(np.isfinite(u)):
        raise NumericalFailure(f"non-finite radial solution for k={k}, n={n}")
    return r, np.append(u, boundary_value), h


def boundary_slope(u: np.ndarray, h: float) -> float:
    """One-sided derivative at the last node (five-point, fourth order)."""
    return (25.0 * u[-1] - 48.0 * u[-2] + 36.0 * u[-3] - 16.0 * u[-4] + 3.0 * u[-5]) / (12.0 * h)


def solve_mode_bvp(state: StationaryState, k: int, n_grid: int = DEFAULT_GRID) -> ModeBvpSolution:
    """Finite-difference eigenvalue of degree-k perturbations (unit amplitude)."""
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    k = int(k)
    R = state.radius
    coeffs = coefficients(state)
    amplitude = boundary_amplitude(coeffs, k)
    r, u, h = solve_radial(k, R, n_grid, 1.0, None, amplitude)
    _, w, _ = solve_radial(k, R, n_grid, 0.0, -u[:-1], 0.0)
    # b = (r/R)^k w and w(R) = 0, so b'(R) = w'(R)
    b_prime = boundary_slope(w, h)
    scale = (r / R) ** k
    return ModeBvpSolution(
        k=k,
        grid=r,
        a=scale * u,
        b=scale * w,
        b_prime_at_Rs=b_prime,
        lambda_fd=b_prime + coeffs.c3,
    )


def convergence_ratios(values: list[float] | np.ndarray) -> np.ndarray:
    """Successive ratios |v(n) - v(2n)| / |v(2n) - v(4n)| for a refinement sequence."""
    v = np.asarray(values, dtype=float)
    diffs = np.abs(np.diff(v))
    return diffs[:-1] / diffs[1:]


def mode_refinement(state: StationaryState, k: int, grids=REFINEMENT_GRIDS) -> np.ndarray:
    return np.array([solve_mode_bvp(state, k, n).lambda_fd for n in grids])


def mode_profiles_closed_form(
    state: StationaryState, k: int, grid
) -> tuple[RadialProfile, RadialProfile]:
    """Closed-form mode profiles a_k, b_k (unit displacement amplitude) on ``grid``."""
    R = state.radius
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size == 0 or r.min() <= 0.0 or r.max() > R * (1 + 1e-12):
        raise DomainError(f"grid must lie within (0, {R}]")
    r = np.minimum(r, R)
    amplitude = boundary_amplitude(coefficients(state), k)
    log_iR = log_bessel_half(k, R)
    shape = np.array(
        [math.exp(0.5 * math.log(R / x) + log_bessel_half(k, x) - log_iR) for x in r]
    )
    a = amplitude * shape
    b = -amplitude * (shape - (r / R) ** k)
    return (
        RadialProfile(grid=r, values=a, kind=ProfileKind.MODE_A, radius=R),
        RadialProfile(grid=r, values=b, kind=ProfileKind.MODE_B, radius=R),
    )


def boundary_velocity_fd(params: ModelParams, R: float, n_grid: int = DEFAULT_GRID) -> float:
    """Normal velocity -p'(R) of a ball of radius R from elliptic finite differences.

    Solves sigma'' + 2 sigma'/r = sigma with sigma(R) = sigma_bar (1 - gamma/R)
    and p'' + 2p'/r = -mu (sigma - sigma_tilde) with p(R) = p_bar.
    """
    if not R > 0:
        raise DomainError(f"radius must be positive, got {R!r}")
    boundary_sigma = params.sigma_bar * (1.0 - params.gamma / R)
    _, sigma, _ = solve_radial(0, R, n_grid, 1.0, None, boundary_sigma)
    source = -params.mu * (sigma[:-1] - params.sigma_tilde)
    _, p, h = solve_radial(0, R, n_grid, 0.0, source, params.p_bar)
    return -boundary_slope(p, h)


def boundary_velocity_extrapolated(params: ModelParams, R: float, n_grid: int = DEFAULT_GRID) -> float:
    """Richardson extrapolation of :func:`boundary_velocity_fd` from n and 2n."""
    coarse = boundary_velocity_fd(params, R, n_grid)
    fine = boundary_velocity_fd(params, R, 2 * n_grid)
    return (4.0 * fine - coarse) / 3.0


def _axisymmetric_derivatives(rho_coeffs, theta: float) -> tuple[float, float, float]:
    x = math.cos(theta)
    x = min(1.0, max(-1.0, x))
    s = math.sin(theta)
    rho = d_theta = d_theta2 = 0.0
    for k, c in enumerate(rho_coeffs):
        if c == 0.0:
            continue
        p, dp, d2p = legendre_with_derivatives(k, x)
        rho += c * p
        d_theta += c * (-s * dp)
        d_theta2 += c * (s * s * d2p - x * dp)
    return rho, d_theta, d_theta2


def curvature_axisymmetric(R_s: float, rho_coeffs, theta: float) -> float:
    """Mean curvature of ``r = R_s + rho(theta)``, ``rho = sum_k c_k P_k(cos theta)``."""
    rho, rt, rtt = _axisymmetric_derivatives(rho_coeffs, theta)
    r = R_s + rho
    if r <= 0.0:
        raise DomainError("perturbed radius must stay positive")
    sin_t = math.sin(theta)
    if abs(sin_t) < 1e-12:
        laplacian = 2.0 * rtt
    else:
        laplacian = rtt + math.cos(theta) / sin_t * rt
    grad2 = rt * rt
    # grad(|grad rho|^2) . grad rho for a function of theta alone
    grad_grad2_dot = 2.0 * rt * rtt * rt
    root = math.sqrt(r * r + grad2)
    first = (2.0 * r - laplacian) / (r * root)
    second = (2.0 * r * grad2 + grad_grad2_dot) / (2.0 * r * root**3)
    return 0.5 * (first + second)


def curvature_derivative(R_s: float, k: int, theta: float, eps=CURVATURE_EPS) -> float:
    """Richardson-extrapolated d/d(eps) of curvature at ``rho = eps P_k``.

    The difference quotient is ``L + c1 eps + c2 eps^2 + ...``; with the
    default halving sequence both correction terms are eliminated.
    """
    eps = [float(e) for e in eps]
    if not eps or eps[0] <= 0 or any(not math.isclose(b, a / 2.0, rel_tol=1e-12) for a, b in zip(eps, eps[1:])):
        raise DomainError("eps must be a positive halving sequence")
    coeffs = [0.0] * k + [1.0]
    base = 1.0 / R_s
    quotients = []
    for e in eps:
        scaled = [e * c for c in coeffs]
        quotients.append((curvature_axisymmetric(R_s, scaled, theta) - base) / e)
    table = list(quotients)
    # Neville-style elimination of eps^1, eps^2, ... for ratio-2 sequences
    for order in range(1, len(table)):
        factor = 2.0**order
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


def stationary_residual(state: StationaryState) -> float:
    return f_of_R(state.params, state.radius) - state.params.theta / 3.0
