"""Radial stationary solutions of the Gibbs--Thomson spheroid model.

A ball of radius R is stationary when

    f(R) = (1 - gamma/R) * (R coth R - 1) / R**2 = sigma_tilde / (3 sigma_bar).

``f`` vanishes at R = gamma, rises to a single interior maximum and decays
like 1/R, so below the level ``theta_star / 3`` there are exactly two roots.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, NumericalFailure
from .special import bessel_ratio

ROOT_XTOL = 1e-12
SCAN_POINTS = 4096
DEGENERATE_TOL = 1e-10
_SMALL_R = 0.1
_SINHC_SERIES_R = 1e-4

# (R coth R - 1)/R^2 = sum_n c_n R^(2n); c_n = 2^(2n+2) B_(2n+2) / (2n+2)!
_G_SERIES = (
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model."""

    sigma_bar: float
    sigma_tilde: float
    mu: float
    gamma: float
    p_bar: float = 0.0

    def __post_init__(self) -> None:
        for name in ("sigma_bar", "sigma_tilde", "mu", "gamma"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        if not math.isfinite(self.p_bar):
            raise DomainError(f"p_bar must be finite, got {self.p_bar!r}")

    @property
    def theta(self) -> float:
        """Nutrient ratio sigma_tilde / sigma_bar."""
        return self.sigma_tilde / self.sigma_bar

    def to_dict(self) -> dict:
        return {
            "sigma_bar": self.sigma_bar,
            "sigma_tilde": self.sigma_tilde,
            "mu": self.mu,
            "gamma": self.gamma,
            "p_bar": self.p_bar,
        }


class Branch(str, enum.Enum):
    SMALLER = "smaller"
    LARGER = "larger"
    DEGENERATE = "degenerate"


class ProfileKind(str, enum.Enum):
    NUTRIENT = "nutrient"
    PRESSURE = "pressure"
    MODE_A = "mode_a"
    MODE_B = "mode_b"


@dataclass(frozen=True)
class StationaryState:
    params: ModelParams
    radius: float
    branch: Branch
    f_value: float
    f_prime: float

    @property
    def boundary_nutrient(self) -> float:
        """sigma_bar * (1 - gamma / R_s)."""
        return self.params.sigma_bar * (1.0 - self.params.gamma / self.radius)


@dataclass(frozen=True)
class RadialProfile:
    grid: np.ndarray
    values: np.ndarray
    kind: ProfileKind
    radius: float = field(default=float("nan"))


def _g(R: float) -> float:
    """(R coth R - 1) / R**2 without cancellation at small R."""
    if R < _SMALL_R:
        r2 = R * R
        return sum(c * r2**n for n, c in enumerate(_G_SERIES))
    return (R / math.tanh(R) - 1.0) / (R * R)


def _g_prime(R: float) -> float:
    if R < _SMALL_R:
        r2 = R * R
        return sum(2 * n * c * R * r2 ** (n - 1) for n, c in enumerate(_G_SERIES) if n > 0)
    coth = 1.0 / math.tanh(R)
    # d/dR [(R coth R - 1)/R^2] = (1 - coth^2 + 1/R^2 - (coth - 1/R)^2 - 3(coth - 1/R)/R) / R
    q = coth - 1.0 / R
    return (1.0 - q * q - 3.0 * q / R) / R


def _f_array(gamma: float, R: np.ndarray) -> np.ndarray:
    """Vectorized :func:`f_of_R` for bracketing scans."""
    R = np.asarray(R, dtype=float)
    out = np.empty_like(R)
    small = R < _SMALL_R
    r2 = R[small] ** 2
    out[small] = sum(c * r2**n for n, c in enumerate(_G_SERIES))
    Rl = R[~small]
    out[~small] = (Rl / np.tanh(Rl) - 1.0) / (Rl * Rl)
    return (1.0 - gamma / R) * out


def _check_radius(R: float) -> float:
    R = float(R)
    if not R > 0.0 or not math.isfinite(R):
        raise DomainError(f"radius must be a positive finite real, got {R!r}")
    return R


def f_of_R(params: ModelParams | float, R: float) -> float:
    """Left-hand side of the stationarity equation.

    ``params`` may be a :class:`ModelParams` or just the adhesiveness gamma,
    since f depends on nothing else.
    """
    gamma = params.gamma if isinstance(params, ModelParams) else float(params)
    R = _check_radius(R)
    return (1.0 - gamma / R) * _g(R)


def f_prime_of_R(params: ModelParams | float, R: float) -> float:
    """Analytic derivative of :func:`f_of_R`."""
    gamma = params.gamma if isinstance(params, ModelParams) else float(params)
    R = _check_radius(R)
    return gamma / (R * R) * _g(R) + (1.0 - gamma / R) * _g_prime(R)


def h_j_zero(R: float) -> tuple[float, float]:
    """``(h_0, j_0)`` at radius R, built from the Bessel ratio I_{3/2}/I_{1/2}."""
    q0 = bessel_ratio(0, R)
    h0 = -q0 / R
    j0 = 1.0 - 3.0 * q0 / R - q0 * q0
    return h0, j0


def f_prime_via_bessel(params: ModelParams | float, R: float) -> float:
    """f'(R) = -(gamma (h_0 + j_0) - j_0 R) / R**2, an independent route to f'."""
    gamma = params.gamma if isinstance(params, ModelParams) else float(params)
    R = _check_radius(R)
    h0, j0 = h_j_zero(R)
    return -(gamma * (h0 + j0) - j0 * R) / (R * R)


def _scan_upper(gamma: float, theta: float | None = None) -> float:
    upper = max(100.0, 10.0 * gamma)
    if theta is not None and theta > 0:
        # f(R) < 1/R, so any root satisfies R < 3/theta
        upper = max(upper, 3.0 / theta * 1.01)
    return upper


def _scan_grid(gamma: float, upper: float) -> np.ndarray:
    return np.geomspace(gamma * (1.0 + 1e-12), upper, SCAN_POINTS)


def theta_star(gamma: float) -> tuple[float, float]:
    """Existence threshold ``3 max_{R > gamma} f(R)`` and the maximizing radius.

    Two stationary radii exist exactly when sigma_tilde/sigma_bar is below
    the returned value.
    """
    gamma = float(gamma)
    if not gamma > 0 or not math.isfinite(gamma):
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    grid = _scan_grid(gamma, _scan_upper(gamma))
    values = _f_array(gamma, grid)
    i = int(np.argmax(values))
    if i == 0 or i == len(grid) - 1:
        raise NumericalFailure(f"no interior maximum of f bracketed for gamma={gamma}")
    lo, hi = grid[i - 1], grid[i + 1]
    res = minimize_scalar(
        lambda R: -f_of_R(gamma, R), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13 * hi},
    )
    R_max = float(res.x)
    # Newton polish on f' = 0 using a centered difference of f'
    for _ in range(3):
        d1 = f_prime_of_R(gamma, R_max)
        step = 1e-6 * R_max
        d2 = (f_prime_of_R(gamma, R_max + step) - f_prime_of_R(gamma, R_max - step)) / (2 * step)
        if d2 >= 0:
            break
        candidate = R_max - d1 / d2
        if not lo <= candidate <= hi:
            break
        R_max = candidate
    return 3.0 * f_of_R(gamma, R_max), R_max


def make_state(params: ModelParams, R: float, branch: Branch | None = None) -> StationaryState:
    """Wrap a radius as a :class:`StationaryState`, inferring the branch from f'."""
    fv = f_of_R(params, R)
    fp = f_prime_of_R(params, R)
    if branch is None:
        branch = Branch.SMALLER if fp > 0 else Branch.LARGER
    return StationaryState(params=params, radius=float(R), branch=branch, f_value=fv, f_prime=fp)


def state_from_radius(
    R: float, sigma_bar: float, gamma: float, mu: float, p_bar: float = 0.0
) -> StationaryState:
    """Stationary state with prescribed radius; sigma_tilde = 3 sigma_bar f(R)."""
    R = _check_radius(R)
    if R <= gamma:
        raise DomainError(f"radius {R} must exceed gamma {gamma} for a positive sigma_tilde")
    sigma_tilde = 3.0 * sigma_bar * f_of_R(gamma, R)
    params = ModelParams(sigma_bar=sigma_bar, sigma_tilde=sigma_tilde, mu=mu, gamma=gamma, p_bar=p_bar)
    return make_state(params, R)


def _polish(gamma: float, level: float, R: float, lo: float, hi: float) -> float:
    fp = f_prime_of_R(gamma, R)
    if fp != 0.0:
        candidate = R - (f_of_R(gamma, R) - level) / fp
        if lo <= candidate <= hi and abs(f_of_R(gamma, candidate) - level) <= abs(f_of_R(gamma, R) - level):
            return candidate
    return R


def solve_stationary(params: ModelParams) -> list[StationaryState]:
    """All stationary radii for ``params``, ordered by size.

    Returns two states (smaller, larger) below the existence threshold, a
    single ``DEGENERATE`` state at the threshold and an empty list above it.
    """
    gamma = params.gamma
    level = params.theta / 3.0
    th_star, R_max = theta_star(gamma)
    if abs(params.theta - th_star) < DEGENERATE_TOL:
        return [make_state(params, R_max, Branch.DEGENERATE)]
    if params.theta > th_star:
        return []

    def g(R: float) -> float:
        return f_of_R(gamma, R) - level

    upper = _scan_upper(gamma, params.theta)
    left = _scan_grid(gamma, R_max)
    right = np.geomspace(R_max, upper, SCAN_POINTS)
    states = []
    for grid, branch in ((left, Branch.SMALLER), (right, Branch.LARGER)):
        values = _f_array(gamma, grid) - level
        sign_change = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)[0]
        if len(sign_change) == 0:
            raise NumericalFailure(f"{branch.value} root not bracketed for {params}")
        i = sign_change[0] if branch is Branch.SMALLER else sign_change[-1]
        lo, hi = float(grid[i]), float(grid[i + 1])
        R = brentq(g, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
        R = _polish(gamma, level, R, lo, hi)
        states.append(make_state(params, R, branch))
    return states


def _sinh_ratio(r: np.ndarray, R: float) -> np.ndarray:
    """R sinh(r) / (r sinh(R)), overflow-safe, with the r -> 0 limit."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r < _SINHC_SERIES_R
    rs = r[small]
    # sinh(r)/r = 1 + r^2/6 + r^4/120
    out[small] = (1.0 + rs * rs / 6.0 + rs**4 / 120.0) * R / math.sinh(R) if R < 700 else 0.0
    rl = r[~small]
    # sinh(r)/sinh(R) = exp(r - R) (1 - exp(-2r)) / (1 - exp(-2R))
    out[~small] = R / rl * np.exp(rl - R) * (-np.expm1(-2.0 * rl)) / (-math.expm1(-2.0 * R))
    return out


def _check_grid(grid, R: float) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-D array")
    tol = 1e-12 * R
    if grid.min() < 0.0 or grid.max() > R + tol:
        raise DomainError(f"grid must lie within [0, {R}]")
    return np.clip(grid, 0.0, R)


def sigma_profile(state: StationaryState, grid) -> RadialProfile:
    """Nutrient concentration of the stationary ball on ``grid``."""
    R = state.radius
    r = _check_grid(grid, R)
    values = state.boundary_nutrient * _sinh_ratio(r, R)
    return RadialProfile(grid=r, values=values, kind=ProfileKind.NUTRIENT, radius=R)


def pressure_profile(state: StationaryState, grid) -> RadialProfile:
    """Pressure of the stationary ball on ``grid``."""
    p = state.params
    R = state.radius
    r = _check_grid(grid, R)
    sb = state.boundary_nutrient
    values = (
        -p.mu * sb * _sinh_ratio(r, R)
        + p.mu * p.sigma_tilde * r * r / 6.0
        + p.p_bar
        + p.mu * sb
        - p.mu * p.sigma_tilde * R * R / 6.0
    )
    return RadialProfile(grid=r, values=values, kind=ProfileKind.PRESSURE, radius=R)


def sigma_prime_at_boundary(state: StationaryState) -> float:
    """d sigma_s / dr at r = R_s (equals sigma_tilde R_s / 3 at a root)."""
    R = state.radius
    return state.boundary_nutrient * (R / math.tanh(R) - 1.0) / R


def pressure_second_derivative_at_boundary(state: StationaryState) -> float:
    """d^2 p_s / dr^2 at r = R_s: -mu (sigma_bar (1 - gamma/R_s) - sigma_tilde)."""
    p = state.params
    return -p.mu * (state.boundary_nutrient - p.sigma_tilde)
