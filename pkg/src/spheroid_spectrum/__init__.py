"""Stationary radii, linearized spectrum and stability thresholds of the
tumor-spheroid free-boundary model with a Gibbs--Thomson boundary condition."""

from .errors import DomainError, InsufficientSignalError, NumericalFailure
from .special import bessel_half, bessel_half_scaled, bessel_ratio, bessel_ratios, legendre
from .stationary import (
    Branch,
    ModelParams,
    RadialProfile,
    StationaryState,
    f_of_R,
    f_prime_of_R,
    pressure_profile,
    sigma_profile,
    solve_stationary,
    state_from_radius,
    theta_star,
)
from .spectrum import (
    ModeSpectrum,
    Stability,
    classify,
    coefficients,
    compute_spectrum,
    gamma_thresholds,
    h_j_of_k,
    lambda_k_direct,
    lambda_k_hj,
    linearized_curvature,
)
from .oracle import curvature_axisymmetric, mode_profiles_closed_form, solve_mode_bvp
from .dynamics import (
    SimulationTrace,
    fit_decay_rate,
    integrate_linear_modes,
    integrate_radial,
    radial_rhs,
)

__version__ = "0.1.0"
