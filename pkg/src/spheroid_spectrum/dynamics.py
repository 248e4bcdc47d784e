"""Time evolution near the stationary balls.

The radius of a radially symmetric tumor obeys the scalar ODE

    dR/dt = mu R (sigma_bar f(R) - sigma_tilde / 3),

obtained by solving the nutrient and pressure problems on the ball and
taking the normal velocity -p'(R).  Non-radial perturbations are followed
through the linearized mode system, which is diagonal and solved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, InsufficientSignalError, NumericalFailure
from .spectrum import compute_spectrum
from .stationary import ModelParams, StationaryState, f_of_R

EXTINCTION_RADIUS = 1e-6
BLOWUP_RADIUS = 1e3
RADIAL_RTOL = 1e-10
RADIAL_NOISE_FACTOR = 100.0
NOISE_FLOOR = 1e-13
MIN_TAIL_SAMPLES = 10


@dataclass
class SimulationTrace:
    """Sampled trajectory.

    ``values`` has shape ``(n_times,)`` for the radius, or
    ``(n_times, n_modes)`` for mode amplitudes.  ``deviation`` is the
    distance to the limiting state used by the rate fit.
    """

    times: np.ndarray
    values: np.ndarray
    deviation: np.ndarray
    fitted_rate: float | None = None
    metadata: dict = field(default_factory=dict)


def radial_rhs(params: ModelParams, R: float) -> float:
    """dR/dt for a radially symmetric tumor of radius R."""
    if not R > 0:
        raise DomainError(f"radius must be positive, got {R!r}")
    return params.mu * R * (params.sigma_bar * f_of_R(params, R) - params.sigma_tilde / 3.0)


def integrate_radial(
    params: ModelParams,
    R0: float,
    t_end: float,
    dt_init: float = 1e-3,
    n_samples: int = 2001,
    equilibrium: float | None = None,
) -> SimulationTrace:
    """Integrate the radial ODE with an adaptive Dormand--Prince 8(5,3) scheme.

    Stops early when R falls below 1e-6 (extinction) or exceeds 1e3.  When
    ``equilibrium`` is given the trace is fitted for its approach rate.
    """
    if not R0 > 0:
        raise DomainError(f"R0 must be positive, got {R0!r}")
    if not t_end > 0 or not dt_init > 0:
        raise DomainError("t_end and dt_init must be positive")

    def rhs(t, y):
        return [radial_rhs(params, max(y[0], 1e-300))]

    def extinct(t, y):
        return y[0] - EXTINCTION_RADIUS

    def blowup(t, y):
        return y[0] - BLOWUP_RADIUS

    extinct.terminal = True
    blowup.terminal = True
    t_eval = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(
        rhs, (0.0, t_end), [R0], method="DOP853", t_eval=t_eval, first_step=min(dt_init, t_end),
        rtol=RADIAL_RTOL, atol=1e-14, events=(extinct, blowup),
    )
    if sol.status == -1:
        raise NumericalFailure(f"radial integration failed: {sol.message}")
    times = sol.t
    radii = sol.y[0]
    if sol.status == 1:
        # t_eval omits the terminal point; keep it so the trace ends at the event
        hit = next(i for i, te in enumerate(sol.t_events) if len(te))
        times = np.append(times, sol.t_events[hit][0])
        radii = np.append(radii, sol.y_events[hit][0][0])
    meta = {
        "mode": "radial",
        "params": params.to_dict(),
        "R0": R0,
        "t_end": t_end,
        "extinct": bool(len(sol.t_events[0])),
        "blowup": bool(len(sol.t_events[1])),
        "equilibrium": equilibrium,
        # integrator error in R limits how small a deviation is meaningful
        "noise_floor": RADIAL_NOISE_FACTOR * RADIAL_RTOL * abs(equilibrium or R0),
    }
    limit = equilibrium if equilibrium is not None else float("nan")
    trace = SimulationTrace(times=times, values=radii, deviation=np.abs(radii - limit), metadata=meta)
    if equilibrium is not None:
        trace.fitted_rate = _fit_if_monotone(trace)
    return trace


def integrate_linear_modes(
    state: StationaryState,
    initial_amplitudes,
    t_end: float,
    n_samples: int = 2001,
    lambdas: np.ndarray | None = None,
) -> SimulationTrace:
    """Exact evolution ``c_k(t) = c_k(0) exp(-Lambda_k t)`` of mode amplitudes.

    ``initial_amplitudes[k]`` is the degree-k amplitude for k = 0..k_max.
    The deviation is ``sum_{k != 1} |c_k(t)|``: the degree-1 amplitude is a
    rigid translation and does not decay.
    """
    c0 = np.asarray(initial_amplitudes, dtype=float)
    if c0.ndim != 1 or not np.all(np.isfinite(c0)):
        raise DomainError("initial amplitudes must be a finite 1-D array")
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    k_max = max(len(c0) - 1, 2)
    if lambdas is None:
        lambdas = compute_spectrum(state, k_max).lambdas
    lam = np.asarray(lambdas, dtype=float)[: len(c0)].copy()
    if len(c0) > 1:
        lam[1] = 0.0  # translation mode
    times = np.linspace(0.0, t_end, n_samples)
    amplitudes = c0[None, :] * np.exp(-np.outer(times, lam))
    mask = np.ones(len(c0), dtype=bool)
    if len(c0) > 1:
        mask[1] = False
    deviation = np.sum(np.abs(amplitudes[:, mask]), axis=1)
    excited = [int(k) for k in np.nonzero(mask & (c0 != 0.0))[0]]
    meta = {
        "mode": "linear-modes",
        "params": state.params.to_dict(),
        "radius": state.radius,
        "branch": state.branch.value,
        "t_end": t_end,
        "excited_modes": excited,
        "lambdas": {int(k): float(lam[k]) for k in excited},
        "spectral_gap": spectral_gap(lam, c0),
    }
    trace = SimulationTrace(times=times, values=amplitudes, deviation=deviation, metadata=meta)
    trace.fitted_rate = _fit_if_monotone(trace)
    return trace


def _fit_if_monotone(trace: SimulationTrace, tail_fraction: float = 0.3) -> float | None:
    if not tail_is_monotone(trace, tail_fraction):
        return None
    try:
        return fit_decay_rate(trace, tail_fraction)
    except InsufficientSignalError:
        return None


def spectral_gap(lambdas, amplitudes) -> float | None:
    """Smallest positive Lambda_k among excited modes other than k = 1."""
    lam = np.asarray(lambdas, dtype=float)
    c = np.asarray(amplitudes, dtype=float)
    rates = [lam[k] for k in range(len(c)) if k != 1 and c[k] != 0.0 and lam[k] > 0]
    return float(min(rates)) if rates else None


def dominant_rate(lambdas, amplitudes) -> float | None:
    """Rate that governs the late-time deviation: min Lambda_k over excited k != 1."""
    lam = np.asarray(lambdas, dtype=float)
    c = np.asarray(amplitudes, dtype=float)
    rates = [lam[k] for k in range(len(c)) if k != 1 and c[k] != 0.0]
    return float(min(rates)) if rates else None


def fit_decay_rate(trace: SimulationTrace, tail_fraction: float = 0.3) -> float:
    """Exponential rate of the deviation over the last ``tail_fraction`` of the run.

    Least-squares slope of log(deviation) against time, with the sign chosen
    so that decay gives a positive rate and growth a negative one.  Samples
    below ``1e-13`` times the largest deviation, or below
    ``trace.metadata["noise_floor"]`` when present, are treated as noise.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise DomainError("tail_fraction must lie in (0, 1)")
    t = np.asarray(trace.times, dtype=float)
    dev = np.asarray(trace.deviation, dtype=float)
    if not np.all(np.isfinite(dev)):
        raise InsufficientSignalError("deviation is not finite (unknown limit?)")
    scale = float(np.max(dev)) if dev.size else 0.0
    if scale <= 0.0:
        raise InsufficientSignalError("zero deviation from the limit")
    floor = max(NOISE_FLOOR * scale, float(trace.metadata.get("noise_floor", 0.0)))
    start = t[0] + (1.0 - tail_fraction) * (t[-1] - t[0])
    tail = (t >= start) & (dev > floor)
    if np.count_nonzero(tail) < MIN_TAIL_SAMPLES:
        raise InsufficientSignalError(
            f"only {np.count_nonzero(tail)} tail samples above the noise floor"
        )
    tt = t[tail]
    log_dev = np.log(dev[tail])
    slope = np.polyfit(tt - tt.mean(), log_dev, 1)[0]
    return float(-slope)


def tail_is_monotone(trace: SimulationTrace, tail_fraction: float = 0.3) -> bool:
    """True if log-deviation is monotone over the tail and spans a decade."""
    t = np.asarray(trace.times)
    dev = np.asarray(trace.deviation)
    floor = float(trace.metadata.get("noise_floor", 0.0))
    start = t[0] + (1.0 - tail_fraction) * (t[-1] - t[0])
    d = dev[t >= start]
    if d.size < 2 or np.any(d <= floor):
        return False
    steps = np.diff(np.log(d))
    monotone = bool(np.all(steps <= 0) or np.all(steps >= 0))
    return monotone and abs(math.log10(d[-1] / d[0])) >= 1.0
