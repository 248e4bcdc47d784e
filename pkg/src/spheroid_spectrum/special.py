"""Modified Bessel functions of half-integer order and Legendre polynomials.

Only real, positive arguments and non-negative orders are supported.  The
values ``I_{m+1/2}(r)`` are summed from the power series for moderate
arguments; for large arguments the closed form of ``I_{1/2}`` is combined
with a downward recurrence of ratios seeded by a continued fraction, all in
log space so nothing overflows before the final exponentiation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericalFailure

SERIES_RTOL = 1e-18
SERIES_MAX_TERMS = 500
SERIES_MAX_ARG = 50.0

_CF_RTOL = 1e-16
_CF_TINY = 1e-300


def _check_arg(r: float) -> float:
    r = float(r)
    if not r > 0.0 or not math.isfinite(r):
        raise DomainError(f"argument must be a positive finite real, got {r!r}")
    return r


def _check_order(m: int) -> int:
    if int(m) != m or m < 0:
        raise DomainError(f"order index must be a non-negative integer, got {m!r}")
    return int(m)


def _log_series(m: int, r: float) -> float:
    """log I_{m+1/2}(r) from the ascending series."""
    nu = m + 0.5
    q = 0.25 * r * r
    term = 1.0
    total = 1.0
    for k in range(SERIES_MAX_TERMS):
        term *= q / ((k + 1) * (nu + k + 1))
        total += term
        if term < SERIES_RTOL * total:
            break
    else:
        raise NumericalFailure(f"Bessel series did not converge for m={m}, r={r}")
    return nu * math.log(0.5 * r) - math.lgamma(nu + 1.0) + math.log(total)


def _log_i_half(r: float) -> float:
    # log(sqrt(2/(pi r)) sinh r), written to stay finite for large r
    return 0.5 * math.log(2.0 / (math.pi * r)) + r + math.log1p(-math.exp(-2.0 * r)) - math.log(2.0)


def log_bessel_half(m: int, r: float) -> float:
    """Natural log of ``I_{m+1/2}(r)``."""
    m = _check_order(m)
    r = _check_arg(r)
    if r <= SERIES_MAX_ARG:
        return _log_series(m, r)
    if m == 0:
        return _log_i_half(r)
    ratios = bessel_ratios(m - 1, r)
    return _log_i_half(r) + float(np.sum(np.log(ratios)))


def bessel_half(m: int, r: float) -> float:
    """``I_{m+1/2}(r)``; ``inf`` when the value exceeds the double range."""
    log_value = log_bessel_half(m, r)
    if log_value > 709.78:
        return math.inf
    return math.exp(log_value)


def bessel_half_scaled(m: int, r: float) -> float:
    """``exp(-r) * I_{m+1/2}(r)``, representable for all large ``r``."""
    r = _check_arg(r)
    return math.exp(log_bessel_half(m, r) - r)


def _ratio_cf(k: int, r: float) -> float:
    """I_{k+3/2}(r) / I_{k+1/2}(r) by the modified Lentz algorithm.

    Continued fraction: r / (2nu+2 + r^2 / (2nu+4 + r^2 / (...))), nu = k+1/2.
    """
    nu = k + 0.5
    inv_r = 1.0 / r
    # equivalent form 1 / (b1 + 1/(b2 + 1/(b3 + ...))) with b_j = 2(nu+j)/r
    b = 2.0 * (nu + 1.0) * inv_r
    f = b
    c = b
    d = 0.0
    max_iter = 100_000 + int(10 * r)
    for j in range(2, max_iter):
        b = 2.0 * (nu + j) * inv_r
        d = b + d
        if d == 0.0:
            d = _CF_TINY
        c = b + 1.0 / c
        if c == 0.0:
            c = _CF_TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_RTOL:
            return 1.0 / f
    raise NumericalFailure(f"continued fraction did not converge for k={k}, r={r}")


def bessel_ratios(k_max: int, r: float) -> np.ndarray:
    """Ratios ``I_{k+3/2}(r)/I_{k+1/2}(r)`` for ``k = 0..k_max``.

    The top ratio comes from the continued fraction; the rest follow by the
    downward recurrence ``q_{k-1} = 1 / ((2k+1)/r + q_k)``, which is stable.
    """
    k_max = _check_order(k_max)
    r = _check_arg(r)
    out = np.empty(k_max + 1)
    q = _ratio_cf(k_max, r)
    out[k_max] = q
    for k in range(k_max, 0, -1):
        q = 1.0 / ((2 * k + 1) / r + q)
        out[k - 1] = q
    return out


def bessel_ratio(k: int, r: float) -> float:
    """``I_{k+3/2}(r) / I_{k+1/2}(r)``, accurate for large order and argument."""
    k = _check_order(k)
    r = _check_arg(r)
    return _ratio_cf(k, r)


def legendre(k: int, x: float) -> float:
    """Legendre polynomial ``P_k(x)`` on ``[-1, 1]``."""
    return float(legendre_with_derivatives(k, x)[0])


def legendre_with_derivatives(k: int, x: float) -> tuple[float, float, float]:
    """``(P_k(x), P_k'(x), P_k''(x))`` from three-term recurrences.

    Derivatives use ``P'_{n+1} = P'_{n-1} + (2n+1) P_n`` (and the same for
    the second derivative), which holds at the endpoints as well.
    """
    k = _check_order(k)
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [-1, 1], got {x!r}")
    p_prev, p = 1.0, x
    d_prev, d = 0.0, 1.0
    s_prev, s = 0.0, 0.0
    if k == 0:
        return 1.0, 0.0, 0.0
    for n in range(1, k):
        p_next = ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
        d_next = d_prev + (2 * n + 1) * p
        s_next = s_prev + (2 * n + 1) * d
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        s_prev, s = s, s_next
    return p, d, s
