"""Large-dimension behavior: single-spike expansions and the free limit.

Spike model: covariance eigenvalues (1, ..., 1, theta) with theta > 1 and
t = d/theta held fixed as d grows.  For complex matrices the exact value is

    2 mu_1 = psi(d) + f_d,      f_d = (theta - 1) int_0^inf dx / ((1+x)^d (1 + theta x)),

and f_d obeys the one-step recursion f_d = s (1/d + f_{d+1}) with
s = (theta-1)/theta and f_1 = log(theta), giving the convergent series
f_d = sum_{k>=0} s^{k+1} / (d + k) used here.  The d -> infinity expansions
are

    complex:  2 mu_1 = log d - e^t Ei(-t) + O_t(1/d)
    real:     2 mu_1 = log d + e^{t/2} int_1^inf e^{-t x/2} dx / (sqrt(x)(sqrt(x)+1))
                       + O_t(1/d).

Free-probability limit: if the covariance eigenvalues are theta_i / d with
theta_i in [1, L] and (1/d) sum theta_i -> lambda, then mu_1 -> (1/2) log(lambda).
A spike breaks this (its contribution survives at order 1/d in 2 mu_1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import QuadConfig, adaptive_quadrature, largest_exponent
from .specfn import digamma, expint_ei_neg_scaled
from .spectrum import Beta, Spectrum, make_spectrum

__all__ = [
    "SpikeAsymptotics",
    "spike_asymptotics",
    "spike_complex_asymptotic",
    "spike_tail_integral",
    "spike_real_asymptotic",
    "f_d_series",
    "spike_exact_complex",
    "free_limit",
    "free_limit_error",
]


def _check_spike_args(d: int, t: float) -> None:
    if not isinstance(d, int) or d < 2:
        raise DomainError(f"spike asymptotics need integer d >= 2, got {d!r}")
    if not (math.isfinite(t) and 0.0 < t < d):
        raise DomainError(f"scaled spike parameter must satisfy 0 < t < d, got {t!r}")


def spike_tail_integral(beta: Beta | int, t: float) -> float:
    """The dimension-free part of the spike expansion of 2 mu_1.

    beta = 2:  e^t int_1^inf e^{-t x} dx/x  =  -e^t Ei(-t)
    beta = 1:  e^{t/2} int_1^inf e^{-t x/2} dx / (sqrt(x)(sqrt(x)+1)).

    The real case substitutes u = sqrt(x), which removes the sqrt-structure
    at the endpoint, and folds the exponential prefactor into the integrand
    (2 e^{t(1-u^2)/2}/(1+u)) so nothing overflows for large t; truncation is
    where the Gaussian tail drops below 1e-18 of the total.
    """
    beta = Beta(int(beta))
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"scaled spike parameter must be positive, got {t!r}")
    if beta == Beta.COMPLEX:
        return -expint_ei_neg_scaled(t)
    if beta != Beta.REAL:
        raise DomainError("spike expansions exist for beta = 1 and beta = 2 only")

    def g(u):
        u = np.asarray(u, dtype=float)
        return 2.0 * np.exp(0.5 * t * (1.0 - u * u)) / (1.0 + u)

    u_max = math.sqrt(1.0 + 90.0 / t)
    value, _ = adaptive_quadrature(
        g, 1.0, u_max, rel_tol=1e-12, abs_tol=1e-15,
        max_subdivisions=2000, initial_intervals=8,
    )
    return value


def spike_complex_asymptotic(d: int, t: float) -> float:
    """2 mu_1 approximation for the complex spike model: log d - e^t Ei(-t)."""
    _check_spike_args(d, t)
    return math.log(d) + spike_tail_integral(Beta.COMPLEX, t)


def spike_real_asymptotic(d: int, t: float) -> float:
    """2 mu_1 approximation for the real spike model:
    log d + e^{t/2} int_1^inf e^{-t x/2} dx / (sqrt(x)(sqrt(x)+1))."""
    _check_spike_args(d, t)
    return math.log(d) + spike_tail_integral(Beta.REAL, t)


@dataclass(frozen=True)
class SpikeAsymptotics:
    """A spike-model expansion value (of 2 mu_1) with its O_t(1/d) remainder tag."""

    d: int
    t: float
    value_2mu1: float
    remainder_order: str = "O_t(1/d)"


def spike_asymptotics(beta: Beta | int, d: int, t: float) -> SpikeAsymptotics:
    beta = Beta(int(beta))
    if beta == Beta.COMPLEX:
        value = spike_complex_asymptotic(d, t)
    elif beta == Beta.REAL:
        value = spike_real_asymptotic(d, t)
    else:
        raise DomainError("spike expansions exist for beta = 1 and beta = 2 only")
    return SpikeAsymptotics(d=d, t=t, value_2mu1=value)


def f_d_series(theta: float, d: int) -> float:
    """Spike correction f_d = sum_{k>=0} s^{k+1}/(d+k), s = (theta-1)/theta.

    All terms are positive; truncated at relative 1e-16.  Satisfies
    0 < f_d <= (theta-1)/d.
    """
    if not (math.isfinite(theta) and theta > 1.0):
        raise DomainError(f"spike correction needs theta > 1, got {theta!r}")
    if not isinstance(d, int) or d < 1:
        raise DomainError(f"spike correction needs integer d >= 1, got {d!r}")
    s = (theta - 1.0) / theta
    power = s
    total = 0.0
    k = 0
    while True:
        term = power / (d + k)
        total += term
        if term < 1e-16 * total:
            break
        power *= s
        k += 1
    return total


def spike_exact_complex(theta: float, d: int) -> float:
    """Exact 2 mu_1 for the complex spike model: psi(d) + f_d."""
    if not isinstance(d, int) or d < 2:
        raise DomainError(f"complex spike model needs integer d >= 2, got {d!r}")
    return digamma(float(d)) + f_d_series(theta, d)


def free_limit(lam: float) -> float:
    """Free-probability prediction for the largest exponent: (1/2) log(lambda)."""
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"free limit needs lambda > 0, got {lam!r}")
    return 0.5 * math.log(lam)


def free_limit_error(beta: Beta | int, theta_list, cfg: QuadConfig | None = None) -> float:
    """mu_1(exact quadrature) minus the free prediction, at finite dimension.

    ``theta_list`` is the bounded eigenvalue profile: the covariance spectrum
    is sigma_i^2 = theta_i / d with theta_i >= 1, and the prediction uses the
    finite-d mean, (1/2) log((1/d) sum theta_i).
    """
    thetas = [float(v) for v in theta_list]
    d = len(thetas)
    if d == 0:
        raise DomainError("free_limit_error needs a nonempty eigenvalue profile")
    for i, v in enumerate(thetas):
        if not (math.isfinite(v) and v >= 1.0):
            raise DomainError(f"theta[{i}] must satisfy 1 <= theta < inf, got {v!r}")
    s = make_spectrum([v / d for v in thetas])
    exact = largest_exponent(Beta(int(beta)), s, cfg)
    return exact.value - free_limit(math.fsum(thetas) / d)
