"""Self-contained special-function kernel.

Provides exactly the four ingredients the exponent formulas need:

* ``digamma`` -- psi(x) = (log Gamma(x))' for x > 0,
* ``expint_ei_neg`` -- the exponential integral Ei(-t) for t > 0,
* ``legendre_f`` / ``legendre_pi`` -- Legendre incomplete elliptic
  integrals of the first and third kind.

All functions are pure, deterministic and safe for concurrent use.  The
elliptic integrals are evaluated through Carlson symmetric forms R_F and
R_J with the duplication algorithm (Carlson, "Numerical computation of
real or complex elliptic integrals", Numer. Algorithms 10, 1995), which
gives uniform accuracy without case analysis on the amplitude; the
Legendre interface is a thin wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, EllipticPoleError

__all__ = [
    "EULER_GAMMA",
    "EllipticParams",
    "digamma",
    "expint_ei_neg",
    "legendre_f",
    "legendre_pi",
    "carlson_rc",
    "carlson_rf",
    "carlson_rj",
]

EULER_GAMMA = 0.5772156649015328606065120900824024

# ---------------------------------------------------------------------------
# digamma


# B_{2n}/(2n) for n = 1..8; coefficients of the asymptotic tail
# psi(z) ~ log z - 1/(2z) - sum_n B_{2n}/(2n) z^{-2n}.
_PSI_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)

_PSI_SHIFT = 8.0  # below this, recurrence-shift upward before the series

_SPLITTER = 134217729.0  # 2^27 + 1, Veltkamp split constant


def _two_product(a: float, b: float) -> tuple[float, float]:
    """Dekker exact product: returns (fl(a*b), a*b - fl(a*b))."""
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0.

    Uses the recurrence psi(x) = psi(x+1) - 1/x to shift the argument to
    x >= 8, then the Bernoulli asymptotic series.  Absolute error is a few
    ulp of the result over [1e-3, 1e6].
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    terms = []
    while x < _PSI_SHIFT:
        r = 1.0 / x
        p, perr = _two_product(r, x)
        terms.append(-r)
        # exact residual of the division, so shift terms enter fsum to ~eps^2
        terms.append(r * ((p - 1.0) + perr))
        x += 1.0
    u = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_PSI_TAIL):
        tail = tail * u + c
    terms.extend((math.log(x), -0.5 / x, -u * tail))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# exponential integral Ei(-t), t > 0

# Crossover between the power series and the continued fraction.  Chosen so
# that both branches agree to better than 1e-12 at the seam (the series loses
# roughly e^{2t} eps to cancellation, the fraction converges slowly for small
# t); agreement at the seam is asserted by the test suite.
_EI_SEAM = 4.0
_EI_CF_MAX_ITER = 300


def _ei_neg_series(t: float) -> float:
    """Ei(-t) = gamma + log t + sum_{k>=1} (-t)^k / (k k!)."""
    terms = [EULER_GAMMA, math.log(t)]
    p = 1.0
    k = 1
    while True:
        p *= -t / k
        term = p / k
        terms.append(term)
        if abs(term) < 1e-18 * (abs(terms[0]) + abs(terms[1]) + 1.0):
            break
        k += 1
        if k > 500:  # series is entire; cannot happen for t below the seam
            break
    return math.fsum(terms)


def _ei_neg_cf_scaled(t: float) -> float:
    """e^t Ei(-t) via the modified Lentz continued fraction for E_1."""
    tiny = 1e-300
    b = t + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _EI_CF_MAX_ITER + 1):
        a = -float(i * i)
        b += 2.0
        d = a * d + b
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return -h  # Ei(-t) = -e^{-t} h


def expint_ei_neg(t: float) -> float:
    """Exponential integral Ei(-t) = -int_t^inf e^{-u}/u du, for t > 0.

    Strictly negative; relative error <= 1e-12 over t in [1e-6, 700].
    """
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"expint_ei_neg requires t > 0, got {t!r}")
    if t < _EI_SEAM:
        return _ei_neg_series(t)
    return math.exp(-t) * _ei_neg_cf_scaled(t)


def expint_ei_neg_scaled(t: float) -> float:
    """e^t Ei(-t), computed without overflow for large t."""
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"expint_ei_neg_scaled requires t > 0, got {t!r}")
    if t < _EI_SEAM:
        return math.exp(t) * _ei_neg_series(t)
    return _ei_neg_cf_scaled(t)


# ---------------------------------------------------------------------------
# Carlson symmetric elliptic integrals

_CARLSON_MAX_ITER = 120


def carlson_rc(x: float, y: float) -> float:
    """Degenerate symmetric integral R_C(x, y) = R_F(x, y, y), x >= 0, y > 0."""
    if x < 0.0 or y <= 0.0:
        raise DomainError(f"carlson_rc requires x >= 0, y > 0, got ({x}, {y})")
    if x == y:
        return 1.0 / math.sqrt(x)
    w = (y - x) / max(x, y) if x > 0.0 else math.inf
    if x == 0.0:
        return 0.5 * math.pi / math.sqrt(y)
    if abs(w) < 1e-8:
        # R_C(x, x(1+e)) = x^{-1/2} (1 - e/3 + e^2/5 - ...)
        e = (y - x) / x
        return (1.0 - e / 3.0 + e * e / 5.0) / math.sqrt(x)
    if y > x:
        return math.atan(math.sqrt((y - x) / x)) / math.sqrt(y - x)
    return math.atanh(math.sqrt((x - y) / x)) / math.sqrt(x - y)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Symmetric integral R_F(x,y,z) = (1/2) int_0^inf dt / sqrt((t+x)(t+y)(t+z)).

    Arguments must be nonnegative with at most one of them zero.
    """
    if min(x, y, z) < 0.0 or (x + y) == 0.0 or (y + z) == 0.0 or (x + z) == 0.0:
        raise DomainError(f"carlson_rf domain violation: ({x}, {y}, {z})")
    a0 = (x + y + z) / 3.0
    q = (3e-17) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    xm, ym, zm, am = x, y, z, a0
    four_m = 1.0
    for _ in range(_CARLSON_MAX_ITER):
        if q / four_m <= abs(am):
            break
        sx, sy, sz = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm)
        lam = sx * sy + sy * sz + sz * sx
        xm = 0.25 * (xm + lam)
        ym = 0.25 * (ym + lam)
        zm = 0.25 * (zm + lam)
        am = 0.25 * (am + lam)
        four_m *= 4.0
    big_x = (a0 - x) / (four_m * am)
    big_y = (a0 - y) / (four_m * am)
    big_z = -big_x - big_y
    e2 = big_x * big_y - big_z * big_z
    e3 = big_x * big_y * big_z
    series = (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
        - 5.0 * e2 ** 3 / 208.0
        + 3.0 * e3 * e3 / 104.0
        + e2 * e2 * e3 / 16.0
    )
    return series / math.sqrt(am)


def carlson_rj(x: float, y: float, z: float, p: float) -> float:
    """Symmetric integral R_J = (3/2) int_0^inf dt / ((t+p) sqrt((t+x)(t+y)(t+z))).

    Requires x, y, z >= 0 (at most one zero) and p > 0.
    """
    if min(x, y, z) < 0.0 or p <= 0.0 or (x + y) == 0.0 or (y + z) == 0.0 or (x + z) == 0.0:
        raise DomainError(f"carlson_rj domain violation: ({x}, {y}, {z}, {p})")
    a0 = (x + y + z + 2.0 * p) / 5.0
    delta = (p - x) * (p - y) * (p - z)
    q = (0.25e-17) ** (-1.0 / 6.0) * max(
        abs(a0 - x), abs(a0 - y), abs(a0 - z), abs(a0 - p)
    )
    xm, ym, zm, pm, am = x, y, z, p, a0
    four_m = 1.0
    rc_sum = 0.0
    for _ in range(_CARLSON_MAX_ITER):
        if q / four_m <= abs(am):
            break
        sx, sy, sz, sp = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm), math.sqrt(pm)
        lam = sx * sy + sy * sz + sz * sx
        dm = (sp + sx) * (sp + sy) * (sp + sz)
        em = delta / (four_m ** 3 * dm * dm)
        rc_sum += carlson_rc(1.0, 1.0 + em) / (four_m * dm)
        xm = 0.25 * (xm + lam)
        ym = 0.25 * (ym + lam)
        zm = 0.25 * (zm + lam)
        pm = 0.25 * (pm + lam)
        am = 0.25 * (am + lam)
        four_m *= 4.0
    big_x = (a0 - x) / (four_m * am)
    big_y = (a0 - y) / (four_m * am)
    big_z = (a0 - z) / (four_m * am)
    big_p = -0.5 * (big_x + big_y + big_z)
    xyz = big_x * big_y * big_z
    e2 = big_x * big_y + big_x * big_z + big_y * big_z - 3.0 * big_p * big_p
    e3 = xyz + 2.0 * e2 * big_p + 4.0 * big_p ** 3
    e4 = (2.0 * xyz + e2 * big_p + 3.0 * big_p ** 3) * big_p
    e5 = xyz * big_p * big_p
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
        - e2 ** 3 / 16.0
        + 3.0 * e3 * e3 / 40.0
        + 3.0 * e2 * e4 / 20.0
        + 45.0 * e2 * e2 * e3 / 272.0
        - 9.0 * (e3 * e4 + e2 * e5) / 68.0
    )
    return series / (four_m * am * math.sqrt(am)) + 6.0 * rc_sum


# ---------------------------------------------------------------------------
# Legendre wrappers


@dataclass(frozen=True)
class EllipticParams:
    """Arguments of the Legendre incomplete integrals.

    amplitude_sin_sq: sin^2(phi), in [0, 1].
    modulus_sq: k^2.  May exceed 1 as long as k^2 sin^2(phi) < 1, which keeps
        the integrand real over the integration range.
    characteristic: n, for third-kind integrals; n sin^2(phi) < 1 is required
        there (checked at evaluation, not construction).
    """

    amplitude_sin_sq: float
    modulus_sq: float
    characteristic: float = 0.0

    def __post_init__(self):
        s2 = self.amplitude_sin_sq
        if not (math.isfinite(s2) and 0.0 <= s2 <= 1.0):
            raise DomainError(f"amplitude_sin_sq must lie in [0, 1], got {s2!r}")
        if not math.isfinite(self.modulus_sq):
            raise DomainError(f"modulus_sq must be finite, got {self.modulus_sq!r}")
        if not math.isfinite(self.characteristic):
            raise DomainError(
                f"characteristic must be finite, got {self.characteristic!r}"
            )
        if self.modulus_sq * s2 >= 1.0:
            raise DomainError(
                f"singular integrand: modulus_sq * amplitude_sin_sq = "
                f"{self.modulus_sq * s2} >= 1"
            )


def legendre_f(p: EllipticParams) -> float:
    """F(phi, k^2) = int_0^{sin phi} dt / sqrt((1-t^2)(1-k^2 t^2))."""
    s2 = p.amplitude_sin_sq
    if s2 == 0.0:
        return 0.0
    s = math.sqrt(s2)
    return s * carlson_rf(1.0 - s2, 1.0 - p.modulus_sq * s2, 1.0)


def legendre_pi(p: EllipticParams) -> float:
    """Pi(phi, n, k^2) = int_0^{sin phi} dt / ((1 - n t^2) sqrt((1-t^2)(1-k^2 t^2)))."""
    s2 = p.amplitude_sin_sq
    n = p.characteristic
    if n * s2 >= 1.0:
        raise EllipticPoleError(
            f"third-kind pole: characteristic * amplitude_sin_sq = {n * s2} >= 1"
        )
    if s2 == 0.0:
        return 0.0
    if n == 0.0:
        return legendre_f(p)
    s = math.sqrt(s2)
    c2 = 1.0 - s2
    y_arg = 1.0 - p.modulus_sq * s2
    return s * carlson_rf(c2, y_arg, 1.0) + (n / 3.0) * s * s2 * carlson_rj(
        c2, y_arg, 1.0, 1.0 - n * s2
    )
