import math

import numpy as np
import pytest

from gausslyap.errors import DomainError, EllipticPoleError
from gausslyap.specfn import (
    EULER_GAMMA,
    EllipticParams,
    _ei_neg_cf_scaled,
    _ei_neg_series,
    _EI_SEAM,
    carlson_rc,
    carlson_rf,
    carlson_rj,
    digamma,
    expint_ei_neg,
    expint_ei_neg_scaled,
    legendre_f,
    legendre_pi,
)

from helpers import adaptive_simpson


class TestDigamma:
    def test_integer_values(self):
        # psi(n) = H_{n-1} - gamma
        for n in range(1, 21):
            expected = math.fsum(1.0 / k for k in range(1, n)) - EULER_GAMMA
            assert digamma(float(n)) == pytest.approx(expected, abs=1e-13)

    def test_half_integer_values(self):
        # psi(n + 1/2) = sum_{k=1}^{n} 1/(k - 1/2) - 2 log 2 - gamma
        for n in range(0, 12):
            expected = (
                math.fsum(1.0 / (k - 0.5) for k in range(1, n + 1))
                - 2.0 * math.log(2.0)
                - EULER_GAMMA
            )
            assert digamma(n + 0.5) == pytest.approx(expected, abs=1e-13)

    def test_recurrence(self):
        rng = np.random.default_rng(42)
        xs = [0.1, 0.5, 1.0, 3.7, 100.0] + list(rng.uniform(1e-4, 1e4, size=1000))
        for x in xs:
            assert abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-12

    def test_asymptotic(self):
        for x in (10.0, 17.3, 50.0, 400.0, 1e5):
            assert abs(digamma(x) - (math.log(x) - 0.5 / x)) <= 1.0 / (6.0 * x * x)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan, math.inf])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            digamma(bad)


class TestExpint:
    def test_reference_values(self):
        def oracle(t):
            # Ei(-t) = -int_t^inf e^{-u}/u du, truncated where e^{-u} is negligible
            return -adaptive_simpson(lambda u: math.exp(-u) / u, t, t + 60.0, tol=1e-14)

        assert expint_ei_neg(1.0) == pytest.approx(oracle(1.0), rel=1e-11)
        assert expint_ei_neg(1.0) == pytest.approx(-0.2193839, abs=1e-7)
        assert expint_ei_neg(10.0) == pytest.approx(oracle(10.0), rel=1e-11)
        assert expint_ei_neg(10.0) == pytest.approx(-4.1570e-06, abs=1e-10)

    def test_against_quadrature_oracle(self):
        rng = np.random.default_rng(7)
        ts = np.concatenate([[0.1, 1.0, 5.0, 50.0], rng.uniform(0.1, 50.0, size=50)])
        for t in ts:
            ref = -adaptive_simpson(lambda u: math.exp(-u) / u, t, t + 60.0, tol=1e-15)
            assert expint_ei_neg(float(t)) == pytest.approx(ref, rel=1e-10)

    def test_asymptotic_envelope(self):
        # |Ei(-t) + e^{-t}/t (1 - 1/t)| <= 2 e^{-t}/t^3 for large t
        for t in (50.0, 80.0, 120.0, 300.0, 600.0):
            lhs = abs(expint_ei_neg(t) + math.exp(-t) / t * (1.0 - 1.0 / t))
            assert lhs <= 2.0 * math.exp(-t) / t ** 3

    def test_derivative(self):
        # d/dt Ei(-t) = e^{-t}/t
        rng = np.random.default_rng(3)
        for t in rng.uniform(0.1, 20.0, size=100):
            h = 1e-5 * t
            fd = (expint_ei_neg(t + h) - expint_ei_neg(t - h)) / (2.0 * h)
            exact = math.exp(-t) / t
            assert fd == pytest.approx(exact, rel=1e-6)

    def test_strictly_negative_and_finite(self):
        for t in np.logspace(-6, math.log10(700.0), 200):
            v = expint_ei_neg(float(t))
            assert v < 0.0 and math.isfinite(v)

    def test_seam_agreement(self):
        t = _EI_SEAM
        series = _ei_neg_series(t)
        cf = math.exp(-t) * _ei_neg_cf_scaled(t)
        assert abs(series - cf) <= 1e-12 * abs(series)

    def test_scaled_variant(self):
        for t in (0.5, 3.0, 30.0, 300.0):
            assert expint_ei_neg_scaled(t) == pytest.approx(
                expint_ei_neg(t) * math.exp(t), rel=1e-12
            )
        # stays finite and negative far beyond where e^t overflows
        for t in (800.0, 5e4):
            v = expint_ei_neg_scaled(t)
            assert -1.0 < v < 0.0

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            expint_ei_neg(bad)


class TestCarlson:
    def test_spot_values(self):
        assert carlson_rf(1.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
        assert carlson_rf(0.0, 1.0, 2.0) == pytest.approx(1.3110287771460599, rel=1e-14)
        assert carlson_rc(1.0, 2.0) == pytest.approx(math.pi / 4.0, rel=1e-14)
        assert carlson_rj(2.0, 2.0, 2.0, 2.0) == pytest.approx(2.0 ** -1.5, rel=1e-14)

    def test_rf_defining_integral(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x, y, z = rng.uniform(0.2, 5.0, size=3)

            def f(t):
                return 0.5 / math.sqrt((t + x) * (t + y) * (t + z))

            ref = adaptive_simpson(f, 0.0, 1e6, tol=1e-13) + 1.0 / math.sqrt(1e6)
            # tail: int_X^inf t^{-3/2}/2 dt = X^{-1/2}
            assert carlson_rf(x, y, z) == pytest.approx(ref, rel=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            carlson_rf(-1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            carlson_rj(1.0, 1.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            carlson_rc(1.0, 0.0)


def _legendre_f_oracle(s, k2, tol=1e-13):
    return adaptive_simpson(
        lambda t: 1.0 / math.sqrt((1.0 - t * t) * (1.0 - k2 * t * t)), 0.0, s, tol=tol
    )


def _legendre_pi_oracle(s, n, k2, tol=1e-13):
    return adaptive_simpson(
        lambda t: 1.0
        / ((1.0 - n * t * t) * math.sqrt((1.0 - t * t) * (1.0 - k2 * t * t))),
        0.0,
        s,
        tol=tol,
    )


class TestLegendre:
    def test_trivial_cases(self):
        assert legendre_f(EllipticParams(0.0, 0.7)) == 0.0
        assert legendre_pi(EllipticParams(0.0, 0.7, 0.3)) == 0.0
        for s in (0.1, 0.5, 0.9):
            p = EllipticParams(s * s, 0.0)
            assert legendre_f(p) == pytest.approx(math.asin(s), rel=1e-14)

    def test_first_kind_against_integral(self):
        rng = np.random.default_rng(11)
        # includes moduli with k^2 > 1, where only k^2 sin^2 phi < 1 is required
        cases = [(0.5, 0.5), (0.4, 2.0), (0.25, 3.5), (0.8, -1.5)]
        for _ in range(20):
            s2 = rng.uniform(0.05, 0.95)
            k2 = rng.uniform(-2.0, 0.95 / s2)
            cases.append((s2, k2))
        for s2, k2 in cases:
            p = EllipticParams(s2, k2)
            ref = _legendre_f_oracle(math.sqrt(s2), k2)
            assert legendre_f(p) == pytest.approx(ref, rel=1e-10)

    def test_third_kind_against_integral(self):
        rng = np.random.default_rng(13)
        cases = [(0.4, 0.6, 0.3)]
        for _ in range(20):
            s2 = rng.uniform(0.05, 0.9)
            k2 = rng.uniform(-1.5, 0.9 / s2)
            n = rng.uniform(-2.0, 0.9 / s2)
            cases.append((s2, k2, n))
        for s2, k2, n in cases:
            p = EllipticParams(s2, k2, n)
            ref = _legendre_pi_oracle(math.sqrt(s2), n, k2)
            assert legendre_pi(p) == pytest.approx(ref, rel=1e-10)

    def test_pi_reduces_to_f_at_zero_characteristic(self):
        for s2 in np.linspace(0.0, 0.95, 20):
            for k2 in np.linspace(-1.0, 0.9, 20):
                if k2 * s2 >= 1.0:
                    continue
                p0 = EllipticParams(float(s2), float(k2), 0.0)
                assert legendre_pi(p0) == pytest.approx(
                    legendre_f(EllipticParams(float(s2), float(k2))), abs=1e-12
                )

    def test_invariant_violations(self):
        with pytest.raises(DomainError):
            EllipticParams(-0.1, 0.5)
        with pytest.raises(DomainError):
            EllipticParams(1.2, 0.5)
        with pytest.raises(DomainError):
            EllipticParams(0.9, 1.2)  # k^2 s^2 >= 1
        with pytest.raises(EllipticPoleError):
            legendre_pi(EllipticParams(0.9, 0.5, 1.2))  # n s^2 >= 1
