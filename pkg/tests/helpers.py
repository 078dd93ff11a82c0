"""Brute-force oracles shared by the tests.

Deliberately independent of the package's Gauss-Kronrod engine: a classic
recursive adaptive Simpson rule, plus a 60-digit decimal evaluation of the
exponentially ill-conditioned closed form for the spike correction f_d.
"""

import decimal
import math

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=60):
    """Adaptive Simpson quadrature with Richardson correction."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(
            m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    return rec(a, b, fa, fm, fb, whole, tol, max_depth)


def fd_closed_form_decimal(theta: float, d: int) -> float:
    """f_d = (theta/(theta-1))^{d-1} (log theta - sum_{k=1}^{d-1} (1/k)(1-1/theta)^k).

    The prefactor grows geometrically while the bracket cancels to the same
    order, so double precision loses everything already around d = 30;
    evaluated with 60 decimal digits instead.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        th = decimal.Decimal(theta)
        one = decimal.Decimal(1)
        s = one - one / th
        bracket = th.ln()
        for k in range(1, d):
            bracket -= (s ** k) / k
        return float((th / (th - one)) ** (d - 1) * bracket)


def draw_y(rng: np.random.Generator, d: int, lo=0.5, hi=8.0, gap=0.4) -> np.ndarray:
    """Sorted inverse eigenvalues with a minimum pairwise spacing."""
    while True:
        y = np.sort(rng.uniform(lo, hi, size=d))
        if d == 1 or float(np.min(np.diff(y))) >= gap:
            return y
