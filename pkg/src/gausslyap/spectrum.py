"""Covariance spectrum and ensemble parameters shared by every other module.

Products under study are P_n = A_n ... A_1 with A_i = Sigma^{1/2} G_i, where
G_i has i.i.d. real / complex / quaternion Gaussian entries (Dyson index
beta = 1, 2, 4) whose real components have variance 1/beta.  Every formula
depends on Sigma only through its eigenvalues sigma_i^2, so that is all a
:class:`Spectrum` stores; their inverses y_i = 1/sigma_i^2 are the natural
variable of most closed forms and are derived, never supplied.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .errors import InvalidSpectrumError

__all__ = [
    "Beta",
    "Spectrum",
    "SpikeModel",
    "make_spectrum",
    "spike_spectrum",
    "min_gap",
    "spectrum_to_json",
    "spectrum_from_json",
]


class Beta(enum.IntEnum):
    """Dyson index of the Gaussian ensemble: 1 real, 2 complex, 4 quaternion."""

    REAL = 1
    COMPLEX = 2
    QUATERNION = 4


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sigma_i^2 of the covariance matrix, in caller order.

    Caller order is preserved (the exponents are permutation invariant, and
    stable ordering keeps serialized output reproducible); closed forms that
    need sorted or distinct eigenvalues rearrange internally.
    """

    sigma_sq: tuple[float, ...]
    y: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.sigma_sq) == 0:
            raise InvalidSpectrumError("spectrum must contain at least one eigenvalue")
        for i, s in enumerate(self.sigma_sq):
            if not isinstance(s, float) or not math.isfinite(s) or s <= 0.0:
                raise InvalidSpectrumError(
                    f"sigma_sq[{i}] must be a positive finite real, got {s!r}"
                )
        # y is always the one-division reciprocal of sigma_sq, never stored
        # independently of it.
        object.__setattr__(self, "y", tuple(1.0 / s for s in self.sigma_sq))

    @property
    def d(self) -> int:
        return len(self.sigma_sq)


def make_spectrum(sigma_sq) -> Spectrum:
    """Validate a sequence of covariance eigenvalues and wrap it.

    Rejects nonpositive, NaN and infinite entries with an index-bearing
    error; order is preserved as given.
    """
    try:
        values = tuple(float(s) for s in sigma_sq)
    except (TypeError, ValueError) as exc:
        raise InvalidSpectrumError(f"spectrum entries must be real numbers: {exc}") from exc
    return Spectrum(values)


@dataclass(frozen=True)
class SpikeModel:
    """Covariance with d-1 unit eigenvalues and a single spike theta > 1.

    The scaled spike parameter is t = d/theta, so 0 < t < d.
    """

    d: int
    theta: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise InvalidSpectrumError(f"spike model needs integer d >= 2, got {self.d!r}")
        if not math.isfinite(self.theta) or self.theta <= 1.0:
            raise InvalidSpectrumError(f"spike must satisfy theta > 1, got {self.theta!r}")

    @property
    def t(self) -> float:
        return self.d / self.theta


def spike_spectrum(m: SpikeModel) -> Spectrum:
    """Spectrum (1, ..., 1, theta): y_i = 1 for i < d and y_d = 1/theta < 1."""
    return Spectrum((1.0,) * (m.d - 1) + (float(m.theta),))


def min_gap(s: Spectrum) -> float:
    """Smallest |y_i - y_j| over pairs; degeneracy detector for residue formulas."""
    if s.d < 2:
        raise InvalidSpectrumError("min_gap needs a spectrum of dimension >= 2")
    ys = sorted(s.y)
    return min(b - a for a, b in zip(ys, ys[1:]))


def spectrum_to_json(s: Spectrum) -> str:
    """Interchange form: a JSON array of sigma_i^2 values."""
    return json.dumps(list(s.sigma_sq))


def spectrum_from_json(text: str) -> Spectrum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpectrumError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise InvalidSpectrumError("spectrum JSON must be an array of sigma^2 values")
    return make_spectrum(data)
