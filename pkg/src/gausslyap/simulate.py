"""Monte Carlo oracle: actual products of Gaussian matrices.

Completely independent of the quadrature and closed-form paths: matrices are
sampled, multiplied and renormalized, and exponents are read off growth
rates (Furstenberg-Kesten / Oseledec).  Quaternion matrices are simulated in
their 2d x 2d complex representation phi -- phi is an algebra homomorphism,
so the product of representations is the representation of the product, and
the eigenvalue doubling of phi does not change growth rates.  A native
quaternion matrix type is kept for correctness tests of phi and for the
quaternion determinant det_q(X) = (det phi(X))^{1/2}.

Reproducibility: replicate r of a run draws from a counter-based Philox
stream keyed by (seed, r), so replicates are independent, order-insensitive
and bit-reproducible; Gaussian variates use numpy's ziggurat sampler.
Results are merged in replicate-index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidSpectrumError, RankCollapseError
from .quadrature import ExponentEstimate
from .spectrum import Beta, Spectrum

__all__ = [
    "SimConfig",
    "Quaternion",
    "QuaternionMatrix",
    "qmat_phi",
    "qdet",
    "sample_matrix",
    "mc_largest",
    "mc_top_k",
    "logdet_oracle",
]

_CHUNK = 1024  # matrices generated per replicate per batch (fixed: stream layout)
_ORTHO_TOL = 1e-8  # loss-of-orthogonality threshold for a reorthogonalization pass
_LOG_NORM_GUARD = 300.0  # flush when |log norm| risks leaving double range


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``n_steps`` matrices enter the growth-rate accumulation per replicate; an
    additional ``burn_in`` matrices are applied first (excluded from the
    rate) so the frame aligns with the top Oseledec subspace.
    """

    seed: int = 0
    n_steps: int = 100_000
    n_reps: int = 32
    renorm_every: int = 1
    top_k: int = 1
    burn_in: int = 100

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.n_steps < 10:
            raise DomainError(f"n_steps must be >= 10, got {self.n_steps}")
        if self.n_reps < 2:
            raise DomainError(f"n_reps must be >= 2 (standard error), got {self.n_reps}")
        if not 1 <= self.renorm_every <= 64:
            raise DomainError(f"renorm_every must lie in [1, 64], got {self.renorm_every}")
        if self.top_k < 1:
            raise DomainError(f"top_k must be >= 1, got {self.top_k}")
        if self.burn_in < 0:
            raise DomainError(f"burn_in must be >= 0, got {self.burn_in}")


def _replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    key = np.array([seed, replicate], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# quaternions and their complex representation

# Units as 2x2 complex matrices: i = [[0,i],[i,0]], j = [[0,-1],[1,0]],
# k = [[i,0],[0,-i]]; q = s + xi + yj + zk maps to
# [[s+iz, -y+ix], [y+ix, s-iz]].


@dataclass(frozen=True)
class Quaternion:
    """q = s + x i + y j + z k with real components."""

    s: float
    x: float
    y: float
    z: float

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.s, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.s ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.s + other.s, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a, b = self, other
        return Quaternion(
            a.s * b.s - a.x * b.x - a.y * b.y - a.z * b.z,
            a.s * b.x + a.x * b.s + a.y * b.z - a.z * b.y,
            a.s * b.y - a.x * b.z + a.y * b.s + a.z * b.x,
            a.s * b.z + a.x * b.y - a.y * b.x + a.z * b.s,
        )

    def phi(self) -> np.ndarray:
        return np.array(
            [[self.s + 1j * self.z, -self.y + 1j * self.x],
             [self.y + 1j * self.x, self.s - 1j * self.z]]
        )


class QuaternionMatrix:
    """A d x d quaternion matrix stored as four real component arrays."""

    def __init__(self, ws, wx, wy, wz):
        self.ws = np.asarray(ws, dtype=float)
        self.wx = np.asarray(wx, dtype=float)
        self.wy = np.asarray(wy, dtype=float)
        self.wz = np.asarray(wz, dtype=float)
        if not (self.ws.shape == self.wx.shape == self.wy.shape == self.wz.shape):
            raise DomainError("component arrays must share a shape")
        if self.ws.ndim != 2 or self.ws.shape[0] != self.ws.shape[1]:
            raise DomainError(f"quaternion matrix must be square, got {self.ws.shape}")

    @property
    def d(self) -> int:
        return self.ws.shape[0]

    @classmethod
    def identity(cls, d: int) -> "QuaternionMatrix":
        z = np.zeros((d, d))
        return cls(np.eye(d), z.copy(), z.copy(), z.copy())

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        a, b = self, other
        return QuaternionMatrix(
            a.ws @ b.ws - a.wx @ b.wx - a.wy @ b.wy - a.wz @ b.wz,
            a.ws @ b.wx + a.wx @ b.ws + a.wy @ b.wz - a.wz @ b.wy,
            a.ws @ b.wy - a.wx @ b.wz + a.wy @ b.ws + a.wz @ b.wx,
            a.ws @ b.wz + a.wx @ b.wy - a.wy @ b.wx + a.wz @ b.ws,
        )

    def dual(self) -> "QuaternionMatrix":
        """Quaternion conjugate transpose: (X*)_{lk} = (X_{kl})*."""
        return QuaternionMatrix(self.ws.T, -self.wx.T, -self.wy.T, -self.wz.T)

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion(float(self.ws[i, j]), float(self.wx[i, j]),
                          float(self.wy[i, j]), float(self.wz[i, j]))


def _phi_embed(w: np.ndarray) -> np.ndarray:
    """Map quaternion components (..., n, k, 4) to complex blocks (..., 2n, 2k)."""
    n, k = w.shape[-3], w.shape[-2]
    out = np.empty(w.shape[:-3] + (2 * n, 2 * k), dtype=complex)
    out[..., 0::2, 0::2] = w[..., 0] + 1j * w[..., 3]
    out[..., 0::2, 1::2] = -w[..., 2] + 1j * w[..., 1]
    out[..., 1::2, 0::2] = w[..., 2] + 1j * w[..., 1]
    out[..., 1::2, 1::2] = w[..., 0] - 1j * w[..., 3]
    return out


def qmat_phi(x: QuaternionMatrix) -> np.ndarray:
    """Complex 2d x 2d representation of a quaternion matrix (blockwise phi)."""
    return _phi_embed(np.stack([x.ws, x.wx, x.wy, x.wz], axis=-1))


def qdet(x: QuaternionMatrix) -> float:
    """Quaternion determinant det_q(X) = (det phi(X))^{1/2} (real, >= 0)."""
    det = np.linalg.det(qmat_phi(x))
    if abs(det.imag) > 1e-8 * max(1.0, abs(det.real)):
        raise DomainError(f"det(phi(X)) unexpectedly non-real: {det!r}")
    return math.sqrt(max(det.real, 0.0))


# ---------------------------------------------------------------------------
# sampling

# Entry conventions: each entry of G has total variance 1 for every beta, its
# real components carrying variance 1/beta (so N(0,1) real entries, N(0,1/2)
# real/imag parts, N(0,1/4) quaternion components); A = Sigma^{1/2} G scales
# row i by sigma_i.


def _sigma_row(s: Spectrum) -> np.ndarray:
    return np.sqrt(np.asarray(s.sigma_sq, dtype=float))


def _matrix_chunk(beta: Beta, rngs, sigma: np.ndarray, m: int) -> np.ndarray:
    """m matrices for every replicate at once, shape (m, n_reps, D, D).

    Each replicate's variates come from its own stream, in a fixed order that
    does not depend on the chunking, so results are chunk-size independent.
    """
    d = sigma.size
    reps = len(rngs)
    if beta == Beta.REAL:
        w = np.empty((m, reps, d, d))
        for r, rng in enumerate(rngs):
            w[:, r] = rng.standard_normal((m, d, d))
        w *= sigma[None, None, :, None]
        return w
    if beta == Beta.COMPLEX:
        w = np.empty((m, reps, d, d, 2))
        for r, rng in enumerate(rngs):
            w[:, r] = rng.standard_normal((m, d, d, 2))
        out = (w[..., 0] + 1j * w[..., 1]) * math.sqrt(0.5)
        out *= sigma[None, None, :, None]
        return out
    w = np.empty((m, reps, d, d, 4))
    for r, rng in enumerate(rngs):
        w[:, r] = rng.standard_normal((m, d, d, 4))
    w *= 0.5
    out = _phi_embed(w)
    out *= np.repeat(sigma, 2)[None, None, :, None]
    return out


def _chunk_steps(beta: Beta, d: int, n_reps: int) -> int:
    """Chunk length capped so the matrix buffer stays around 32 MB."""
    dim = d if beta != Beta.QUATERNION else 2 * d
    itemsize = 8 if beta == Beta.REAL else 16
    per_step = n_reps * dim * dim * itemsize
    return max(16, min(_CHUNK, int(32e6 / per_step)))


def sample_matrix(beta: Beta | int, s: Spectrum, rng) -> np.ndarray | QuaternionMatrix:
    """One Gaussian matrix A = Sigma^{1/2} G.

    Returns a real array (beta=1), complex array (beta=2) or
    :class:`QuaternionMatrix` (beta=4).  ``rng`` is a numpy Generator or an
    integer seed.
    """
    beta = Beta(int(beta))
    if isinstance(rng, (int, np.integer)):
        rng = _replicate_rng(int(rng), 0)
    sigma = _sigma_row(s)
    d = s.d
    if beta == Beta.REAL:
        return rng.standard_normal((d, d)) * sigma[:, None]
    if beta == Beta.COMPLEX:
        g = rng.standard_normal((d, d, 2))
        return (g[..., 0] + 1j * g[..., 1]) * math.sqrt(0.5) * sigma[:, None]
    w = rng.standard_normal((d, d, 4)) * 0.5
    scale = sigma[:, None]
    return QuaternionMatrix(w[..., 0] * scale, w[..., 1] * scale,
                            w[..., 2] * scale, w[..., 3] * scale)


# ---------------------------------------------------------------------------
# growth-rate estimators


def _init_vector(beta: Beta, rng, dim: int) -> np.ndarray:
    if beta == Beta.REAL:
        return rng.standard_normal(dim)
    g = rng.standard_normal((dim, 2))
    return (g[..., 0] + 1j * g[..., 1]) * math.sqrt(0.5)


def mc_largest(beta: Beta | int, s: Spectrum, cfg: SimConfig) -> ExponentEstimate:
    """Largest exponent from vector growth: iterate v <- A v, accumulate log norms.

    The accumulated log growth over the post-burn-in window divided by the
    window length estimates mu_1; the reported value is the replicate mean
    and std_error the replicate standard error.  Renormalization cadence
    never changes the accumulated total (only its bookkeeping), so any
    ``renorm_every`` gives the same estimate up to float roundoff.
    """
    beta = Beta(int(beta))
    dim = s.d if beta != Beta.QUATERNION else 2 * s.d
    sigma = _sigma_row(s)
    rngs = [_replicate_rng(cfg.seed, r) for r in range(cfg.n_reps)]
    v = np.stack([_init_vector(beta, rng, dim) for rng in rngs])
    acc = np.zeros(cfg.n_reps)
    total = cfg.burn_in + cfg.n_steps
    chunk_cap = _chunk_steps(beta, s.d, cfg.n_reps)
    check_overflow = cfg.renorm_every > 1

    def flush():
        nonlocal acc, v
        norms = np.linalg.norm(v, axis=1)
        if np.any(norms == 0.0):
            raise RankCollapseError("iterated vector collapsed to zero")
        acc += np.log(norms)
        v = v / norms[:, None]

    step = 0
    while step < total:
        m = min(chunk_cap, total - step)
        chunk = _matrix_chunk(beta, rngs, sigma, m)
        for i in range(m):
            v = np.matmul(chunk[i], v[:, :, None])[:, :, 0]
            step += 1
            due = step % cfg.renorm_every == 0
            if check_overflow and not due:
                due = np.max(np.abs(v.real)) > 1e140
            if due or step == total or step == cfg.burn_in:
                flush()
                if step == cfg.burn_in:
                    acc[:] = 0.0
    rates = acc / cfg.n_steps
    return ExponentEstimate(
        float(np.mean(rates)),
        "monte_carlo",
        std_error=float(np.std(rates, ddof=1) / math.sqrt(cfg.n_reps)),
    )


def _mgs_pass(frame: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One modified Gram-Schmidt sweep over a (reps, dim, k) batch of frames.

    Returns the orthonormalized frames and the (reps, k) log scale factors.
    """
    reps, dim, k = frame.shape
    q = np.empty_like(frame)
    logr = np.empty((reps, k))
    for j in range(k):
        b = frame[:, :, j].copy()
        for i in range(j):
            proj = np.sum(q[:, :, i].conj() * b, axis=1)
            b -= proj[:, None] * q[:, :, i]
        r = np.linalg.norm(b, axis=1)
        if np.any(r < 1e-290):
            raise RankCollapseError(
                "frame lost rank during re-orthonormalization (scale factor underflow)"
            )
        q[:, :, j] = b / r[:, None]
        logr[:, j] = np.log(r)
    return q, logr


def _orthonormalize(frame: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, logr = _mgs_pass(frame)
    gram = np.einsum("rdi,rdj->rij", q.conj(), q)
    eye = np.eye(q.shape[2])
    if np.max(np.abs(gram - eye)) > _ORTHO_TOL:
        q, logr2 = _mgs_pass(q)
        logr = logr + logr2
    return q, logr


def mc_top_k(beta: Beta | int, s: Spectrum, cfg: SimConfig) -> list[ExponentEstimate]:
    """Top-k exponents from frame growth (QR-style re-orthonormalization).

    Maintains an orthonormal frame Q of cfg.top_k columns; each
    re-orthonormalization contributes the log of its diagonal scale factors,
    and the i-th accumulated rate estimates mu_i.  For beta = 4 the run uses
    the 2d x 2d complex representation with 2k columns, where every exponent
    appears twice; the returned list keeps every other rate.
    """
    beta = Beta(int(beta))
    if not 1 <= cfg.top_k <= s.d:
        raise InvalidSpectrumError(f"top_k = {cfg.top_k} outside [1, d = {s.d}]")
    doubled = beta == Beta.QUATERNION
    dim = s.d if not doubled else 2 * s.d
    k = cfg.top_k if not doubled else 2 * cfg.top_k
    sigma = _sigma_row(s)
    rngs = [_replicate_rng(cfg.seed, r) for r in range(cfg.n_reps)]
    frame = np.stack(
        [np.column_stack([_init_vector(beta, rng, dim) for _ in range(k)]) for rng in rngs]
    )
    frame, _ = _orthonormalize(frame)
    acc = np.zeros((cfg.n_reps, k))
    total = cfg.burn_in + cfg.n_steps
    chunk_cap = _chunk_steps(beta, s.d, cfg.n_reps)
    check_overflow = cfg.renorm_every > 1
    pending_log = 0.0  # coarse bound on unflushed growth, to preempt overflow

    step = 0
    while step < total:
        m = min(chunk_cap, total - step)
        chunk = _matrix_chunk(beta, rngs, sigma, m)
        for i in range(m):
            frame = np.matmul(chunk[i], frame)
            step += 1
            due = step % cfg.renorm_every == 0
            if check_overflow and not due:
                pending_log += math.log1p(float(np.max(np.abs(chunk[i])))) + 1.0
                due = pending_log > _LOG_NORM_GUARD
            if due or step == total or step == cfg.burn_in:
                frame, logr = _orthonormalize(frame)
                acc += logr
                pending_log = 0.0
                if step == cfg.burn_in:
                    acc[:, :] = 0.0
    rates = acc / cfg.n_steps
    if doubled:
        rates = rates[:, 0::2]
    return [
        ExponentEstimate(
            float(np.mean(rates[:, j])),
            "monte_carlo",
            std_error=float(np.std(rates[:, j], ddof=1) / math.sqrt(cfg.n_reps)),
        )
        for j in range(rates.shape[1])
    ]


def logdet_oracle(
    beta: Beta | int, s: Spectrum, k: int, n_samples: int, rng
) -> ExponentEstimate:
    """Direct sampler of mu_1 + ... + mu_k = (1/2) E log det(G_k^* Sigma G_k).

    ``G_k`` is a fresh d x k Gaussian matrix per sample -- no products, no
    iteration -- so this is an oracle independent of the growth-rate
    estimators.  For k = 1 the statistic is (1/2) log(sum_i sigma_i^2 |g_i|^2);
    for beta = 4 determinants are quaternion, det_q = (det phi)^{1/2}.
    ``rng`` is a numpy Generator or an integer seed.
    """
    beta = Beta(int(beta))
    if not 1 <= k <= s.d:
        raise InvalidSpectrumError(f"k = {k} outside [1, d = {s.d}]")
    if n_samples < 2:
        raise DomainError("n_samples must be >= 2")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([int(rng), 2 ** 63], dtype=np.uint64))
        )
    d = s.d
    sig2 = np.asarray(s.sigma_sq)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(8192, n_samples - done)
        if beta == Beta.REAL:
            g = rng.standard_normal((m, d, k)) * np.sqrt(sig2)[None, :, None]
            w = 0.5 * np.linalg.slogdet(np.einsum("ndi,ndj->nij", g, g))[1]
        elif beta == Beta.COMPLEX:
            z = rng.standard_normal((m, d, k, 2))
            g = (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)
            g = g * np.sqrt(sig2)[None, :, None]
            w = 0.5 * np.linalg.slogdet(np.einsum("ndi,ndj->nij", g.conj(), g))[1]
        else:
            q = rng.standard_normal((m, d, k, 4)) * 0.5
            g = _phi_embed(q) * np.repeat(np.sqrt(sig2), 2)[None, :, None]
            w = 0.25 * np.linalg.slogdet(
                np.einsum("ndi,ndj->nij", g.conj(), g)
            )[1]
        w = np.real(w)
        total += float(np.sum(w))
        total_sq += float(np.sum(w * w))
        done += m
    mean = total / n_samples
    var = (total_sq - n_samples * mean * mean) / (n_samples - 1)
    return ExponentEstimate(
        mean, "monte_carlo", std_error=math.sqrt(max(var, 0.0) / n_samples)
    )
