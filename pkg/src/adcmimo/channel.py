"""Synthetic mmWave MIMO channel generation and SVD utilities.

Channels follow a clustered geometric model: a sum of plane-wave paths with
i.i.d. complex Gaussian gains and uniform-linear-array (ULA) steering vectors
at half-wavelength spacing. The dominant singular value can be strengthened
to emulate a strong scatterer, and the truncated SVD exposes the eigenchannels
used by the receiver chain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class RankDeficientChannelError(ValueError):
    """Raised when a channel does not support the requested number of streams."""


@dataclass(frozen=True)
class ChannelParams:
    """Geometry and randomness knobs for one synthetic channel draw.

    Defaults (32 TX, 64 RX elements) match the standard simulation setup.
    ``boost`` is the multiplier applied to the dominant singular value by
    :func:`boost_dominant`; it is carried here so a realization records how
    it was produced.
    """

    n_t: int = 32
    n_r: int = 64
    n_clusters: int = 4
    n_rays: int = 10
    boost: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError(f"antenna counts must be >= 1, got n_t={self.n_t}, n_r={self.n_r}")
        if self.n_clusters < 1 or self.n_rays < 1:
            raise ValueError(
                f"need at least one propagation path, got "
                f"n_clusters={self.n_clusters}, n_rays={self.n_rays}"
            )
        if self.boost < 1.0:
            raise ValueError(f"boost must be >= 1, got {self.boost}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass
class ChannelRealization:
    """A drawn channel matrix ``h`` (n_r x n_t) plus the parameters behind it."""

    h: np.ndarray
    params: ChannelParams

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.complex128)
        if self.h.shape != (self.params.n_r, self.params.n_t):
            raise ValueError(
                f"channel shape {self.h.shape} inconsistent with params "
                f"({self.params.n_r}, {self.params.n_t})"
            )
        if not np.all(np.isfinite(self.h.view(np.float64))):
            raise ValueError("channel matrix contains non-finite entries")
        if np.linalg.norm(self.h) == 0.0:
            raise ValueError("channel matrix is identically zero")


@dataclass
class SvdTriple:
    """Top-``n_s`` SVD factors of a channel: ``h ~= u @ diag(sigma) @ f_opt^H``.

    ``u`` (n_r x n_s) are the left singular vectors, ``sigma`` the singular
    values in descending order (all strictly positive), and ``f_opt``
    (n_t x n_s) the right singular vectors, which double as the optimal
    fully-digital precoder.
    """

    u: np.ndarray
    sigma: np.ndarray
    f_opt: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.complex128)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        self.f_opt = np.asarray(self.f_opt, dtype=np.complex128)
        n_s = self.sigma.shape[0]
        if self.u.ndim != 2 or self.u.shape[1] != n_s:
            raise ValueError("u must have one column per singular value")
        if self.f_opt.ndim != 2 or self.f_opt.shape[1] != n_s:
            raise ValueError("f_opt must have one column per singular value")
        if np.any(self.sigma <= 0.0):
            raise ValueError("singular values must be strictly positive")
        if np.any(np.diff(self.sigma) > 0.0):
            raise ValueError("singular values must be non-increasing")

    @property
    def n_s(self) -> int:
        return self.sigma.shape[0]


def ula_steering(n_elements: int, angles: np.ndarray) -> np.ndarray:
    """Unit-norm ULA steering vectors at lambda/2 spacing, one column per angle."""
    angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
    phase = np.pi * np.outer(np.arange(n_elements), np.sin(angles))
    return np.exp(1j * phase) / np.sqrt(n_elements)


def generate_channel(params: ChannelParams) -> ChannelRealization:
    """Draw one clustered geometric channel matrix.

    The matrix is ``sqrt(n_t*n_r/P) * sum_p alpha_p a_r(theta_p) a_t(phi_p)^H``
    over ``P = n_clusters*n_rays`` paths, with path gains ``alpha_p`` i.i.d.
    standard circularly-symmetric complex Gaussian and angles of arrival and
    departure i.i.d. uniform on [0, 2*pi). Deterministic for a fixed seed; the
    draw order is gains (real then imaginary parts), arrival angles, departure
    angles.

    Note: ``params.boost`` is *not* applied here; see :func:`boost_dominant`.
    """
    n_paths = params.n_clusters * params.n_rays
    rng = np.random.default_rng(params.seed)
    re = rng.standard_normal(n_paths)
    im = rng.standard_normal(n_paths)
    alpha = (re + 1j * im) / np.sqrt(2.0)
    aoa = rng.uniform(0.0, 2.0 * np.pi, n_paths)
    aod = rng.uniform(0.0, 2.0 * np.pi, n_paths)

    a_r = ula_steering(params.n_r, aoa)
    a_t = ula_steering(params.n_t, aod)
    scale = np.sqrt(params.n_t * params.n_r / n_paths)
    h = scale * (a_r * alpha) @ a_t.conj().T
    return ChannelRealization(h=h, params=params)


def boost_dominant(realization: ChannelRealization, boost: float) -> ChannelRealization:
    """Return the channel with its largest singular value multiplied by ``boost``.

    All other singular values and both sets of singular vectors are unchanged;
    the matrix is rebuilt from its full SVD with only sigma_1 rescaled.
    """
    if boost < 1.0:
        raise ValueError(f"boost must be >= 1, got {boost}")
    u, s, vh = np.linalg.svd(realization.h, full_matrices=False)
    s = s.copy()
    s[0] *= boost
    h = (u * s) @ vh
    return ChannelRealization(h=h, params=replace(realization.params, boost=boost))


def normalize_gain(realization: ChannelRealization, n_s: int) -> ChannelRealization:
    """Rescale the channel so the top-``n_s`` eigenchannel gains average to one.

    After this step ``mean(sigma_i^2) == 1`` over the ``n_s`` strongest paths,
    which makes a configured SNR ``rho = p / sigma_n^2`` the physical average
    per-eigenchannel receive SNR instead of being offset by the arbitrary
    absolute scale of the synthetic channel. Relative singular-value shape is
    untouched.
    """
    s = np.linalg.svd(realization.h, compute_uv=False)
    if n_s > s.shape[0]:
        raise ValueError(f"n_s={n_s} exceeds channel rank bound {s.shape[0]}")
    mean_gain = np.mean(s[:n_s] ** 2)
    if mean_gain <= 0.0:
        raise RankDeficientChannelError("channel has no energy in the requested streams")
    return ChannelRealization(h=realization.h / np.sqrt(mean_gain), params=realization.params)


def truncated_svd(realization: ChannelRealization, n_s: int) -> SvdTriple:
    """Top-``n_s`` singular triplet of the channel.

    Raises :class:`RankDeficientChannelError` if the channel's numerical rank
    is below ``n_s``.
    """
    h = realization.h
    if not 1 <= n_s <= min(h.shape):
        raise ValueError(f"n_s must be in [1, {min(h.shape)}], got {n_s}")
    u, s, vh = np.linalg.svd(h, full_matrices=False)
    rank_floor = s[0] * max(h.shape) * np.finfo(np.float64).eps
    if s[n_s - 1] <= rank_floor:
        raise RankDeficientChannelError(
            f"channel rank below requested n_s={n_s}: sigma_{n_s} = {s[n_s - 1]:.3e}"
        )
    return SvdTriple(u=u[:, :n_s], sigma=s[:n_s], f_opt=vh[:n_s].conj().T)
