"""Hybrid combiner construction and the effective quantized receive model.

The receive chain applies an analog combiner, per-path ADCs linearized by the
AQNM, and a digital combiner, collapsing the link to ``y = K x + n1`` with a
Gaussian effective noise ``n1`` of covariance ``phi``. This module builds the
combiners from the channel SVD, assembles ``K``/``phi`` and the per-path input
powers, and provides seeded sample-level simulators used to cross-check the
model statistics (covariance and circular symmetry of ``n1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelRealization, SvdTriple
from .quantization import AqnmMatrices, BitAllocation

COMBINER_MODES = ("ideal", "phase-constrained")

POWER_SPLIT_UNIFORM = "uniform-split"
POWER_SPLIT_PER_STREAM = "per-stream"


@dataclass(frozen=True)
class SignalConfig:
    """Transmit power and noise level; ``rho = p / sigma_n_sq`` is the average SNR."""

    p: float = 1.0
    sigma_n_sq: float = 1.0

    def __post_init__(self):
        if self.p <= 0.0:
            raise ValueError(f"symbol power must be positive, got {self.p}")
        if self.sigma_n_sq <= 0.0:
            raise ValueError(f"noise variance must be positive, got {self.sigma_n_sq}")

    @property
    def rho(self) -> float:
        return self.p / self.sigma_n_sq

    @classmethod
    def from_snr_db(cls, snr_db: float, p: float = 1.0) -> "SignalConfig":
        """Fix ``p`` and set the noise variance so ``rho`` matches ``snr_db``."""
        return cls(p=p, sigma_n_sq=p / 10.0 ** (snr_db / 10.0))


@dataclass
class CombinerSet:
    """Analog stage ``w_a_h`` (n_s x n_r) and digital stage ``w_d_h`` (n_s x n_s).

    In ideal mode the analog stage equals ``U^H`` and the digital stage is the
    identity, so the cascade reproduces ``U^H`` exactly. In phase-constrained
    mode the analog stage is unit-modulus (entries of magnitude 1/sqrt(n_r))
    and the digital stage is the least-squares correction; ``residual`` is the
    Frobenius misfit ``||w_d_h @ w_a_h - U^H||_F`` of that best effort.
    """

    w_a_h: np.ndarray
    w_d_h: np.ndarray
    mode: str
    residual: float = 0.0


def build_combiners(
    svd: SvdTriple,
    mode: str = "ideal",
    residual_tol: Optional[float] = None,
) -> CombinerSet:
    """Derive the hybrid combiner pair from the channel's left singular vectors.

    ``residual_tol``, when given, bounds the acceptable cascade misfit in
    phase-constrained mode; exceeding it raises. Ideal mode always has zero
    residual.
    """
    if mode not in COMBINER_MODES:
        raise ValueError(f"mode must be one of {COMBINER_MODES}, got {mode!r}")
    u = svd.u
    n_r = u.shape[0]
    if mode == "ideal":
        return CombinerSet(w_a_h=u.conj().T, w_d_h=np.eye(svd.n_s, dtype=np.complex128), mode=mode)

    w_a = np.exp(1j * np.angle(u)) / np.sqrt(n_r)
    gram = w_a.conj().T @ w_a
    if np.linalg.cond(gram) > 1.0 / np.finfo(np.float64).eps:
        raise np.linalg.LinAlgError("analog combiner columns are numerically dependent")
    # minimize ||w_a @ X - u||_F, then the digital stage is X^H
    x = np.linalg.solve(gram, w_a.conj().T @ u)
    w_d_h = x.conj().T
    residual = float(np.linalg.norm(w_d_h @ w_a.conj().T - u.conj().T))
    if residual_tol is not None and residual > residual_tol:
        raise ValueError(
            f"combiner cascade misfit {residual:.4g} exceeds tolerance {residual_tol:.4g}"
        )
    return CombinerSet(w_a_h=w_a.conj().T, w_d_h=w_d_h, mode=mode, residual=residual)


@dataclass
class EffectiveModel:
    """The linear quantized receive model ``y = k x + n1`` with ``n1 ~ CN(0, phi)``.

    ``k`` is the effective channel, ``g`` the combined gain applied to thermal
    noise, ``phi`` the effective noise covariance, ``l`` the per-path quantizer
    input powers, and ``p`` the average symbol power per stream actually
    applied (``power_convention`` records how it was derived from the
    configured total). ``sigma``, ``f_diag`` and ``allocation`` carry the
    eigenchannel gains and ADC distortion ratios the model was built from,
    so closed-form per-path metrics can be evaluated without re-assembly.
    """

    k: np.ndarray
    g: np.ndarray
    phi: np.ndarray
    l: np.ndarray
    p: float
    sigma_n_sq: float
    sigma: np.ndarray
    f_diag: np.ndarray
    w_d_h: np.ndarray
    allocation: Optional[BitAllocation]
    mode: str
    power_convention: str

    @property
    def n_s(self) -> int:
        return self.k.shape[0]


def path_gains(w_a_h: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Per-path quantizer input power factors ``l_i = 1 + diag(W_A^H H H^H W_A)_i``."""
    combined = w_a_h @ h
    return 1.0 + np.einsum("ij,ij->i", combined, combined.conj()).real


def effective_model(
    svd: SvdTriple,
    combiners: CombinerSet,
    aqnm: AqnmMatrices,
    sig: SignalConfig,
    realization: ChannelRealization,
    allocation: Optional[BitAllocation] = None,
    power_split: str = POWER_SPLIT_UNIFORM,
) -> EffectiveModel:
    """Assemble ``K``, ``G``, ``phi`` and ``l`` for one bit allocation.

    Under the default ``'uniform-split'`` convention, the configured total
    power ``sig.p`` is divided evenly across the ``n_s`` streams, matching the
    uniform-allocation infinite-resolution reference; ``'per-stream'`` applies
    ``sig.p`` to every stream unchanged. The convention is recorded on the
    model so downstream reports never mix the two.
    """
    n_s = svd.n_s
    if aqnm.n_s != n_s:
        raise ValueError(f"AQNM built for {aqnm.n_s} paths, SVD has {n_s}")
    if combiners.w_a_h.shape != (n_s, svd.u.shape[0]):
        raise ValueError(f"analog combiner shape {combiners.w_a_h.shape} mismatches SVD")
    if power_split == POWER_SPLIT_UNIFORM:
        p = sig.p / n_s
    elif power_split == POWER_SPLIT_PER_STREAM:
        p = sig.p
    else:
        raise ValueError(f"unknown power split {power_split!r}")

    g = combiners.w_d_h @ aqnm.w_alpha @ combiners.w_a_h
    k = g @ svd.u * svd.sigma[None, :]
    phi = (
        sig.sigma_n_sq * g @ g.conj().T
        + combiners.w_d_h @ aqnm.d_q_sq @ combiners.w_d_h.conj().T
    )
    l = path_gains(combiners.w_a_h, realization.h)
    return EffectiveModel(
        k=k,
        g=g,
        phi=phi,
        l=l,
        p=p,
        sigma_n_sq=sig.sigma_n_sq,
        sigma=svd.sigma.copy(),
        f_diag=aqnm.f_diag,
        w_d_h=combiners.w_d_h.copy(),
        allocation=allocation,
        mode=combiners.mode,
        power_convention=power_split,
    )


def assemble_model(
    svd: SvdTriple,
    realization: ChannelRealization,
    b: Optional[BitAllocation],
    sig: SignalConfig,
    table=None,
    mode: str = "ideal",
    power_split: str = POWER_SPLIT_UNIFORM,
) -> EffectiveModel:
    """Convenience wiring: combiners -> path gains -> AQNM -> effective model."""
    from .quantization import DEFAULT_TABLE, build_aqnm

    combiners = build_combiners(svd, mode=mode)
    l = path_gains(combiners.w_a_h, realization.h)
    aqnm = build_aqnm(table if table is not None else DEFAULT_TABLE, b, l)
    return effective_model(
        svd, combiners, aqnm, sig, realization, allocation=b, power_split=power_split
    )


def _cscg(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def simulate_noise(
    model: EffectiveModel,
    n_samples: int,
    rng: np.random.Generator,
    thermal_scale: float = 1.0,
    quant_scale: float = 1.0,
) -> np.ndarray:
    """Draw samples of the effective noise ``n1`` (rows are samples).

    ``thermal_scale`` and ``quant_scale`` multiply the thermal and
    quantization-noise standard deviations; setting one to zero removes that
    component exactly, which is useful for degenerate-case checks.
    """
    n_r = model.g.shape[1]
    n = _cscg(rng, (n_samples, n_r)) * (thermal_scale * np.sqrt(model.sigma_n_sq))
    w = _cscg(rng, (n_samples, model.n_s))
    # quantization noise: n_q = D_q w with D_q^2 the diagonal AQNM covariance
    d_q_sq = model.f_diag * (1.0 - model.f_diag) * model.l
    n_q = w * (quant_scale * np.sqrt(d_q_sq))[None, :]
    return n @ model.g.T + n_q @ model.w_d_h.T


def simulate_received(
    model: EffectiveModel,
    n_samples: int,
    seed: int,
    thermal_scale: float = 1.0,
    quant_scale: float = 1.0,
):
    """Draw ``(x, y)`` sample pairs from the effective model, seeded.

    Symbols are i.i.d. circularly-symmetric complex Gaussian with per-stream
    power ``model.p``; noise components follow their stated covariances. With
    both noise scales at zero, ``y = K x`` exactly.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = _cscg(rng, (n_samples, model.n_s)) * np.sqrt(model.p)
    n1 = simulate_noise(model, n_samples, rng, thermal_scale, quant_scale)
    y = x @ model.k.T + n1
    return x, y


@dataclass(frozen=True)
class CscgReport:
    """Empirical circular-symmetry diagnostics of the effective noise.

    ``cov_err`` is the relative Frobenius misfit of the sample covariance
    against the model covariance; ``pseudo_cov_ratio`` is the sample
    pseudo-covariance magnitude on the same scale (zero in expectation for a
    circularly-symmetric vector).
    """

    cov_err: float
    pseudo_cov_ratio: float


def verify_cscg(
    model: EffectiveModel,
    n_samples: int,
    seed: int,
    thermal_scale: float = 1.0,
    quant_scale: float = 1.0,
) -> CscgReport:
    """Monte-Carlo check that ``n1`` has covariance ``phi`` and zero pseudo-covariance.

    The reference covariance accounts for the component scales, so forcing
    both components to zero yields exactly zero statistics.
    """
    if n_samples < 10**4:
        raise ValueError("need at least 1e4 samples for stable covariance estimates")
    rng = np.random.default_rng(seed)
    samples = simulate_noise(model, n_samples, rng, thermal_scale, quant_scale)
    cov_hat = samples.T @ samples.conj() / n_samples
    pseudo_hat = samples.T @ samples / n_samples

    d_q_sq = model.f_diag * (1.0 - model.f_diag) * model.l
    phi_ref = (
        thermal_scale**2 * model.sigma_n_sq * model.g @ model.g.conj().T
        + quant_scale**2 * (model.w_d_h * d_q_sq[None, :]) @ model.w_d_h.conj().T
    )
    scale = np.linalg.norm(phi_ref)
    if scale == 0.0:
        return CscgReport(
            cov_err=float(np.linalg.norm(cov_hat)),
            pseudo_cov_ratio=float(np.linalg.norm(pseudo_hat)),
        )
    return CscgReport(
        cov_err=float(np.linalg.norm(cov_hat - phi_ref) / scale),
        pseudo_cov_ratio=float(np.linalg.norm(pseudo_hat) / scale),
    )
