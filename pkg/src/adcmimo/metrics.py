"""Estimation and capacity figures of merit for the quantized receive model.

Provides the Cramer-Rao lower bound of the symbol estimate, the link capacity
in both its determinant form and its per-path closed form (the two agree in
ideal combiner mode), the separable per-path score whose maximizer selects the
bit allocation, and the infinite-resolution reference capacities with uniform
and water-filling transmit power allocation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .quantization import BitAllocation, QuantGainTable
from .receiver import EffectiveModel, SignalConfig


class MetricsConsistencyError(RuntimeError):
    """Raised when a closed-form cross-check of a matrix computation fails."""


@dataclass
class CrlbResult:
    """CRLB matrix of the transmitted-symbol estimate and, in ideal mode,
    the diagonal of its inverse."""

    crlb: np.ndarray
    inv_crlb_diag: Optional[np.ndarray]


def _whitened_channel(model: EffectiveModel) -> np.ndarray:
    """``L^{-1} K`` with ``phi = L L^H``; its Gram matrix is ``K^H phi^{-1} K``."""
    if not np.all(np.isfinite(model.phi.view(np.float64))):
        raise ValueError("effective noise covariance contains non-finite entries")
    try:
        chol = np.linalg.cholesky(model.phi)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"noise covariance not positive definite: {exc}") from exc
    return np.linalg.solve(chol, model.k)


def _quant_noise_over_gain(model: EffectiveModel) -> np.ndarray:
    """Per-path ratio ``f(b_i) l_i / (1 - f(b_i))``, zero at infinite resolution."""
    return model.f_diag * model.l / (1.0 - model.f_diag)


def crlb(model: EffectiveModel) -> CrlbResult:
    """Cramer-Rao lower bound ``(K^H phi^{-1} K)^{-1}`` of the symbol estimate.

    In ideal combiner mode the result is also verified against its diagonal
    closed form ``sigma_n^2/sigma_i^2 + f_i l_i / ((1-f_i) sigma_i^2)`` and the
    diagonal of the inverse CRLB is reported.
    """
    white = _whitened_channel(model)
    fisher = white.conj().T @ white
    crlb_mat = np.linalg.inv(fisher)
    inv_diag = None
    if model.mode == "ideal":
        denom = model.sigma_n_sq + _quant_noise_over_gain(model)
        closed = np.diag(denom / model.sigma**2)
        tol = 1e-10 * max(1.0, float(np.max(np.abs(closed))))
        if np.max(np.abs(crlb_mat - closed)) > tol:
            raise MetricsConsistencyError(
                "CRLB matrix form disagrees with its ideal-mode closed form"
            )
        inv_diag = model.sigma**2 / denom
    return CrlbResult(crlb=crlb_mat, inv_crlb_diag=inv_diag)


@dataclass
class CapacityReport:
    """Capacity of one configuration plus its per-path decomposition.

    ``capacity_bits`` is the mutual information in bits per channel use,
    ``per_path_terms`` the closed-form contributions ``log2(1 + q_i)`` (which
    sum to the capacity in ideal mode), and ``k_f_score`` the separable
    allocation score ``sum_i q_i``. ``allocation=None`` tags the
    infinite-resolution reference.
    """

    capacity_bits: float
    per_path_terms: np.ndarray
    k_f_score: float
    mode: str
    allocation: Optional[BitAllocation]
    power_convention: str


def _per_path_q(model: EffectiveModel) -> np.ndarray:
    """Effective per-path SNR ``q_i = p sigma_i^2 / (sigma_n^2 + f_i l_i/(1-f_i))``."""
    return model.p * model.sigma**2 / (model.sigma_n_sq + _quant_noise_over_gain(model))


def capacity(model: EffectiveModel) -> CapacityReport:
    """Link capacity ``log2 det(p K K^H phi^{-1} + I)`` for a fixed configuration.

    The determinant is evaluated through a Hermitian factorization of the
    noise covariance for numerical stability. The per-path closed form is
    reported alongside; in ideal combiner mode the two are equal to near
    machine precision.
    """
    white = _whitened_channel(model)
    gram = np.eye(model.n_s, dtype=np.complex128) + model.p * white.conj().T @ white
    sign, logdet = np.linalg.slogdet(gram)
    if sign.real <= 0.0 or not np.isfinite(logdet):
        raise ValueError("capacity determinant is not finite and positive")
    bits = float(logdet / np.log(2.0))
    q = _per_path_q(model)
    return CapacityReport(
        capacity_bits=bits,
        per_path_terms=np.log2(1.0 + q),
        k_f_score=float(np.sum(q)),
        mode=model.mode,
        allocation=model.allocation,
        power_convention=model.power_convention,
    )


def q_of_b(
    sig: SignalConfig,
    sigma_i: float,
    l_i: float,
    b_i: Optional[int],
    table: QuantGainTable,
) -> float:
    """Scalar per-path SNR for one bit width; ``b_i=None`` means no quantization.

    Uses ``sig.p`` as the symbol power on the path, i.e. the caller picks the
    power convention.
    """
    f = 0.0 if b_i is None else table.f_of(b_i)
    return sig.p * sigma_i**2 / (sig.sigma_n_sq + f * l_i / (1.0 - f))


def k_f_sum(model: EffectiveModel, b: Optional[BitAllocation], table: QuantGainTable) -> float:
    """Separable allocation score ``sum_i q_i(b_i)`` evaluated on a model's paths.

    This is the objective whose maximizer over the power-feasible set selects
    the bit allocation; it increases whenever any path gains a bit.
    """
    if b is None:
        f_vals = np.zeros(model.n_s)
    else:
        if b.n_s != model.n_s:
            raise ValueError(f"allocation has {b.n_s} paths, model has {model.n_s}")
        f_vals = np.array([table.f_of(int(bi)) for bi in b.bits])
    q = model.p * model.sigma**2 / (model.sigma_n_sq + f_vals * model.l / (1.0 - f_vals))
    return float(np.sum(q))


def capacity_infinite_uniform(sigma: np.ndarray, rho: float, n_s: int) -> float:
    """Infinite-resolution capacity with the total power split evenly over paths."""
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    sigma = np.asarray(sigma, dtype=np.float64)
    return float(np.sum(np.log2(1.0 + rho * sigma**2 / n_s)))


def capacity_infinite_waterfill(sigma: np.ndarray, rho: float, n_s: int):
    """Infinite-resolution capacity with water-filling transmit power allocation.

    Returns ``(capacity_bits, eps)`` where ``eps_i`` is the ratio of the power
    given to path ``i`` over the uniform per-path share, so ``eps_i = 1`` for
    all paths recovers the uniform capacity and ``sum_i eps_i / n_s = 1``.
    The water level is found by the standard active-set construction.
    """
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    sigma = np.asarray(sigma, dtype=np.float64)
    gains = rho * sigma**2 / n_s
    inv_g = 1.0 / gains
    order = np.argsort(inv_g, kind="stable")

    n_active = sigma.shape[0]
    while n_active > 1:
        active = order[:n_active]
        level = (n_s + np.sum(inv_g[active])) / n_active
        if level > inv_g[order[n_active - 1]]:
            break
        n_active -= 1
    active = order[:n_active]

    eps = np.zeros_like(inv_g)
    # eps_i = level - inv_g_i, written so exact symmetry yields exactly 1.0
    for i in active:
        eps[i] = (n_s + np.sum(inv_g[active] - inv_g[i])) / n_active
    cap = float(np.sum(np.log2(1.0 + eps * gains)))
    return cap, eps
