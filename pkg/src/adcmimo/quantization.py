"""ADC distortion model: distortion-ratio table, AQNM matrices, Lloyd-Max quantizer.

A ``b``-bit ADC on an RF path is linearized as a gain ``1 - f(b)`` plus an
uncorrelated Gaussian noise term whose variance is matched to the quantizer's
mean-square error. ``f(b)`` is the ratio of that error to the input power for
the MMSE (Lloyd-Max) scalar quantizer of a Gaussian source; the canonical
values live in :data:`DISTORTION_RATIOS` and are validated empirically by the
executable quantizer in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.special import ndtr, ndtri

# Mean-square distortion of the Gaussian-optimal scalar quantizer, normalized
# by input power, per bit width. b=1 equals 1 - 2/pi.
DISTORTION_RATIOS: dict[int, float] = {
    1: 0.3634,
    2: 0.1175,
    3: 0.03454,
    4: 0.009497,
    5: 0.002499,
}


@dataclass(frozen=True)
class QuantGainTable:
    """Map from ADC bit width to distortion ratio ``f(b)``.

    Values must be strictly decreasing in ``b`` and lie in (0, 1). Entries can
    be overridden (e.g. from a config file) for sensitivity studies.
    """

    f: Mapping[int, float] = field(default_factory=lambda: dict(DISTORTION_RATIOS))

    def __post_init__(self):
        object.__setattr__(self, "f", dict(self.f))
        bits = sorted(self.f)
        if not bits:
            raise ValueError("distortion table is empty")
        vals = [self.f[b] for b in bits]
        if any(not 0.0 < v < 1.0 for v in vals):
            raise ValueError(f"distortion ratios must lie in (0, 1), got {vals}")
        if any(v2 >= v1 for v1, v2 in zip(vals, vals[1:])):
            raise ValueError(f"distortion ratios must strictly decrease with bits, got {vals}")

    @property
    def bit_widths(self) -> tuple[int, ...]:
        return tuple(sorted(self.f))

    def f_of(self, b: int) -> float:
        if b not in self.f:
            raise ValueError(f"bit width {b} outside table domain {self.bit_widths}")
        return self.f[b]


DEFAULT_TABLE = QuantGainTable()


def f_of_b(table: QuantGainTable, b: int) -> float:
    """Distortion ratio for a ``b``-bit ADC; rejects bit widths outside the table."""
    return table.f_of(b)


@dataclass
class BitAllocation:
    """Integer vector of per-RF-path ADC bit widths (applied to both I and Q)."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.int64)
        if self.bits.ndim != 1 or self.bits.size == 0:
            raise ValueError("bit allocation must be a non-empty 1-D integer vector")
        if np.any(self.bits < 1) or np.any(self.bits > 5):
            raise ValueError(f"bit widths must lie in [1, 5], got {self.bits.tolist()}")

    @property
    def n_s(self) -> int:
        return self.bits.shape[0]

    def label(self) -> str:
        """Dash-separated rendering, e.g. ``'1-2-4'``."""
        return "-".join(str(b) for b in self.bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitAllocation) and np.array_equal(self.bits, other.bits)


@dataclass
class AqnmMatrices:
    """Diagonal matrices of the additive quantization noise linearization.

    ``w_alpha`` carries the per-path gains ``1 - f(b_i)``, ``w_one_minus_alpha``
    the ratios ``f(b_i)``, and ``d_q_sq`` the quantization-noise covariance with
    entries ``f(b_i) * (1 - f(b_i)) * l_i`` where ``l_i`` is the per-path input
    power factor.
    """

    w_alpha: np.ndarray
    w_one_minus_alpha: np.ndarray
    d_q_sq: np.ndarray

    @property
    def n_s(self) -> int:
        return self.w_alpha.shape[0]

    @property
    def f_diag(self) -> np.ndarray:
        """Per-path distortion ratios ``f(b_i)`` as a vector."""
        return np.diagonal(self.w_one_minus_alpha).copy()


def build_aqnm(
    table: QuantGainTable,
    b: Optional[BitAllocation],
    l: np.ndarray,
) -> AqnmMatrices:
    """Assemble the AQNM diagonals for a bit allocation and per-path powers ``l``.

    ``b=None`` selects the no-quantization (infinite resolution) mode, modeled
    exactly as ``f = 0``: unit gains and zero quantization-noise covariance.
    Each ``l_i`` must be >= 1 (unit noise floor plus nonnegative signal power).
    """
    l = np.asarray(l, dtype=np.float64)
    if l.ndim != 1:
        raise ValueError("l must be a 1-D vector")
    if np.any(l < 1.0):
        raise ValueError(f"per-path powers must satisfy l_i >= 1, got {l.tolist()}")
    if b is None:
        f_vals = np.zeros(l.shape[0])
    else:
        if b.n_s != l.shape[0]:
            raise ValueError(f"length mismatch: {b.n_s} bit widths vs {l.shape[0]} paths")
        f_vals = np.array([table.f_of(int(bi)) for bi in b.bits])
    return AqnmMatrices(
        w_alpha=np.diag(1.0 - f_vals),
        w_one_minus_alpha=np.diag(f_vals),
        d_q_sq=np.diag((1.0 - f_vals) * f_vals * l),
    )


class LloydMaxConvergenceError(RuntimeError):
    """Raised when the quantizer design iteration fails to reach a fixed point."""


@dataclass
class LloydMaxCodebook:
    """MMSE scalar quantizer for a zero-mean unit-variance Gaussian source.

    ``levels`` are the 2^bits reconstruction points (strictly increasing,
    symmetric about zero) and ``thresholds`` the 2^bits - 1 decision
    boundaries interleaving them. ``distortion`` is the analytic normalized
    mean-square error of the codebook.
    """

    bits: int
    levels: np.ndarray
    thresholds: np.ndarray
    distortion: float

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=np.float64)
        self.thresholds = np.asarray(self.thresholds, dtype=np.float64)
        if self.levels.shape[0] != 2**self.bits:
            raise ValueError("codebook must have 2^bits levels")
        if np.any(np.diff(self.levels) <= 0.0):
            raise ValueError("levels must be strictly increasing")
        if self.thresholds.shape[0] != 2**self.bits - 1:
            raise ValueError("need 2^bits - 1 thresholds")


def _gaussian_cell_moments(edges: np.ndarray):
    """Zeroth, first and second moments of the standard normal over cells.

    ``edges`` has length n+1 and may start/end with +-inf; returns three
    length-n arrays (probability mass, E[x*1_cell], E[x^2*1_cell]).
    """
    finite = np.isfinite(edges)
    pdf = np.zeros_like(edges)
    pdf[finite] = np.exp(-0.5 * edges[finite] ** 2) / np.sqrt(2.0 * np.pi)
    cdf = np.where(edges > 0, 1.0, 0.0)
    cdf[finite] = ndtr(edges[finite])
    xpdf = np.zeros_like(edges)
    xpdf[finite] = edges[finite] * pdf[finite]

    mass = np.diff(cdf)
    m1 = pdf[:-1] - pdf[1:]
    m2 = mass + xpdf[:-1] - xpdf[1:]
    return mass, m1, m2


def design_lloyd_max(bits: int, tol: float = 1e-12, max_iter: int = 10**5) -> LloydMaxCodebook:
    """Design the MMSE quantizer for the unit Gaussian by Lloyd's iteration.

    Alternates the two optimality conditions (levels at cell centroids,
    thresholds at level midpoints) using exact Gaussian cell moments, starting
    from uniform quantiles, until the distortion changes by less than ``tol``.
    """
    if not 1 <= bits <= 5:
        raise ValueError(f"bit width must be in [1, 5], got {bits}")
    n = 2**bits
    levels = ndtri((np.arange(n) + 0.5) / n)
    prev = np.inf
    for _ in range(max_iter):
        thresholds = 0.5 * (levels[:-1] + levels[1:])
        edges = np.concatenate(([-np.inf], thresholds, [np.inf]))
        mass, m1, m2 = _gaussian_cell_moments(edges)
        if np.any(mass <= 0.0):
            raise LloydMaxConvergenceError(f"empty quantizer cell at bits={bits}")
        levels = m1 / mass
        distortion = float(np.sum(m2 - 2.0 * levels * m1 + levels**2 * mass))
        if abs(prev - distortion) < tol:
            thresholds = 0.5 * (levels[:-1] + levels[1:])
            return LloydMaxCodebook(
                bits=bits, levels=levels, thresholds=thresholds, distortion=distortion
            )
        prev = distortion
    raise LloydMaxConvergenceError(f"no fixed point after {max_iter} iterations at bits={bits}")


def quantize_samples(codebook: LloydMaxCodebook, x: np.ndarray) -> np.ndarray:
    """Map samples to their nearest reconstruction level.

    Complex inputs are quantized per real dimension (I and Q independently).
    A sample exactly on a decision threshold maps to the higher (more
    positive) level.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return quantize_samples(codebook, x.real) + 1j * quantize_samples(codebook, x.imag)
    idx = np.searchsorted(codebook.thresholds, x, side="right")
    return codebook.levels[idx]


def empirical_distortion(codebook: LloydMaxCodebook, x: np.ndarray) -> float:
    """Sample estimate of MSE normalized by input power."""
    x = np.asarray(x, dtype=np.float64)
    q = quantize_samples(codebook, x)
    return float(np.mean((x - q) ** 2) / np.mean(x**2))
