"""Bit-allocation selection under a receiver ADC power budget.

Enumerates the feasible allocations (per-path widths 1..4 whose total ADC
power fits the budget), selects allocations by exhaustive capacity search, by
exhaustive search over the separable per-path score, and by a greedy
marginal-gain-per-watt algorithm, while tallying the objective-evaluation
arithmetic so the search strategies' costs can be compared.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import metrics
from .channel import ChannelRealization, SvdTriple
from .quantization import DEFAULT_TABLE, BitAllocation, QuantGainTable, build_aqnm
from .receiver import (
    POWER_SPLIT_UNIFORM,
    CombinerSet,
    EffectiveModel,
    SignalConfig,
    build_combiners,
    effective_model,
    path_gains,
)

MAX_SEARCH_BITS = 4

# Arithmetic charged per evaluation of one path's score q(b_i); the same
# convention is applied to every search strategy so counter ratios are
# meaningful. Logarithms and comparisons are not charged as mults/adds;
# comparisons are tallied separately as real additions.
Q_EVAL_MULTS = 4
Q_EVAL_ADDS = 2


class FeasibleSetTooLargeError(ValueError):
    """Raised when exhaustive enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class PowerBudget:
    """ADC power model: ``c`` joules per conversion step, sampling rate ``f_s``,
    and total budget ``p_adc``. A ``b``-bit converter draws ``c * f_s * 2^b``."""

    c: float = 1.0
    f_s: float = 1.0
    p_adc: float = 1.0

    def __post_init__(self):
        if self.c <= 0.0 or self.f_s <= 0.0 or self.p_adc <= 0.0:
            raise ValueError("power budget parameters must be positive")

    def total_power(self, bits: np.ndarray) -> float:
        """Total ADC power of an allocation; the step sum is exact in integers."""
        bits = np.asarray(bits, dtype=np.int64)
        return self.c * self.f_s * float(np.sum(2**bits))

    @classmethod
    def uniform(cls, n_s: int, bits: int, c: float = 1.0, f_s: float = 1.0) -> "PowerBudget":
        """Budget equal to the power of a uniform ``bits``-wide allocation."""
        return cls(c=c, f_s=f_s, p_adc=c * f_s * float(n_s * 2**bits))


@dataclass
class OpCounter:
    """Tally of objective-evaluation arithmetic during a search."""

    mults: int = 0
    adds: int = 0
    real_adds: int = 0

    def __iadd__(self, other: "OpCounter") -> "OpCounter":
        self.mults += other.mults
        self.adds += other.adds
        self.real_adds += other.real_adds
        return self


@dataclass
class FeasibleSet:
    """All power-feasible allocations, in lexicographic order, as int rows."""

    allocations: np.ndarray
    budget: PowerBudget

    def __len__(self) -> int:
        return self.allocations.shape[0]

    def __iter__(self) -> Iterator[BitAllocation]:
        for row in self.allocations:
            yield BitAllocation(row.copy())


def enumerate_bset(n_s: int, budget: PowerBudget, max_size: int = 4**12) -> FeasibleSet:
    """Enumerate every allocation with widths in 1..4 whose power fits the budget.

    Depth-first with budget pruning, so the output is lexicographically
    ordered and only feasible prefixes are visited. Refuses stream counts
    whose full 4^n_s grid exceeds ``max_size``: exhaustive search is not meant
    for them.
    """
    if n_s < 1:
        raise ValueError(f"n_s must be >= 1, got {n_s}")
    if 4**n_s > max_size:
        warnings.warn(
            f"4^{n_s} allocations exceed the enumeration cap {max_size}; "
            "use the greedy allocator for this many streams",
            stacklevel=2,
        )
        raise FeasibleSetTooLargeError(f"4^{n_s} exceeds enumeration cap {max_size}")

    unit = budget.c * budget.f_s
    out: list[tuple[int, ...]] = []
    prefix = [0] * n_s

    def extend(depth: int, step_units: int):
        remaining_min = 2 * (n_s - depth - 1)
        for b in range(1, MAX_SEARCH_BITS + 1):
            units = step_units + (1 << b)
            if unit * (units + remaining_min) > budget.p_adc:
                break  # costs grow with b, deeper widths cannot fit either
            prefix[depth] = b
            if depth == n_s - 1:
                out.append(tuple(prefix))
            else:
                extend(depth + 1, units)

    extend(0, 0)
    alloc = np.array(out, dtype=np.int64) if out else np.empty((0, n_s), dtype=np.int64)
    return FeasibleSet(allocations=alloc, budget=budget)


@dataclass
class ModelFactory:
    """Builds effective models for candidate allocations on one fixed link.

    Channel, combiners, signal levels and the distortion table are fixed at
    construction; candidates differ only in their bit allocation. For ideal
    combiner mode the per-path score table is precomputed so batch objective
    evaluation over a feasible set is vectorized.
    """

    svd: SvdTriple
    realization: ChannelRealization
    sig: SignalConfig
    table: QuantGainTable = field(default_factory=lambda: DEFAULT_TABLE)
    mode: str = "ideal"
    power_split: str = POWER_SPLIT_UNIFORM

    def __post_init__(self):
        self.combiners: CombinerSet = build_combiners(self.svd, mode=self.mode)
        self.l: np.ndarray = path_gains(self.combiners.w_a_h, self.realization.h)
        self._q_cols: Optional[np.ndarray] = None

    @property
    def n_s(self) -> int:
        return self.svd.n_s

    @property
    def p_stream(self) -> float:
        return self.sig.p / self.n_s if self.power_split == POWER_SPLIT_UNIFORM else self.sig.p

    def build(self, b: Optional[BitAllocation]) -> EffectiveModel:
        """Full effective model for one allocation (``None`` = no quantization)."""
        aqnm = build_aqnm(self.table, b, self.l)
        return effective_model(
            self.svd,
            self.combiners,
            aqnm,
            self.sig,
            self.realization,
            allocation=b,
            power_split=self.power_split,
        )

    def q_columns(self) -> np.ndarray:
        """Per-path score table; entry ``[i, b-1]`` is ``q_i`` at width ``b``."""
        if self._q_cols is None:
            bits = range(1, MAX_SEARCH_BITS + 1)
            f = np.array([self.table.f_of(b) for b in bits])
            self._q_cols = (
                self.p_stream
                * self.svd.sigma[:, None] ** 2
                / (self.sig.sigma_n_sq + f[None, :] * self.l[:, None] / (1.0 - f[None, :]))
            )
        return self._q_cols

    def kf_values(self, allocations: np.ndarray) -> np.ndarray:
        """Separable score of each allocation row (vectorized)."""
        q = self.q_columns()
        rows = np.arange(self.n_s)
        return q[rows[None, :], allocations - 1].sum(axis=1)

    def capacity_values(self, allocations: np.ndarray) -> np.ndarray:
        """Capacity of each allocation row.

        Ideal mode uses the per-path closed form (equal to the determinant
        form there); otherwise each candidate is evaluated through the full
        model.
        """
        if self.mode == "ideal":
            q = self.q_columns()
            rows = np.arange(self.n_s)
            return np.log2(1.0 + q[rows[None, :], allocations - 1]).sum(axis=1)
        return np.array(
            [metrics.capacity(self.build(BitAllocation(row))).capacity_bits for row in allocations]
        )


def _candidate_counter(n_candidates: int, n_s: int, per_path_adds_extra: int) -> OpCounter:
    """Counter for evaluating a separable objective over enumerated candidates."""
    return OpCounter(
        mults=n_candidates * n_s * Q_EVAL_MULTS,
        adds=n_candidates * ((Q_EVAL_ADDS + per_path_adds_extra) * n_s + n_s - 1),
        real_adds=max(0, n_candidates - 1),
    )


def exhaustive_search_capacity(factory: ModelFactory, fset: FeasibleSet):
    """Capacity-maximizing allocation over the feasible set.

    Ties resolve to the lexicographically smallest allocation. Returns the
    winner, its full capacity report, and the evaluation-cost tally.
    """
    if len(fset) == 0:
        raise ValueError("feasible set is empty")
    caps = factory.capacity_values(fset.allocations)
    counter = _candidate_counter(len(fset), factory.n_s, per_path_adds_extra=1)
    best = BitAllocation(fset.allocations[int(np.argmax(caps))].copy())
    return best, metrics.capacity(factory.build(best)), counter


def exhaustive_search_kf(factory: ModelFactory, fset: FeasibleSet):
    """Allocation maximizing the separable per-path score over the feasible set.

    Same tie-break rule as the capacity search. Returns the winner, its score,
    and the evaluation-cost tally.
    """
    if len(fset) == 0:
        raise ValueError("feasible set is empty")
    kfs = factory.kf_values(fset.allocations)
    counter = _candidate_counter(len(fset), factory.n_s, per_path_adds_extra=0)
    idx = int(np.argmax(kfs))
    return BitAllocation(fset.allocations[idx].copy()), float(kfs[idx]), counter


def greedy_allocate(factory: ModelFactory, budget: PowerBudget):
    """Greedy bit allocation: repeatedly buy the best score gain per watt.

    Starting from one bit everywhere, each round evaluates the score increase
    of adding one bit to each path, divided by the extra ADC power that bit
    costs, and increments the best path (smallest index on ties). Stops when
    no increment fits the budget or every path is at the 4-bit width cap.
    """
    n_s = factory.n_s
    bits = np.ones(n_s, dtype=np.int64)
    used = budget.total_power(bits)
    if used > budget.p_adc:
        raise ValueError(
            f"all-ones allocation already needs {used:.4g} W against budget {budget.p_adc:.4g} W"
        )
    q = factory.q_columns()
    counter = OpCounter(mults=n_s * Q_EVAL_MULTS, adds=n_s * Q_EVAL_ADDS)

    while True:
        best_idx = -1
        best_gain = -np.inf
        n_compared = 0
        for i in range(n_s):
            if bits[i] >= MAX_SEARCH_BITS:
                continue
            step_power = budget.c * budget.f_s * float(2 ** bits[i])
            if used + step_power > budget.p_adc:
                continue
            gain = (q[i, bits[i]] - q[i, bits[i] - 1]) / step_power
            counter.mults += Q_EVAL_MULTS + 1
            counter.adds += Q_EVAL_ADDS + 1
            n_compared += 1
            if gain > best_gain:
                best_gain = gain
                best_idx = i
        counter.real_adds += max(0, n_compared - 1)
        if best_idx < 0:
            return BitAllocation(bits), counter
        used += budget.c * budget.f_s * float(2 ** bits[best_idx])
        bits[best_idx] += 1
