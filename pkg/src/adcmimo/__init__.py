"""Capacity analysis and ADC bit allocation for quantized massive-MIMO receivers.

The library models a mmWave MIMO link whose receiver applies a hybrid
combiner and per-RF-path ADCs of configurable resolution, linearized by the
additive quantization noise model. It computes link capacity and the
Cramer-Rao lower bound of the symbol estimate, selects per-path ADC bit
widths under a receiver power budget (exhaustively, by a separable score, or
greedily), and ships a seeded Monte-Carlo SNR sweep CLI.
"""

from .allocation import (
    FeasibleSet,
    FeasibleSetTooLargeError,
    ModelFactory,
    OpCounter,
    PowerBudget,
    enumerate_bset,
    exhaustive_search_capacity,
    exhaustive_search_kf,
    greedy_allocate,
)
from .channel import (
    ChannelParams,
    ChannelRealization,
    RankDeficientChannelError,
    SvdTriple,
    boost_dominant,
    generate_channel,
    normalize_gain,
    truncated_svd,
)
from .metrics import (
    CapacityReport,
    CrlbResult,
    capacity,
    capacity_infinite_uniform,
    capacity_infinite_waterfill,
    crlb,
    k_f_sum,
    q_of_b,
)
from .quantization import (
    DEFAULT_TABLE,
    AqnmMatrices,
    BitAllocation,
    LloydMaxCodebook,
    LloydMaxConvergenceError,
    QuantGainTable,
    build_aqnm,
    design_lloyd_max,
    f_of_b,
    quantize_samples,
)
from .receiver import (
    CombinerSet,
    CscgReport,
    EffectiveModel,
    SignalConfig,
    assemble_model,
    build_combiners,
    effective_model,
    path_gains,
    simulate_received,
    verify_cscg,
)
from .sweep import MODES, SweepConfig, SweepResult, SweepRow, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AqnmMatrices",
    "BitAllocation",
    "CapacityReport",
    "ChannelParams",
    "ChannelRealization",
    "CombinerSet",
    "CrlbResult",
    "CscgReport",
    "DEFAULT_TABLE",
    "EffectiveModel",
    "FeasibleSet",
    "FeasibleSetTooLargeError",
    "LloydMaxCodebook",
    "LloydMaxConvergenceError",
    "MODES",
    "ModelFactory",
    "OpCounter",
    "PowerBudget",
    "QuantGainTable",
    "RankDeficientChannelError",
    "SignalConfig",
    "SvdTriple",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "assemble_model",
    "boost_dominant",
    "build_aqnm",
    "build_combiners",
    "capacity",
    "capacity_infinite_uniform",
    "capacity_infinite_waterfill",
    "crlb",
    "design_lloyd_max",
    "effective_model",
    "enumerate_bset",
    "exhaustive_search_capacity",
    "exhaustive_search_kf",
    "f_of_b",
    "generate_channel",
    "greedy_allocate",
    "k_f_sum",
    "normalize_gain",
    "path_gains",
    "q_of_b",
    "quantize_samples",
    "run_sweep",
    "simulate_received",
    "truncated_svd",
    "verify_cscg",
]
