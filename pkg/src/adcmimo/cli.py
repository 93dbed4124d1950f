"""Command-line front end: flag/file configuration parsing and sweep driving.

Precedence is command-line flag over config-file value over built-in default.
The config file is flat ``key=value`` text mirroring the flag names (without
leading dashes); ``#`` starts a comment. Distortion-table overrides use the
file-only keys ``fb1``..``fb5``, and ``normalize-gain=0`` disables the
unit-mean eigenchannel gain normalization.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .allocation import PowerBudget
from .channel import ChannelParams
from .quantization import DEFAULT_TABLE, QuantGainTable
from .sweep import DEFAULT_MODES, MODES, SweepConfig, run_sweep


class ConfigError(ValueError):
    """Invalid, contradictory, or out-of-range configuration input."""


_INT_KEYS = ("nt", "nr", "ns", "clusters", "rays", "trials", "seed", "padc-uniform-bits")
_FLOAT_KEYS = ("boost", "snr-start-db", "snr-end-db", "snr-step-db", "c", "fs", "padc",
               "fb1", "fb2", "fb3", "fb4", "fb5")
_STR_KEYS = ("modes", "out", "fig")
_BOOL_KEYS = ("normalize-gain", "no-fig")

DEFAULTS = {
    "nt": 32,
    "nr": 64,
    "ns": 8,
    "clusters": 4,
    "rays": 10,
    "boost": 3.0,
    "snr-start-db": -20.0,
    "snr-end-db": 20.0,
    "snr-step-db": 5.0,
    "trials": 50,
    "modes": ",".join(DEFAULT_MODES),
    "c": 1.0,
    "fs": 1.0,
    "padc": None,
    "padc-uniform-bits": 2,
    "seed": 12345,
    "out": "sweep.csv",
    "fig": None,
    "no-fig": False,
    "normalize-gain": True,
    # file-only keys: distortion-table overrides per bit width
    "fb1": None,
    "fb2": None,
    "fb3": None,
    "fb4": None,
    "fb5": None,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adcmimo-sweep",
        description="Monte-Carlo capacity sweep over ADC bit-allocation strategies.",
    )
    p.add_argument("--nt", type=int, help="transmit antennas (default 32)")
    p.add_argument("--nr", type=int, help="receive antennas (default 64)")
    p.add_argument("--ns", type=int, help="data streams / RF paths (default 8)")
    p.add_argument("--clusters", type=int, help="scattering clusters (default 4)")
    p.add_argument("--rays", type=int, help="rays per cluster (default 10)")
    p.add_argument("--boost", type=float, help="dominant singular-value multiplier (default 3)")
    p.add_argument("--snr-start-db", type=float, help="sweep start SNR in dB (default -20)")
    p.add_argument("--snr-end-db", type=float, help="sweep end SNR in dB (default 20)")
    p.add_argument("--snr-step-db", type=float, help="sweep SNR step in dB (default 5)")
    p.add_argument("--trials", type=int, help="Monte-Carlo channel draws (default 50)")
    p.add_argument("--modes", type=str, help=f"comma list from {','.join(MODES)}")
    p.add_argument("--c", type=float, help="ADC energy per conversion step (default 1)")
    p.add_argument("--fs", type=float, help="ADC sampling rate (default 1)")
    p.add_argument("--padc", type=float, help="absolute ADC power budget")
    p.add_argument(
        "--padc-uniform-bits",
        type=int,
        help="budget equals the power of this uniform bit width (default 2)",
    )
    p.add_argument("--seed", type=int, help="master RNG seed (default 12345)")
    p.add_argument("--config", type=str, help="flat key=value config file")
    p.add_argument("--out", type=str, help="output CSV path (default sweep.csv)")
    p.add_argument("--fig", type=str, help="figure path (default: CSV path with .png)")
    p.add_argument("--no-fig", action="store_true", default=None, help="skip figure rendering")
    return p


def _parse_file(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _convert(key, val, where=f"{path}:{lineno}")
    return values


def _convert(key: str, val: str, where: str):
    try:
        if key in _INT_KEYS:
            return int(val)
        if key in _FLOAT_KEYS:
            return float(val)
        if key in _BOOL_KEYS:
            low = val.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {val!r}")
        return val
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from exc


def _snr_grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0.0:
        raise ConfigError(f"snr-step-db must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"snr-end-db {stop} below snr-start-db {start}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def parse_config(argv: Optional[Sequence[str]] = None) -> SweepConfig:
    """Resolve flags, optional config file and defaults into a SweepConfig."""
    args = _build_parser().parse_args(argv)

    flag_vals = {}
    for key in DEFAULTS:
        attr = key.replace("-", "_")
        val = getattr(args, attr, None)
        if val is not None:
            flag_vals[key] = val

    file_vals = _parse_file(args.config) if args.config else {}

    explicit = {**file_vals, **flag_vals}
    merged = {**DEFAULTS, **explicit}

    if "padc" in explicit and "padc-uniform-bits" in explicit:
        raise ConfigError("give either padc or padc-uniform-bits, not both")

    for key in ("nt", "nr", "ns", "clusters", "rays", "trials"):
        if merged[key] < 1:
            raise ConfigError(f"{key} must be >= 1, got {merged[key]}")
    if merged["seed"] < 0:
        raise ConfigError(f"seed must be non-negative, got {merged['seed']}")

    modes = tuple(m.strip() for m in str(merged["modes"]).split(",") if m.strip())
    if not modes:
        raise ConfigError("modes list is empty")

    table = DEFAULT_TABLE
    overrides = {int(k[2]): merged[k] for k in ("fb1", "fb2", "fb3", "fb4", "fb5") if k in explicit}
    if overrides:
        try:
            table = QuantGainTable({**DEFAULT_TABLE.f, **overrides})
        except ValueError as exc:
            raise ConfigError(f"bad distortion-table override: {exc}") from exc

    if "padc" in explicit:
        budget = PowerBudget(c=merged["c"], f_s=merged["fs"], p_adc=merged["padc"])
    else:
        bits = merged["padc-uniform-bits"]
        if not 1 <= bits <= 4:
            raise ConfigError(f"padc-uniform-bits must be in [1, 4], got {bits}")
        budget = PowerBudget.uniform(merged["ns"], bits, c=merged["c"], f_s=merged["fs"])

    out = merged["out"]
    if merged["no-fig"]:
        fig = None
    elif merged["fig"] is not None:
        fig = merged["fig"]
    else:
        fig = os.path.splitext(out)[0] + ".png"

    try:
        channel = ChannelParams(
            n_t=merged["nt"],
            n_r=merged["nr"],
            n_clusters=merged["clusters"],
            n_rays=merged["rays"],
            boost=merged["boost"],
            seed=0,
        )
        return SweepConfig(
            channel=channel,
            n_s=merged["ns"],
            snr_db_grid=_snr_grid(merged["snr-start-db"], merged["snr-end-db"],
                                  merged["snr-step-db"]),
            trials=merged["trials"],
            modes=modes,
            budget=budget,
            seed=merged["seed"],
            output_path=out,
            fig_path=fig,
            normalize=merged["normalize-gain"],
            table=table,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
        result = run_sweep(config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.summary)
    print(f"wrote {result.csv_path}" + (f" and {result.fig_path}" if result.fig_path else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
