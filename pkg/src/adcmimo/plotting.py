"""Capacity-versus-SNR figure rendering for sweep results."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "all1": dict(color="tab:red", marker="v", linestyle="--"),
    "all2": dict(color="tab:orange", marker="^", linestyle="--"),
    "es": dict(color="tab:blue", marker="o", linestyle="-"),
    "kf-es": dict(color="tab:cyan", marker="s", linestyle="-"),
    "proposed": dict(color="tab:green", marker="x", linestyle="-"),
    "inf-uniform": dict(color="black", marker="d", linestyle=":"),
    "inf-waterfill": dict(color="tab:gray", marker="*", linestyle=":"),
}

_LABEL = {
    "all1": "all 1-bit ADCs",
    "all2": "all 2-bit ADCs",
    "es": "exhaustive search",
    "kf-es": "score-based exhaustive search",
    "proposed": "greedy allocation",
    "inf-uniform": "no quantization (uniform power)",
    "inf-waterfill": "no quantization (water-filling)",
}


def render_capacity_figure(rows, path: str, title: str | None = None) -> str:
    """Plot mean capacity per mode against SNR and save the figure to ``path``."""
    modes = list(dict.fromkeys(r.mode for r in rows))
    snrs = sorted({r.snr_db for r in rows})

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for mode in modes:
        means = [
            np.mean([r.capacity_bits for r in rows if r.mode == mode and r.snr_db == s])
            for s in snrs
        ]
        ax.plot(snrs, means, label=_LABEL.get(mode, mode), **_STYLE.get(mode, {}))
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("mean capacity (bits/channel use)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
