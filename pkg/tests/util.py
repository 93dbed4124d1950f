"""Shared helpers for building seeded test links and models."""

import numpy as np

from adcmimo import (
    BitAllocation,
    ChannelParams,
    ChannelRealization,
    SignalConfig,
    SvdTriple,
    assemble_model,
    boost_dominant,
    generate_channel,
    normalize_gain,
    truncated_svd,
)


def make_link(seed, n_s=8, normalize=True, boost=3.0, n_t=32, n_r=64):
    """One boosted (and by default gain-normalized) channel plus its truncated SVD."""
    params = ChannelParams(n_t=n_t, n_r=n_r, boost=boost, seed=seed)
    real = boost_dominant(generate_channel(params), boost)
    if normalize:
        real = normalize_gain(real, n_s)
    return real, truncated_svd(real, n_s)


def make_model(seed, bits, snr_db=0.0, n_s=None, normalize=True):
    """Ideal-mode effective model for an explicit per-path bit vector."""
    bits = np.asarray(bits, dtype=np.int64)
    n_s = bits.shape[0] if n_s is None else n_s
    real, svd = make_link(seed, n_s=n_s, normalize=normalize)
    sig = SignalConfig.from_snr_db(snr_db)
    return assemble_model(svd, real, BitAllocation(bits), sig)


def diagonal_realization(diag_entries):
    """Channel whose matrix is an explicit square diagonal."""
    diag_entries = np.asarray(diag_entries, dtype=np.float64)
    n = diag_entries.shape[0]
    params = ChannelParams(n_t=n, n_r=n, n_clusters=1, n_rays=1, seed=0)
    return ChannelRealization(h=np.diag(diag_entries).astype(np.complex128), params=params)


def svd_from_sigma(sigma, n_r=None, n_t=None):
    """SvdTriple with prescribed singular values and canonical-basis vectors."""
    sigma = np.asarray(sigma, dtype=np.float64)
    n_s = sigma.shape[0]
    n_r = n_s if n_r is None else n_r
    n_t = n_s if n_t is None else n_t
    u = np.eye(n_r, n_s, dtype=np.complex128)
    f_opt = np.eye(n_t, n_s, dtype=np.complex128)
    return SvdTriple(u=u, sigma=sigma, f_opt=f_opt)
