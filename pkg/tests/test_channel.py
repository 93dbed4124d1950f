import numpy as np
import pytest

from adcmimo import (
    ChannelParams,
    ChannelRealization,
    RankDeficientChannelError,
    boost_dominant,
    generate_channel,
    normalize_gain,
    truncated_svd,
)
from util import diagonal_realization, make_link


class TestGenerateChannel:
    def test_single_path_matches_hand_evaluation(self):
        # Oracle: evaluate the path-sum formula by hand for one 1x1 path,
        # replaying the documented draw order (gains, arrival, departure).
        seed = 99
        params = ChannelParams(n_t=1, n_r=1, n_clusters=1, n_rays=1, seed=seed)
        real = generate_channel(params)

        rng = np.random.default_rng(seed)
        alpha = (rng.standard_normal(1) + 1j * rng.standard_normal(1)) / np.sqrt(2.0)
        assert real.h.shape == (1, 1)
        assert real.h[0, 0] == alpha[0]
        assert abs(real.h[0, 0]) == pytest.approx(abs(alpha[0]), abs=0.0)

    def test_shape_and_seed_determinism(self):
        params = ChannelParams(seed=1234)
        h1 = generate_channel(params).h
        h2 = generate_channel(params).h
        assert h1.shape == (64, 32)
        assert np.array_equal(h1, h2)

    def test_different_seeds_differ(self):
        h1 = generate_channel(ChannelParams(seed=1)).h
        h2 = generate_channel(ChannelParams(seed=2)).h
        assert not np.allclose(h1, h2)

    def test_zero_paths_rejected(self):
        with pytest.raises(ValueError):
            ChannelParams(n_clusters=0)
        with pytest.raises(ValueError):
            ChannelParams(n_rays=0)

    def test_average_power_matches_normalization(self):
        # E||H||_F^2 = n_t * n_r under the model scaling
        powers = [
            np.linalg.norm(generate_channel(ChannelParams(seed=s)).h) ** 2 for s in range(40)
        ]
        assert np.mean(powers) == pytest.approx(64 * 32, rel=0.15)


class TestBoostDominant:
    def test_boost_one_is_identity(self):
        real, _ = make_link(5, normalize=False)
        same = boost_dominant(real, 1.0)
        assert np.linalg.norm(same.h - real.h) / np.linalg.norm(real.h) <= 1e-10

    def test_boost_scales_top_singular_value(self):
        real = generate_channel(ChannelParams(seed=17))
        s_before = np.linalg.svd(real.h, compute_uv=False)
        boosted = boost_dominant(real, 3.0)
        s_after = np.linalg.svd(boosted.h, compute_uv=False)
        assert s_after[0] == pytest.approx(3.0 * s_before[0], rel=1e-8)

    def test_boost_preserves_trailing_spectrum(self):
        real = generate_channel(ChannelParams(seed=21))
        s_before = np.linalg.svd(real.h, compute_uv=False)
        s_after = np.linalg.svd(boost_dominant(real, 2.5).h, compute_uv=False)
        assert np.all(np.abs(s_after[1:] - s_before[1:]) <= 1e-8 * s_before[1:])

    def test_diagonal_case_by_inspection(self):
        real = diagonal_realization([4.0, 1.0])
        boosted = boost_dominant(real, 2.0)
        assert np.allclose(boosted.h, np.diag([8.0, 1.0]), atol=1e-12)

    def test_boost_below_one_rejected(self):
        real = diagonal_realization([4.0, 1.0])
        with pytest.raises(ValueError):
            boost_dominant(real, 0.5)


class TestTruncatedSvd:
    def test_identity_channel(self):
        real = diagonal_realization([1.0, 1.0, 1.0, 1.0])
        svd = truncated_svd(real, 2)
        assert np.allclose(svd.sigma, [1.0, 1.0])

    def test_rectangular_diagonal(self):
        h = np.zeros((4, 3), dtype=np.complex128)
        h[0, 0], h[1, 1], h[2, 2] = 3.0, 2.0, 1.0
        real = ChannelRealization(h=h, params=ChannelParams(n_t=3, n_r=4, seed=0))
        svd = truncated_svd(real, 2)
        assert np.allclose(svd.sigma, [3.0, 2.0])

    def test_left_vectors_orthonormal(self):
        _, svd = make_link(33, n_s=8)
        gram = svd.u.conj().T @ svd.u
        assert np.max(np.abs(gram - np.eye(8))) <= 1e-10

    def test_factors_reconstruct_best_approximation(self):
        real, svd = make_link(41, n_s=8, normalize=False)
        # oracle: numpy's own full SVD truncated to rank 8
        u, s, vh = np.linalg.svd(real.h, full_matrices=False)
        best = (u[:, :8] * s[:8]) @ vh[:8]
        ours = (svd.u * svd.sigma) @ svd.f_opt.conj().T
        assert np.linalg.norm(ours - best) / np.linalg.norm(best) <= 1e-8

    def test_diagonalization_identity(self):
        real, svd = make_link(7, n_s=8)
        d = svd.u.conj().T @ real.h @ svd.f_opt
        err = np.linalg.norm(d - np.diag(svd.sigma)) / np.linalg.norm(np.diag(svd.sigma))
        assert err <= 1e-8

    def test_rank_deficiency_is_distinct_error(self):
        h = np.outer(np.ones(4), np.ones(3)).astype(np.complex128)
        real = ChannelRealization(h=h, params=ChannelParams(n_t=3, n_r=4, seed=0))
        with pytest.raises(RankDeficientChannelError):
            truncated_svd(real, 2)

    def test_n_s_out_of_range(self):
        real = diagonal_realization([2.0, 1.0])
        with pytest.raises(ValueError):
            truncated_svd(real, 3)


class TestNormalizeGain:
    def test_unit_mean_eigenchannel_power(self):
        real, svd = make_link(3, n_s=8)
        assert np.mean(svd.sigma**2) == pytest.approx(1.0, abs=1e-12)

    def test_relative_spectrum_preserved(self):
        real, _ = make_link(3, n_s=8, normalize=False)
        s_raw = np.linalg.svd(real.h, compute_uv=False)
        s_norm = np.linalg.svd(normalize_gain(real, 8).h, compute_uv=False)
        ratio = s_norm / s_raw
        assert np.allclose(ratio, ratio[0], rtol=1e-12)
