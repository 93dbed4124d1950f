import numpy as np
import pytest

from adcmimo import (
    DEFAULT_TABLE,
    BitAllocation,
    SignalConfig,
    SvdTriple,
    assemble_model,
    build_aqnm,
    build_combiners,
    effective_model,
    path_gains,
    simulate_received,
    verify_cscg,
)
from adcmimo.receiver import simulate_noise
from util import diagonal_realization, make_link, make_model


class TestSignalConfig:
    def test_rho(self):
        sig = SignalConfig(p=2.0, sigma_n_sq=0.5)
        assert sig.rho == 4.0

    def test_from_snr_db(self):
        sig = SignalConfig.from_snr_db(10.0)
        assert sig.rho == pytest.approx(10.0, rel=1e-12)

    @pytest.mark.parametrize("kwargs", [dict(p=0.0), dict(sigma_n_sq=-1.0)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SignalConfig(**kwargs)


class TestBuildCombiners:
    def test_ideal_cascade_equals_adjoint_basis(self):
        _, svd = make_link(11, n_s=8)
        comb = build_combiners(svd, mode="ideal")
        assert np.array_equal(comb.w_d_h @ comb.w_a_h, svd.u.conj().T)
        assert comb.residual == 0.0

    def test_constant_modulus_column_exact(self):
        # an all-equal positive real singular vector is already unit-modulus
        n_r = 16
        u = np.full((n_r, 1), 1.0 / np.sqrt(n_r), dtype=np.complex128)
        svd = SvdTriple(u=u, sigma=np.array([2.0]), f_opt=np.ones((4, 1)) / 2.0)
        comb = build_combiners(svd, mode="phase-constrained")
        assert np.allclose(comb.w_a_h, u.conj().T, atol=1e-15)
        assert comb.residual <= 1e-12

    def test_constrained_matches_independent_least_squares(self):
        _, svd = make_link(12, n_s=8)
        comb = build_combiners(svd, mode="phase-constrained")
        n_r = svd.u.shape[0]
        assert np.allclose(np.abs(comb.w_a_h), 1.0 / np.sqrt(n_r), atol=1e-12)
        # oracle: numpy's lstsq on the same misfit problem
        w_a = comb.w_a_h.conj().T
        x, *_ = np.linalg.lstsq(w_a, svd.u, rcond=None)
        oracle_residual = np.linalg.norm(w_a @ x - svd.u)
        assert comb.residual == pytest.approx(oracle_residual, rel=1e-8)
        # the least-squares solution cannot be beaten
        assert comb.residual <= oracle_residual + 1e-12

    def test_residual_tolerance_enforced(self):
        _, svd = make_link(12, n_s=8)
        with pytest.raises(ValueError):
            build_combiners(svd, mode="phase-constrained", residual_tol=1e-6)

    def test_unknown_mode(self):
        _, svd = make_link(12, n_s=4)
        with pytest.raises(ValueError):
            build_combiners(svd, mode="analog-only")


class TestEffectiveModel:
    def test_ideal_path_gains_are_one_plus_sigma_sq(self):
        real, svd = make_link(13, n_s=8)
        model = make_model(13, [2] * 8)
        assert np.allclose(model.l, 1.0 + svd.sigma**2, atol=1e-10)
        # oracle: direct diagonal of the combined channel Gram matrix
        combined = svd.u.conj().T @ real.h
        direct = 1.0 + np.einsum("ij,ij->i", combined, combined.conj()).real
        assert np.allclose(path_gains(svd.u.conj().T, real.h), direct, atol=0.0)

    def test_zero_distortion_reduces_to_unquantized_link(self):
        real, svd = make_link(14, n_s=6)
        sig = SignalConfig.from_snr_db(3.0)
        model = assemble_model(svd, real, None, sig)
        assert np.allclose(model.k, np.diag(svd.sigma), atol=1e-12)
        assert np.allclose(model.phi, sig.sigma_n_sq * np.eye(6), atol=1e-12)

    def test_single_path_noise_power_hand_value(self):
        # sigma_1 = 2, one-bit ADC, unit thermal noise: the effective noise
        # power is sigma_n^2 (1-f)^2 + f (1-f) (1 + sigma_1^2)
        real = diagonal_realization([2.0])
        svd = SvdTriple(
            u=np.eye(1, dtype=np.complex128),
            sigma=np.array([2.0]),
            f_opt=np.eye(1, dtype=np.complex128),
        )
        sig = SignalConfig(p=1.0, sigma_n_sq=1.0)
        model = assemble_model(svd, real, BitAllocation([1]), sig)
        f = 0.3634
        expected = 1.0 * (1 - f) ** 2 + f * (1 - f) * 5.0
        assert model.l[0] == pytest.approx(5.0, abs=1e-12)
        assert model.phi[0, 0].real == pytest.approx(expected, abs=1e-12)

    def test_phi_matches_independent_reassembly(self):
        for mode in ("ideal", "phase-constrained"):
            real, svd = make_link(15, n_s=6)
            comb = build_combiners(svd, mode=mode)
            l = path_gains(comb.w_a_h, real.h)
            b = BitAllocation([1, 2, 3, 4, 2, 1])
            aqnm = build_aqnm(DEFAULT_TABLE, b, l)
            sig = SignalConfig.from_snr_db(5.0)
            model = effective_model(svd, comb, aqnm, sig, real, allocation=b)
            phi_oracle = (
                sig.sigma_n_sq * model.g @ model.g.conj().T
                + comb.w_d_h @ aqnm.d_q_sq @ comb.w_d_h.conj().T
            )
            assert np.max(np.abs(model.phi - phi_oracle)) <= 1e-12

    def test_ideal_phi_diagonal_and_k_invertible(self):
        model = make_model(16, [1, 2, 3, 4, 1, 2, 3, 4], snr_db=10.0)
        off = model.phi - np.diag(np.diag(model.phi))
        assert np.max(np.abs(off)) <= 1e-12 * np.max(np.abs(model.phi))
        assert np.isfinite(np.linalg.cond(model.k))

    def test_power_split_recorded(self):
        real, svd = make_link(17, n_s=4)
        sig = SignalConfig(p=1.0, sigma_n_sq=1.0)
        uniform = assemble_model(svd, real, None, sig)
        per_stream = assemble_model(svd, real, None, sig, power_split="per-stream")
        assert uniform.p == pytest.approx(0.25)
        assert per_stream.p == pytest.approx(1.0)
        assert uniform.power_convention != per_stream.power_convention


class TestSimulation:
    def test_received_covariance_matches_model(self):
        model = make_model(18, [2] * 8, snr_db=0.0)
        x, y = simulate_received(model, 10**5, seed=42)
        cov_hat = y.T @ y.conj() / y.shape[0]
        cov_model = model.p * model.k @ model.k.conj().T + model.phi
        err = np.linalg.norm(cov_hat - cov_model) / np.linalg.norm(cov_model)
        assert err <= 0.05

    def test_noise_free_is_exact_linear_map(self):
        model = make_model(18, [2] * 4, snr_db=0.0)
        x, y = simulate_received(model, 100, seed=1, thermal_scale=0.0, quant_scale=0.0)
        assert np.array_equal(y, x @ model.k.T)

    def test_seed_determinism(self):
        model = make_model(19, [3] * 4)
        x1, y1 = simulate_received(model, 500, seed=9)
        x2, y2 = simulate_received(model, 500, seed=9)
        assert np.array_equal(x1, x2) and np.array_equal(y1, y2)

    def test_sample_count_validated(self):
        model = make_model(19, [3] * 4)
        with pytest.raises(ValueError):
            simulate_received(model, 0, seed=1)


class TestVerifyCscg:
    def test_statistics_within_monte_carlo_tolerance(self):
        model = make_model(20, [1, 2, 3, 4, 1, 2, 3, 4], snr_db=0.0)
        report = verify_cscg(model, 10**5, seed=5)
        assert report.cov_err <= 0.05
        assert report.pseudo_cov_ratio <= 0.05

    def test_forced_zero_components_give_exact_zero(self):
        model = make_model(20, [2] * 4)
        report = verify_cscg(model, 10**4, seed=5, thermal_scale=0.0, quant_scale=0.0)
        assert report.cov_err == 0.0
        assert report.pseudo_cov_ratio == 0.0

    def test_sample_floor_enforced(self):
        model = make_model(20, [2] * 4)
        with pytest.raises(ValueError):
            verify_cscg(model, 10**3, seed=5)

    def test_noise_sampler_determinism(self):
        model = make_model(21, [2] * 4)
        a = simulate_noise(model, 100, np.random.default_rng(3))
        b = simulate_noise(model, 100, np.random.default_rng(3))
        assert np.array_equal(a, b)
