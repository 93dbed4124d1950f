import numpy as np
import pytest

from adcmimo import (
    DEFAULT_TABLE,
    BitAllocation,
    QuantGainTable,
    build_aqnm,
    design_lloyd_max,
    f_of_b,
    quantize_samples,
)
from adcmimo.quantization import DISTORTION_RATIOS, empirical_distortion


class TestGainTable:
    def test_default_values(self):
        assert f_of_b(DEFAULT_TABLE, 1) == 0.3634
        assert f_of_b(DEFAULT_TABLE, 4) == 0.009497
        assert DEFAULT_TABLE.bit_widths == (1, 2, 3, 4, 5)

    @pytest.mark.parametrize("bad", [0, 6, -1])
    def test_out_of_domain_rejected(self, bad):
        with pytest.raises(ValueError):
            f_of_b(DEFAULT_TABLE, bad)

    def test_strictly_decreasing_enforced(self):
        with pytest.raises(ValueError):
            QuantGainTable({1: 0.3, 2: 0.3})
        with pytest.raises(ValueError):
            QuantGainTable({1: 0.3, 2: 1.2})

    def test_override_allowed(self):
        table = QuantGainTable({**DISTORTION_RATIOS, 1: 0.5})
        assert table.f_of(1) == 0.5


class TestBitAllocation:
    def test_label(self):
        assert BitAllocation([1, 2, 4]).label() == "1-2-4"

    @pytest.mark.parametrize("bad", [[0, 1], [1, 6], []])
    def test_domain_enforced(self, bad):
        with pytest.raises(ValueError):
            BitAllocation(bad)


class TestBuildAqnm:
    def test_two_bit_unit_power_entry(self):
        # oracle: hand multiplication of the tabulated ratio
        aqnm = build_aqnm(DEFAULT_TABLE, BitAllocation([2]), np.array([1.0]))
        assert aqnm.d_q_sq[0, 0] == pytest.approx(0.1175 * 0.8825, abs=1e-12)

    def test_mixed_allocation(self):
        aqnm = build_aqnm(DEFAULT_TABLE, BitAllocation([1, 4]), np.array([2.0, 2.0]))
        expected = np.array([0.3634 * (1 - 0.3634) * 2.0, 0.009497 * (1 - 0.009497) * 2.0])
        assert np.allclose(np.diag(aqnm.d_q_sq), expected, atol=1e-12)
        assert np.allclose(np.diag(aqnm.w_alpha), [1 - 0.3634, 1 - 0.009497])

    def test_no_quantization_mode(self):
        aqnm = build_aqnm(DEFAULT_TABLE, None, np.array([1.0, 5.0]))
        assert np.array_equal(aqnm.w_alpha, np.eye(2))
        assert np.array_equal(aqnm.d_q_sq, np.zeros((2, 2)))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            build_aqnm(DEFAULT_TABLE, BitAllocation([1, 2]), np.array([1.0]))

    def test_l_below_one_rejected(self):
        with pytest.raises(ValueError):
            build_aqnm(DEFAULT_TABLE, BitAllocation([1]), np.array([0.5]))

    def test_noise_entry_decreases_with_bits(self):
        entries = [
            build_aqnm(DEFAULT_TABLE, BitAllocation([b]), np.array([3.0])).d_q_sq[0, 0]
            for b in range(1, 6)
        ]
        assert np.all(np.diff(entries) < 0)


class TestLloydMax:
    def test_one_bit_closed_form(self):
        cb = design_lloyd_max(1)
        level = np.sqrt(2.0 / np.pi)
        assert np.allclose(cb.levels, [-level, level], atol=1e-12)
        assert cb.thresholds == pytest.approx([0.0], abs=1e-15)
        assert cb.distortion == pytest.approx(1.0 - 2.0 / np.pi, rel=1e-12)

    @pytest.mark.parametrize("bits", [1, 2, 3, 4, 5])
    def test_designed_distortion_matches_table(self, bits):
        cb = design_lloyd_max(bits)
        assert cb.distortion == pytest.approx(DISTORTION_RATIOS[bits], rel=0.02)

    def test_levels_symmetric(self):
        cb = design_lloyd_max(3)
        assert np.allclose(cb.levels, -cb.levels[::-1], atol=1e-9)

    @pytest.mark.parametrize("bits", [0, 6])
    def test_bits_out_of_range(self, bits):
        with pytest.raises(ValueError):
            design_lloyd_max(bits)


class TestQuantizeSamples:
    def test_levels_are_fixed_points(self):
        cb = design_lloyd_max(3)
        assert np.array_equal(quantize_samples(cb, cb.levels), cb.levels)

    def test_zero_ties_to_positive_level(self):
        cb = design_lloyd_max(1)
        assert quantize_samples(cb, np.array([0.0]))[0] == cb.levels[1]

    def test_complex_quantized_per_dimension(self):
        cb = design_lloyd_max(2)
        rng = np.random.default_rng(0)
        z = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        q = quantize_samples(cb, z)
        assert np.array_equal(q.real, quantize_samples(cb, z.real))
        assert np.array_equal(q.imag, quantize_samples(cb, z.imag))

    def test_empirical_distortion_three_bits(self):
        cb = design_lloyd_max(3)
        x = np.random.default_rng(7).standard_normal(10**6)
        assert empirical_distortion(cb, x) == pytest.approx(0.03454, rel=0.02)
