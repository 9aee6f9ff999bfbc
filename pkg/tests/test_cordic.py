"""CORDIC rotation/vectoring against double-precision trigonometry."""

import math

import numpy as np
import pytest

import oracles
from music_lite.adders import acla_adder, exact_adder
from music_lite.cordic import (DEFAULT_FORMAT, CordicConfig, cordic_gain,
                               cordic_rotate, cordic_vector, gain_compensate)
from music_lite.fixedpoint import FixedFormat, FixedWord
from music_lite.kernels import cordic_tables, csd_digits

FORMATS = [FixedFormat(16, 13), FixedFormat(32, 24)]


def fmt_id(fmt):
    return f"W{fmt.width}F{fmt.frac}"


class TestConfig:
    def test_defaults_resolve(self):
        cfg = CordicConfig()
        assert cfg.fmt == DEFAULT_FORMAT
        assert cfg.iterations == 16
        assert cfg.adder.name == "exact:16"

    def test_gain_constant(self):
        assert round(cordic_gain(16), 4) == 1.6468
        assert round(CordicConfig().gain, 4) == 1.6468

    def test_convergence_limit(self):
        assert round(CordicConfig().max_angle, 4) == 1.7433

    def test_error_bound_formula(self):
        cfg = CordicConfig()
        assert cfg.error_bound == 2.0 ** -15 + 16 * 2.0 ** -12

    def test_validation(self):
        with pytest.raises(ValueError):
            CordicConfig(iterations=65)
        with pytest.raises(ValueError):
            CordicConfig(fmt=FixedFormat(16, 14))  # no headroom for the gain
        with pytest.raises(ValueError):
            CordicConfig(adder=exact_adder(8))

    def test_word_helper(self):
        assert CordicConfig().word(1.0).raw == 8192


class TestTables:
    def test_csd_reconstructs_with_sparse_digits(self):
        for value in (1, 2, 3, 119, 4975, 0x5A5A):
            digits = csd_digits(value)
            assert sum(sign << pos for pos, sign in digits) == value
            positions = [pos for pos, _ in digits]
            assert all(a - b >= 2 for a, b in zip(positions, positions[1:]))

    def test_csd_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            csd_digits(0)

    def test_angle_table_matches_arctangent(self):
        atan_raw, shifts, signs, pi_raw, half_pi_raw, gain = \
            cordic_tables(16, 13, 16)
        for i, raw in enumerate(atan_raw):
            assert raw == round(math.atan(2.0 ** -i) * 8192)
        assert atan_raw[0] == round(math.pi / 4 * 8192)
        assert all(a >= b for a, b in zip(atan_raw, atan_raw[1:]))
        assert pi_raw == round(math.pi * 8192)
        assert half_pi_raw == round(math.pi / 2 * 8192)
        assert len(shifts) == len(signs)
        # the CSD program must reproduce the quantized gain inverse
        inv = sum(sign << (13 - shift) for shift, sign in zip(shifts, signs))
        assert inv == round(8192 / gain)


class TestRotation:
    def test_identity(self):
        cfg = CordicConfig()
        x, y = cordic_rotate(cfg, cfg.word(1.0), cfg.word(0.0), cfg.word(0.0))
        assert abs(x.value - 1.0) <= 2.0 ** (-13 + 3)
        assert abs(y.value) <= 2.0 ** (-13 + 3)

    def test_quarter_turn_diagonal(self):
        cfg = CordicConfig()
        x, y = cordic_rotate(cfg, cfg.word(1.0), cfg.word(0.0),
                             cfg.word(math.pi / 4))
        assert abs(x.value - 0.7071) <= cfg.error_bound
        assert abs(y.value - 0.7071) <= cfg.error_bound

    @pytest.mark.parametrize("fmt", FORMATS, ids=fmt_id)
    def test_matches_oracle_on_unit_disk(self, fmt):
        cfg = CordicConfig(fmt=fmt)
        rng = np.random.default_rng(99)
        bound = cfg.error_bound
        for _ in range(1500):
            r = rng.uniform(0.0, 1.0)
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-cfg.max_angle, cfg.max_angle)
            x0, y0 = r * math.cos(phi), r * math.sin(phi)
            rx, ry = cordic_rotate(cfg, cfg.word(x0), cfg.word(y0),
                                   cfg.word(theta))
            ox, oy = oracles.rotate_oracle(x0, y0, theta)
            assert abs(rx.value - ox) <= bound
            assert abs(ry.value - oy) <= bound

    def test_inverse_rotation_returns(self):
        cfg = CordicConfig()
        rng = np.random.default_rng(5)
        for _ in range(300):
            x0 = float(rng.uniform(-0.7, 0.7))
            y0 = float(rng.uniform(-0.7, 0.7))
            th = float(rng.uniform(-1.5, 1.5))
            fx, fy = cordic_rotate(cfg, cfg.word(x0), cfg.word(y0),
                                   cfg.word(th))
            bx, by = cordic_rotate(cfg, fx, fy, cfg.word(-th))
            assert abs(bx.value - x0) <= 2 * cfg.error_bound
            assert abs(by.value - y0) <= 2 * cfg.error_bound

    def test_angle_beyond_convergence_rejected(self):
        cfg = CordicConfig()
        with pytest.raises(ValueError, match="convergence"):
            cordic_rotate(cfg, cfg.word(0.5), cfg.word(0.0), cfg.word(2.0))

    def test_format_mismatch_rejected(self):
        cfg = CordicConfig()
        other = FixedFormat(16, 12)
        with pytest.raises(ValueError):
            cordic_rotate(cfg, FixedWord(other, 0), cfg.word(0.0),
                          cfg.word(0.0))

    def test_approximate_adder_degrades_accuracy(self):
        exact_cfg = CordicConfig()
        approx_cfg = CordicConfig(adder=acla_adder(16, 4))
        rng = np.random.default_rng(17)
        exact_err = approx_err = 0.0
        diverged = False
        for _ in range(200):
            x0 = float(rng.uniform(-0.9, 0.9))
            y0 = float(rng.uniform(-0.9, 0.9))
            th = float(rng.uniform(-1.5, 1.5))
            ox, oy = oracles.rotate_oracle(x0, y0, th)
            for cfg, acc in ((exact_cfg, "e"), (approx_cfg, "a")):
                rx, ry = cordic_rotate(cfg, cfg.word(x0), cfg.word(y0),
                                       cfg.word(th))
                err = abs(rx.value - ox) + abs(ry.value - oy)
                if acc == "e":
                    exact_err += err
                    last_exact = (rx.raw, ry.raw)
                else:
                    approx_err += err
                    diverged |= (rx.raw, ry.raw) != last_exact
        assert diverged
        assert approx_err > exact_err


class TestVectoring:
    def test_positive_axis(self):
        cfg = CordicConfig()
        mag, ang = cordic_vector(cfg, cfg.word(1.0), cfg.word(0.0))
        assert abs(mag.value - 1.0) <= cfg.error_bound
        assert abs(ang.value) <= cfg.error_bound

    def test_diagonal(self):
        cfg = CordicConfig()
        mag, ang = cordic_vector(cfg, cfg.word(1.0), cfg.word(1.0))
        assert abs(mag.value - 1.41421) <= cfg.error_bound
        assert abs(ang.value - 0.78540) <= cfg.error_bound

    def test_negative_axis_folds_to_half_turn(self):
        cfg = CordicConfig()
        mag, ang = cordic_vector(cfg, cfg.word(-1.0), cfg.word(0.0))
        assert abs(mag.value - 1.0) <= cfg.error_bound
        assert abs(ang.value - math.pi) <= 2 * cfg.error_bound

    def test_zero_vector(self):
        cfg = CordicConfig()
        mag, ang = cordic_vector(cfg, cfg.word(0.0), cfg.word(0.0))
        assert (mag.raw, ang.raw) == (0, 0)

    @pytest.mark.parametrize("fmt", FORMATS, ids=fmt_id)
    def test_matches_oracle_above_quantization_floor(self, fmt):
        cfg = CordicConfig(fmt=fmt)
        rng = np.random.default_rng(31)
        bound = cfg.error_bound
        for _ in range(1500):
            r = rng.uniform(0.25, 1.0)
            phi = rng.uniform(-math.pi, math.pi)
            x0, y0 = r * math.cos(phi), r * math.sin(phi)
            mag, ang = cordic_vector(cfg, cfg.word(x0), cfg.word(y0))
            omag, oang = oracles.vector_oracle(x0, y0)
            assert abs(mag.value - omag) <= bound
            diff = abs(ang.value - oang)
            assert min(diff, abs(diff - 2 * math.pi)) <= bound
            assert mag.raw >= 0
            assert abs(ang.value) <= math.pi + 0.01


class TestGainCompensation:
    def test_gain_word_compensates_to_one(self):
        cfg = CordicConfig()
        out = gain_compensate(cfg, cfg.word(cfg.gain))
        assert abs(out.value - 1.0) <= 2.0 ** (-13 + 2)

    def test_zero_fixed_point(self):
        cfg = CordicConfig()
        assert gain_compensate(cfg, cfg.word(0.0)).raw == 0

    @pytest.mark.parametrize("fmt", FORMATS, ids=fmt_id)
    def test_matches_float_reciprocal_gain(self, fmt):
        cfg = CordicConfig(fmt=fmt)
        _, shifts, _, _, _, gain = cordic_tables(fmt.width, fmt.frac,
                                                 cfg.iterations)
        # one truncation per CSD term plus the quantized-constant slack
        bound = (len(shifts) + 2) * fmt.ulp
        rng = np.random.default_rng(77)
        for _ in range(2000):
            v = float(rng.uniform(-3.9, 3.9))
            word = FixedWord.from_float(v, fmt)
            out = gain_compensate(cfg, word)
            assert abs(out.value - word.value / gain) <= bound
