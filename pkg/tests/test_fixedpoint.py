"""Two's-complement word semantics and adder-routed arithmetic."""

import pytest

import oracles
from music_lite.adders import acla_adder, exact_adder
from music_lite.fixedpoint import FixedFormat, FixedWord, fx_add, fx_sub

Q2_13 = FixedFormat(16, 13)


class TestFormat:
    def test_defaults(self):
        fmt = FixedFormat()
        assert (fmt.width, fmt.frac) == (16, 13)
        assert fmt.ulp == 2.0 ** -13
        assert fmt.min_raw == -32768
        assert fmt.max_raw == 32767

    def test_quantize_rounds_half_to_even(self):
        # 1.5 ulp of headroom on each side of the tie
        assert Q2_13.quantize(0.5 * Q2_13.ulp) == 0
        assert Q2_13.quantize(1.5 * Q2_13.ulp) == 2
        assert Q2_13.quantize(2.5 * Q2_13.ulp) == 2
        assert Q2_13.quantize(-0.5 * Q2_13.ulp) == 0
        assert Q2_13.quantize(-1.5 * Q2_13.ulp) == -2

    def test_quantize_overflow(self):
        assert Q2_13.quantize(3.999) == 32760
        with pytest.raises(OverflowError):
            Q2_13.quantize(4.0)
        with pytest.raises(OverflowError):
            Q2_13.quantize(-4.001)

    def test_wrap(self):
        assert Q2_13.wrap(32768) == -32768
        assert Q2_13.wrap(-32769) == 32767
        assert Q2_13.wrap(70000) == 70000 - 65536

    def test_validation(self):
        with pytest.raises(ValueError):
            FixedFormat(16, 15)
        with pytest.raises(ValueError):
            FixedFormat(16, 1)
        with pytest.raises(ValueError):
            FixedFormat(1, 0)

    def test_round_trip(self):
        for x in (0.0, 1.0, -1.0, 0.125, 3.9998, -4.0):
            raw = Q2_13.quantize(x)
            assert abs(Q2_13.to_float(raw) - x) <= Q2_13.ulp / 2


class TestWord:
    def test_from_float_and_value(self):
        w = FixedWord.from_float(1.0, Q2_13)
        assert w.raw == 8192
        assert w.value == 1.0

    def test_negate_wraps_min(self):
        assert (-FixedWord(Q2_13, 5)).raw == -5
        assert (-FixedWord(Q2_13, -32768)).raw == -32768

    def test_raw_range_checked(self):
        with pytest.raises(ValueError):
            FixedWord(Q2_13, 32768)


class TestAdderRouting:
    def test_add_matches_integer_addition_exactly(self):
        model = exact_adder(16)
        rng_vals = range(-32768, 32768, 257)
        for a in rng_vals:
            for b in (-32768, -1, 0, 1, 12345, 32767):
                out = fx_add(FixedWord(Q2_13, a), FixedWord(Q2_13, b), model)
                assert out.raw == Q2_13.wrap(a + b)

    def test_sub_self_is_zero_for_every_raw_value(self):
        model = exact_adder(16)
        for raw in range(-32768, 32768):
            w = FixedWord(Q2_13, raw)
            assert fx_sub(w, w, model).raw == 0

    def test_acla_add_matches_bit_oracle(self):
        model = acla_adder(16, 4)
        s, _ = oracles.acla_add(0x00FF, 0x0001, 16, 4)
        out = fx_add(FixedWord(Q2_13, 0x00FF), FixedWord(Q2_13, 0x0001), model)
        assert out.raw == oracles.to_signed(s, 16)
        # the predictor misses the carry rippling out of the low byte
        assert out.raw != 0x0100

    def test_acla_sub_routes_negation_through_adder(self):
        model = acla_adder(16, 4)
        a = FixedWord(Q2_13, 0x0100)
        b = FixedWord(Q2_13, 1)
        s, _ = oracles.acla_add(0x0100, 0xFFFF, 16, 4)
        assert fx_sub(a, b, model).raw == oracles.to_signed(s, 16)

    def test_format_and_width_guards(self):
        other = FixedFormat(16, 12)
        with pytest.raises(ValueError):
            fx_add(FixedWord(Q2_13, 0), FixedWord(other, 0), exact_adder(16))
        with pytest.raises(ValueError):
            fx_add(FixedWord(Q2_13, 0), FixedWord(Q2_13, 0), exact_adder(8))
