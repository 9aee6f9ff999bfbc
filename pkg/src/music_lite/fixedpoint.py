"""Two's-complement fixed-point words with pluggable addition.

A `FixedFormat` is W total bits with F fraction bits; the default Q2.13
(W=16, F=13) leaves a sign bit plus two integer bits of headroom. Raw
values are stored sign-extended. Addition routes through a behavioral
`AdderModel` and discards the carry-out, i.e. overflow wraps; subtraction
negates exactly (an inverter array plus increment in hardware) and then
uses the same approximate add.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adders import AdderModel, MAX_WIDTH


@dataclass(frozen=True)
class FixedFormat:
    width: int = 16
    frac: int = 13

    def __post_init__(self):
        if not 2 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [2, {MAX_WIDTH}]")
        if not 2 <= self.frac <= self.width - 2:
            raise ValueError(
                "fraction bits must leave a sign bit plus integer headroom "
                f"(2 <= frac <= width-2), got W={self.width} F={self.frac}")

    @property
    def ulp(self) -> float:
        return 2.0 ** -self.frac

    @property
    def min_raw(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.width - 1)) - 1

    def quantize(self, x: float) -> int:
        """Round-to-nearest-even raw value; raises if out of range."""
        raw = round(x * (1 << self.frac))
        if not self.min_raw <= raw <= self.max_raw:
            raise OverflowError(
                f"{x} does not fit Q{self.width - self.frac - 1}.{self.frac}")
        return raw

    def to_float(self, raw: int) -> float:
        return raw * self.ulp

    def wrap(self, raw: int) -> int:
        raw &= (1 << self.width) - 1
        if raw & (1 << (self.width - 1)):
            raw -= 1 << self.width
        return raw


@dataclass(frozen=True)
class FixedWord:
    fmt: FixedFormat
    raw: int

    def __post_init__(self):
        if not self.fmt.min_raw <= self.raw <= self.fmt.max_raw:
            raise ValueError(
                f"raw {self.raw} outside {self.fmt.width}-bit two's complement")

    @classmethod
    def from_float(cls, x: float, fmt: FixedFormat) -> "FixedWord":
        return cls(fmt, fmt.quantize(x))

    @property
    def value(self) -> float:
        return self.fmt.to_float(self.raw)

    def __neg__(self) -> "FixedWord":
        return FixedWord(self.fmt, self.fmt.wrap(-self.raw))


def _check(a: FixedWord, b: FixedWord, adder: AdderModel):
    if a.fmt != b.fmt:
        raise ValueError("operand formats differ")
    if adder.width != a.fmt.width:
        raise ValueError(
            f"adder width {adder.width} != format width {a.fmt.width}")


def fx_add(a: FixedWord, b: FixedWord, adder: AdderModel) -> FixedWord:
    """a + b through the behavioral adder; carry-out discarded (wraps)."""
    _check(a, b, adder)
    mask = (1 << a.fmt.width) - 1
    s, _ = adder.add_raw(a.raw & mask, b.raw & mask, 0)
    return FixedWord(a.fmt, a.fmt.wrap(s))


def fx_sub(a: FixedWord, b: FixedWord, adder: AdderModel) -> FixedWord:
    """a - b as approximate-add of the exact two's-complement negation."""
    _check(a, b, adder)
    mask = (1 << a.fmt.width) - 1
    s, _ = adder.add_raw(a.raw & mask, (-b.raw) & mask, 0)
    return FixedWord(a.fmt, a.fmt.wrap(s))
