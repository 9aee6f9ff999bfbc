"""Fixed-point CORDIC rotation and vectoring on a behavioral adder.

The iteration is the classic shift-add form

    x[i+1] = x[i] - d[i] * (y[i] >> i)
    y[i+1] = y[i] + d[i] * (x[i] >> i)
    z[i+1] = z[i] - d[i] * atan(2^-i)

with d[i] = sign(z[i]) in rotation mode and -sign(y[i]) in vectoring mode.
Every addition, including the z channel and the final gain compensation,
goes through the configured adder; right shifts truncate toward minus
infinity. The accumulated gain K = prod sqrt(1 + 2^-2i) ~ 1.6468 is undone
once after the loop by a CSD shift-add multiply with the quantized 1/K.

Rotation mode converges for |angle| <= sum atan(2^-i) ~ 1.7433 rad and
rejects angles beyond that; vectoring folds x < 0 inputs by a half-turn
internally and adds the quantized pi back into the reported angle.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from . import kernels
from .adders import AdderModel, exact_adder
from .fixedpoint import FixedFormat, FixedWord

DEFAULT_FORMAT = FixedFormat(16, 13)


def cordic_gain(iterations: int) -> float:
    g = 1.0
    for i in range(iterations):
        g *= math.sqrt(1.0 + 2.0 ** (-2 * i))
    return g


@dataclass(frozen=True)
class CordicConfig:
    fmt: FixedFormat = DEFAULT_FORMAT
    adder: AdderModel | None = None  # None resolves to exact at the word width
    iterations: int = 0  # 0 resolves to the word width

    def __post_init__(self):
        iters = self.iterations or self.fmt.width
        object.__setattr__(self, "iterations", iters)
        if self.adder is None:
            object.__setattr__(self, "adder", exact_adder(self.fmt.width))
        if not 1 <= iters <= 64:
            raise ValueError("iteration count must be in [1, 64]")
        if self.fmt.frac > self.fmt.width - 3:
            raise ValueError(
                "CORDIC needs two integer bits (frac <= width-3) to hold "
                "half-turn angles and the un-compensated gain")
        if self.adder.width != self.fmt.width:
            raise ValueError(
                f"adder width {self.adder.width} != format width {self.fmt.width}")

    @property
    def gain(self) -> float:
        return cordic_gain(self.iterations)

    @property
    def max_angle(self) -> float:
        """Convergence limit of rotation mode, sum of the ideal atan table."""
        return sum(math.atan(2.0 ** -i) for i in range(self.iterations))

    @property
    def error_bound(self) -> float:
        """Per-component worst-case rotation error for unit-norm inputs."""
        return 2.0 ** -(self.iterations - 1) + self.iterations * 2.0 ** (-self.fmt.frac + 1)

    def word(self, x: float) -> FixedWord:
        return FixedWord.from_float(x, self.fmt)


@functools.lru_cache(maxsize=None)
def _chandle(cfg: CordicConfig):
    from .adders import _handle
    return kernels.build_cordic_handle(
        cfg.fmt.width, cfg.fmt.frac, cfg.iterations, _handle(cfg.adder))


def _check_fmt(cfg: CordicConfig, *words: FixedWord):
    for w in words:
        if w.fmt != cfg.fmt:
            raise ValueError("word format does not match the CORDIC config")


def cordic_rotate(cfg: CordicConfig, x: FixedWord, y: FixedWord,
                  theta: FixedWord) -> tuple[FixedWord, FixedWord]:
    """Rotate (x, y) by theta. Theta must be inside the convergence range;
    callers with larger angles pre-reduce by quadrant (negate and offset pi).
    """
    _check_fmt(cfg, x, y, theta)
    limit = cfg.fmt.quantize(cfg.max_angle)
    if abs(theta.raw) > limit:
        raise ValueError(
            f"angle {theta.value:.4f} outside CORDIC convergence range "
            f"(+-{cfg.max_angle:.4f} rad)")
    rx, ry = kernels.rotate_one(_chandle(cfg), x.raw, y.raw, theta.raw)
    return FixedWord(cfg.fmt, rx), FixedWord(cfg.fmt, ry)


def cordic_vector(cfg: CordicConfig, x: FixedWord,
                  y: FixedWord) -> tuple[FixedWord, FixedWord]:
    """Drive y to zero; returns (magnitude, angle) with angle in (-pi, pi].

    The zero vector maps to (0, 0). x < 0 inputs are pre-rotated by a
    half-turn internally and the quantized pi is folded into the angle.
    """
    _check_fmt(cfg, x, y)
    mag, ang = kernels.vector_one(_chandle(cfg), x.raw, y.raw)
    return FixedWord(cfg.fmt, cfg.fmt.wrap(mag)), FixedWord(cfg.fmt, cfg.fmt.wrap(ang))


def gain_compensate(cfg: CordicConfig, v: FixedWord) -> FixedWord:
    """Multiply by the quantized 1/K through the configured adder."""
    _check_fmt(cfg, v)
    return FixedWord(cfg.fmt, kernels.scale_one(_chandle(cfg), v.raw))
