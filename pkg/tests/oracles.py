"""Independent reference models used to derive expected test values.

Everything here is written directly from the adder equations and from
textbook trigonometry, deliberately sharing no code or structure with the
package kernels. Tests compare package output against these models; the
golden files under data/ were produced by them (see data/make_goldens.py).
"""

import math


def ripple_add(a: int, b: int, width: int, cin: int = 0) -> tuple[int, int]:
    """Bit-serial full-adder chain; returns (sum, carry_out)."""
    carry = cin
    total = 0
    for i in range(width):
        ai = (a >> i) & 1
        bi = (b >> i) & 1
        s = ai ^ bi ^ carry
        carry = (ai & bi) | (ai & carry) | (bi & carry)
        total |= s << i
    return total, carry


def block_bits(word: int, k: int) -> list:
    """Block operand as a list indexed from the block MSB (index 0 = MSB)."""
    return [(word >> (k - 1 - i)) & 1 for i in range(k)]


def ecu(ab: int, bb: int, k: int) -> int:
    """Exact carry unit over the top three block bits."""
    a = block_bits(ab, k)
    b = block_bits(bb, k)
    g = [a[i] & b[i] for i in range(3)]
    p = [a[i] ^ b[i] for i in range(3)]
    return g[0] | (p[0] & g[1]) | (p[0] & p[1] & g[2])


def cju(ab: int, bb: int, k: int, variant: str = "eq6") -> int:
    """Carry judge unit: lower-generate OR gated by the top window."""
    a = block_bits(ab, k)
    b = block_bits(bb, k)
    lower = 0
    for i in range(3, k):
        lower |= a[i] & b[i]
    ect = a[2] | b[2]
    out = lower & (a[0] ^ b[0]) & (a[1] ^ b[1]) & ect
    if variant == "alg1":
        out &= a[2] ^ b[2]
    return out


def acla_block_carry(ab: int, bb: int, k: int, variant: str = "eq6") -> int:
    return ecu(ab, bb, k) | cju(ab, bb, k, variant)


def acla_add(a: int, b: int, width: int, k: int, variant: str = "eq6",
             cin: int = 0) -> tuple[int, int]:
    """Blockwise sum with predicted inter-block carries.

    The external carry-in feeds only the lowest block's sum; each block's
    natural carry-out is discarded in favor of the prediction.
    """
    kmask = (1 << k) - 1
    total = 0
    carry = cin
    pred = 0
    for lo in range(0, width, k):
        ab = (a >> lo) & kmask
        bb = (b >> lo) & kmask
        total |= ((ab + bb + carry) & kmask) << lo
        pred = acla_block_carry(ab, bb, k, variant)
        carry = pred
    return total, pred


def lower_or_add(a: int, b: int, width: int, split: int,
                 cin: int = 0) -> tuple[int, int]:
    """Upper part adds exactly, lower `split` bits are bitwise OR."""
    if split == 0:
        return ripple_add(a, b, width, cin)
    low = ((1 << split) - 1)
    hi_sum, cout = ripple_add(a >> split, b >> split, width - split, 0)
    return (hi_sum << split) | ((a | b) & low), cout


def trunc_add(a: int, b: int, width: int, split: int,
              cin: int = 0) -> tuple[int, int]:
    """Upper part adds exactly, lower `split` bits forced to zero."""
    if split == 0:
        return ripple_add(a, b, width, cin)
    hi_sum, cout = ripple_add(a >> split, b >> split, width - split, 0)
    return hi_sum << split, cout


def to_signed(raw: int, width: int) -> int:
    raw &= (1 << width) - 1
    return raw - (1 << width) if raw & (1 << (width - 1)) else raw


def rotate_oracle(x: float, y: float, theta: float) -> tuple:
    c, s = math.cos(theta), math.sin(theta)
    return x * c - y * s, x * s + y * c


def vector_oracle(x: float, y: float) -> tuple:
    return math.hypot(x, y), math.atan2(y, x)
