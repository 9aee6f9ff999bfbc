"""Kernel backend selection.

The hot integer kernels exist twice: a Cython extension (``_kernels_cy``)
and a pure-Python fallback (``_kernels_py``). The compiled backend is used
when importable; set ``MUSIC_LITE_KERNELS=py`` to force the fallback or
``MUSIC_LITE_KERNELS=cy`` to require the extension. Both are bit-exact
twins, so the choice affects speed only.

Handle construction lives here so that every derived constant (CSD digits
of the gain inverse, quantized angle table) is computed exactly once, in
one place, for both backends.
"""

from __future__ import annotations

import math
import os

from . import _kernels_py

_pref = os.environ.get("MUSIC_LITE_KERNELS", "").strip().lower()
if _pref not in ("", "py", "cy"):
    raise ImportError(f"MUSIC_LITE_KERNELS must be 'py' or 'cy', got {_pref!r}")

if _pref == "py":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _pref == "cy":
            raise
        _impl = _kernels_py

# family codes shared with both backends
F_EXACT = _kernels_py.F_EXACT
F_ACLA = _kernels_py.F_ACLA
F_LOWER_OR = _kernels_py.F_LOWER_OR
F_TRUNC = _kernels_py.F_TRUNC
F_NETLIST = _kernels_py.F_NETLIST


def backend_name() -> str:
    """Either ``compiled`` or ``python``."""
    return "python" if _impl is _kernels_py else "compiled"


def backend(force: str | None = None):
    """Return the active backend module, or a specific one for benchmarks."""
    if force is None:
        return _impl
    if force == "py":
        return _kernels_py
    if force == "cy":
        from . import _kernels_cy
        return _kernels_cy
    raise ValueError(f"unknown kernel backend {force!r}")


def build_adder_handle(family: int, width: int, p1: int = 0, p2: int = 0,
                       prog=None, impl=None):
    return (impl or _impl).build_adder(family, width, p1, p2, prog)


def csd_digits(value: int) -> list[tuple[int, int]]:
    """Canonic-signed-digit decomposition: [(bit position, +-1), ...], msb first.

    value == sum(sign << pos) with no two adjacent nonzero digits, which
    minimizes the number of shift-add terms in the constant multiplier.
    """
    if value <= 0:
        raise ValueError("CSD decomposition expects a positive constant")
    digits = []
    pos = 0
    v = value
    while v:
        if v & 1:
            d = 2 - (v & 3)  # +1 for ...01, -1 for ...11
            digits.append((pos, d))
            v -= d
        v >>= 1
        pos += 1
    digits.reverse()
    return digits


def cordic_tables(width: int, frac: int, iters: int):
    """Quantized constants shared by both backends.

    Returns (atan_raw, csd_shifts, csd_signs, pi_raw, half_pi_raw, gain).
    Shift amounts are ``frac - pos`` for each CSD digit of the quantized
    gain inverse, ordered most significant term first.
    """
    atan_raw = [round(math.atan(2.0 ** -i) * (1 << frac)) for i in range(iters)]
    gain = 1.0
    for i in range(iters):
        gain *= math.sqrt(1.0 + 2.0 ** (-2 * i))
    inv_raw = round((1 << frac) / gain)
    shifts = []
    signs = []
    for pos, d in csd_digits(inv_raw):
        shifts.append(frac - pos)
        signs.append(d)
    pi_raw = round(math.pi * (1 << frac))
    half_pi_raw = round(0.5 * math.pi * (1 << frac))
    return atan_raw, shifts, signs, pi_raw, half_pi_raw, gain


def build_cordic_handle(width: int, frac: int, iters: int, adder_handle,
                        impl=None):
    atan_raw, shifts, signs, pi_raw, half_pi_raw, _ = cordic_tables(
        width, frac, iters)
    return (impl or _impl).build_cordic(
        width, frac, iters, atan_raw, shifts, signs, pi_raw, half_pi_raw,
        adder_handle)


def add_one(handle, a: int, b: int, cin: int = 0, impl=None) -> int:
    return (impl or _impl).add_one(handle, a, b, cin)


def add_batch(handle, a, b, out, impl=None) -> None:
    (impl or _impl).add_batch(handle, a, b, out)


def rotate_one(handle, x: int, y: int, z: int, impl=None):
    return (impl or _impl).rotate_one(handle, x, y, z)


def vector_one(handle, x: int, y: int, impl=None):
    return (impl or _impl).vector_one(handle, x, y)


def scale_one(handle, v: int, impl=None) -> int:
    return (impl or _impl).scale_one(handle, v)


def rotate_pairs(handle, xs, ys, z: int, fold: bool = True, impl=None) -> None:
    (impl or _impl).rotate_pairs(handle, xs, ys, z, 1 if fold else 0)
