"""Behavioral adder models, error characterization and gate-cost proxies.

Every adder is a pure function on unsigned width-bit operands returning
(sum, cout). Exact behavior comes in two cost structures (ripple and
carry-lookahead); the approximate families are the block-carry predictor
(ACLA), OR-ed lower bits, truncated lower bits, and arbitrary gate-level
netlists.

The ACLA family splits the word into blocks of k >= 4 bits whose carry-out
is predicted from that block's operands alone, so blocks are independent
and the carry chain is cut. Within a block, bit index 0 denotes the block
MSB. The predictor ORs two units:

* ECU, exact for the top three bits: G0 + P0 G1 + P0 P1 G2. A set ECU
  implies the true block carry is set (sound, one-sided).
* CJU, a heuristic for carries born below the top three bits: (OR of the
  lower generates) * P0 * P1 * ECT with ECT = A2 | B2. The "alg1" variant
  additionally ANDs in P2, making it strictly more conservative.

The predicted carry feeds only the next block's sum; the external carry-in
feeds only block 0's sum and never participates in carry prediction.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .netlist import Netlist, load_netlist

MAX_WIDTH = 60  # int64 kernels need width + cout headroom
EXHAUSTIVE_BITS = 26  # exhaustive sweeps allowed while 2*width <= this
DEFAULT_SAMPLES = 1 << 22
_CHUNK = 1 << 20

GATE_WEIGHTS = {
    "AND": 1.0, "OR": 1.0, "NAND": 1.0, "NOR": 1.0,
    "XOR": 2.0, "XNOR": 2.0, "NOT": 0.5, "BUF": 0.5,
}
ACTIVITY_FACTOR = 0.5  # uniform switching-activity proxy for the energy figure

_FAMILY_CODES = {
    "ripple": kernels.F_EXACT,
    "cla": kernels.F_EXACT,
    "acla": kernels.F_ACLA,
    "lower_or": kernels.F_LOWER_OR,
    "truncated": kernels.F_TRUNC,
    "netlist": kernels.F_NETLIST,
}


@dataclass(frozen=True)
class BitVector:
    """An unsigned value pinned to a bit width of at least 2."""

    width: int
    value: int

    def __post_init__(self):
        if not 2 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [2, {MAX_WIDTH}], got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(
                f"value {self.value} does not fit in {self.width} unsigned bits")

    @classmethod
    def wrap(cls, value: int, width: int) -> "BitVector":
        return cls(width, value & ((1 << width) - 1))

    def bit(self, i: int) -> int:
        return (self.value >> i) & 1


@dataclass(frozen=True)
class AdderModel:
    """A named, fixed-width adder with pure evaluation semantics."""

    name: str
    family: str
    width: int
    block: int = 0        # ACLA block size k
    variant: str = ""     # ACLA carry-judge variant: "eq6" or "alg1"
    split: int = 0        # lower_or / truncated low segment length
    netlist: Netlist | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in _FAMILY_CODES:
            raise ValueError(f"unknown adder family {self.family!r}")
        if not 2 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [2, {MAX_WIDTH}]")
        if self.family == "acla":
            if self.block < 4:
                raise ValueError("ACLA block size must be >= 4")
            if self.width % self.block:
                raise ValueError("ACLA width must be divisible by the block size")
            if self.variant not in ("eq6", "alg1"):
                raise ValueError(f"unknown ACLA variant {self.variant!r}")
        if self.family in ("lower_or", "truncated"):
            if not 0 <= self.split <= self.width:
                raise ValueError("low segment length must be in [0, width]")
        if self.family == "netlist" and self.netlist is None:
            raise ValueError("netlist family requires a netlist")

    def add_raw(self, a: int, b: int, cin: int = 0) -> tuple[int, int]:
        """Add unsigned raw operands; returns (sum, cout). No range checks."""
        res = kernels.add_one(_handle(self), a, b, cin)
        return res & ((1 << self.width) - 1), res >> self.width

    def add(self, a: BitVector, b: BitVector, cin: int = 0) -> tuple[BitVector, int]:
        if a.width != self.width or b.width != self.width:
            raise ValueError("operand widths do not match the adder width")
        if cin not in (0, 1):
            raise ValueError("cin must be 0 or 1")
        s, cout = self.add_raw(a.value, b.value, cin)
        return BitVector(self.width, s), cout

    @property
    def cost(self) -> "GateCost":
        return gate_cost(self)

    @property
    def is_exact(self) -> bool:
        if self.family in ("ripple", "cla"):
            return True
        if self.family in ("lower_or", "truncated"):
            return self.split == 0
        return False


@functools.lru_cache(maxsize=None)
def _handle(model: AdderModel):
    code = _FAMILY_CODES[model.family]
    if model.family == "acla":
        return kernels.build_adder_handle(
            code, model.width, model.block, 1 if model.variant == "alg1" else 0)
    if model.family in ("lower_or", "truncated"):
        return kernels.build_adder_handle(code, model.width, model.split)
    if model.family == "netlist":
        return kernels.build_adder_handle(
            code, model.width, prog=model.netlist.program)
    return kernels.build_adder_handle(code, model.width)


def exact_adder(width: int, structure: str = "ripple") -> AdderModel:
    """Bit-true adder; `structure` ("ripple" or "cla") only changes the cost."""
    if structure not in ("ripple", "cla"):
        raise ValueError("structure must be 'ripple' or 'cla'")
    name = f"exact:{width}" if structure == "ripple" else f"cla:{width}"
    return AdderModel(name=name, family=structure, width=width)


def acla_adder(width: int, block: int = 4, variant: str = "eq6") -> AdderModel:
    name = f"acla:{width}:{block}"
    if variant != "eq6":
        name += f":{variant}"
    return AdderModel(name=name, family="acla", width=width, block=block,
                      variant=variant)


def lower_or_adder(width: int, split: int) -> AdderModel:
    return AdderModel(name=f"loa:{width}:{split}", family="lower_or",
                      width=width, split=split)


def truncated_adder(width: int, split: int) -> AdderModel:
    return AdderModel(name=f"trunc:{width}:{split}", family="truncated",
                      width=width, split=split)


def netlist_adder(source) -> AdderModel:
    nl = source if isinstance(source, Netlist) else load_netlist(source)
    return AdderModel(name=f"netlist:{nl.name}", family="netlist",
                      width=nl.width, netlist=nl)


def parse_adder(spec: str) -> AdderModel:
    """Build an adder from a compact spec string.

    Forms: ``exact:W``, ``cla:W``, ``acla:W:K[:alg1]``, ``loa:W:L``,
    ``trunc:W:L``, ``netlist:PATH``.
    """
    parts = spec.strip().split(":")
    fam = parts[0].lower()
    try:
        if fam == "netlist":
            if len(parts) < 2:
                raise ValueError("netlist spec needs a path")
            return netlist_adder(":".join(parts[1:]))
        if fam in ("exact", "ripple"):
            (w,) = map(int, parts[1:])
            return exact_adder(w)
        if fam == "cla":
            (w,) = map(int, parts[1:])
            return exact_adder(w, "cla")
        if fam == "acla":
            if len(parts) == 4 and parts[3] in ("alg1", "eq6"):
                w, k = int(parts[1]), int(parts[2])
                return acla_adder(w, k, parts[3])
            w, k = map(int, parts[1:])
            return acla_adder(w, k)
        if fam in ("loa", "lower_or"):
            w, l = map(int, parts[1:])
            return lower_or_adder(w, l)
        if fam in ("trunc", "truncated"):
            w, l = map(int, parts[1:])
            return truncated_adder(w, l)
    except ValueError as e:
        raise ValueError(f"bad adder spec {spec!r}: {e}") from e
    raise ValueError(f"bad adder spec {spec!r}: unknown family {fam!r}")


@dataclass(frozen=True)
class GateCost:
    """Structural gate counts plus derived unit-gate area/energy proxies.

    These are relative figures for ranking design points, not silicon
    estimates; only comparisons between adders of one width are meaningful.
    """

    counts: tuple[tuple[str, int], ...]

    def count(self, kind: str) -> int:
        return dict(self.counts).get(kind, 0)

    @property
    def total_gates(self) -> int:
        return sum(n for _, n in self.counts)

    @property
    def area_units(self) -> float:
        return float(sum(GATE_WEIGHTS[kind] * n for kind, n in self.counts))

    @property
    def energy_units(self) -> float:
        return self.area_units * ACTIVITY_FACTOR


def _merge(*parts: dict[str, int]) -> tuple[tuple[str, int], ...]:
    acc: dict[str, int] = {}
    for p in parts:
        for kind, n in p.items():
            acc[kind] = acc.get(kind, 0) + n
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def _ripple_counts(bits: int) -> dict[str, int]:
    # full adder per bit: 2 XOR, 2 AND, 1 OR
    return {"XOR": 2 * bits, "AND": 2 * bits, "OR": bits}


def _cla_counts(width: int) -> dict[str, int]:
    # 4-bit lookahead groups chained by group carry; c_t needs t(t+1)/2 AND
    # and t OR for t = 1..group_size (flat sum-of-products form)
    counts = {"XOR": 0, "AND": 0, "OR": 0}
    rem = width
    while rem > 0:
        r = min(4, rem)
        counts["XOR"] += 2 * r
        counts["AND"] += r + sum(t * (t + 1) // 2 for t in range(1, r + 1))
        counts["OR"] += r * (r + 1) // 2
        rem -= r
    return counts


def _acla_counts(width: int, k: int, alg1: bool) -> dict[str, int]:
    nblocks = width // k
    xor = 2 + 2 * k
    and_ = 6 + 3 * k
    or_ = 2 * k
    if alg1:
        xor += 1
        and_ += 1
    return {"XOR": xor * nblocks, "AND": and_ * nblocks, "OR": or_ * nblocks}


def gate_cost(model: AdderModel) -> GateCost:
    fam = model.family
    w = model.width
    if fam == "ripple":
        return GateCost(_merge(_ripple_counts(w)))
    if fam == "cla":
        return GateCost(_merge(_cla_counts(w)))
    if fam == "acla":
        return GateCost(_merge(
            _acla_counts(w, model.block, model.variant == "alg1")))
    if fam == "lower_or":
        return GateCost(_merge(_ripple_counts(w - model.split),
                               {"OR": model.split}))
    if fam == "truncated":
        return GateCost(_merge(_ripple_counts(w - model.split)))
    # netlist: literal counts
    acc: dict[str, int] = {}
    for op in model.netlist.gate_ops:
        acc[op] = acc.get(op, 0) + 1
    return GateCost(_merge(acc))


def carry_predict_probability(depth: int) -> float:
    """Chance that a carry born `depth` bits below the block MSB is flagged
    correctly by the carry-judge path: (3/4) ** (depth - 3).

    Each bit between the carry's origin and the top-three window passes the
    carry onward (propagate or regenerate) with probability 3/4; the window
    itself is checked explicitly, so only those intermediate bits are left
    to chance. Depths inside the window (< 3) are the ECU's job.
    """
    if depth < 3:
        raise ValueError("depth below 3 lies in the exactly-checked window")
    return 0.75 ** (depth - 3)


@dataclass(frozen=True)
class ErrorMetrics:
    """Deviation of an adder from exact addition on (width+1)-bit results."""

    er: float    # fraction of input pairs with a wrong result
    mae: float   # mean |approx - exact|
    wce: int     # max |approx - exact|
    mre: float   # mean |approx - exact| / max(exact, 1)
    ned: float   # mae / wce of this sample; 0 when wce == 0
    n: int
    mode: str    # "exhaustive" | "sampled"
    seed: int | None = None

    @property
    def mae_normalized(self) -> float:
        return self.ned  # alias kept out of the CSV schema


def characterize(model: AdderModel, mode: str = "exhaustive",
                 samples: int | None = None, seed: int = 0) -> ErrorMetrics:
    """Measure ER/MAE/WCE/MRE/NED against exact addition with cin=0.

    Exhaustive mode enumerates every operand pair and is only allowed while
    2*width <= 26; sampled mode draws `samples` uniform pairs (default
    2**22) from a seeded generator and is reproducible bit for bit.
    """
    w = model.width
    if w > 42:
        raise ValueError("characterization supports widths up to 42")
    handle = _handle(model)
    mask = (1 << w) - 1

    wrong = 0
    abs_sum = 0
    mre_sum = 0.0
    wce = 0

    def accumulate(a: np.ndarray, b: np.ndarray):
        nonlocal wrong, abs_sum, mre_sum, wce
        out = np.empty_like(a)
        kernels.add_batch(handle, a, b, out)
        exact = a + b
        err = np.abs(out - exact)
        wrong += int(np.count_nonzero(err))
        abs_sum += int(err.sum())
        wce = max(wce, int(err.max(initial=0)))
        mre_sum += float((err / np.maximum(exact, 1)).sum())

    if mode == "exhaustive":
        if 2 * w > EXHAUSTIVE_BITS:
            raise ValueError(
                f"exhaustive characterization needs 2*width <= {EXHAUSTIVE_BITS}; "
                f"width {w} must be sampled")
        total = 1 << (2 * w)
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            accumulate(idx >> w, idx & mask)
        n = total
        used_seed = None
    elif mode == "sampled":
        n = DEFAULT_SAMPLES if samples is None else int(samples)
        if n <= 0:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        left = n
        while left > 0:
            m = min(left, _CHUNK)
            a = rng.integers(0, 1 << w, size=m, dtype=np.int64)
            b = rng.integers(0, 1 << w, size=m, dtype=np.int64)
            accumulate(a, b)
            left -= m
        used_seed = seed
    else:
        raise ValueError(f"unknown characterization mode {mode!r}")

    mae = abs_sum / n
    return ErrorMetrics(
        er=wrong / n, mae=mae, wce=wce, mre=mre_sum / n,
        ned=(mae / wce) if wce else 0.0,
        n=n, mode=mode, seed=used_seed)
