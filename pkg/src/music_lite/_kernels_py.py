"""Integer reference kernels: bit-level adders and the CORDIC datapath.

Pure-Python twin of the compiled extension ``_kernels_cy``. Both backends
consume the same handle layouts (built in :mod:`music_lite.kernels`) and
must agree bit for bit on every operation; the test suite enforces parity.

All values are width-bit two's complement carried in Python ints (the
compiled twin uses int64, so widths beyond 60 bits are rejected upstream).
Right shifts are arithmetic, i.e. they truncate toward minus infinity.
"""

from __future__ import annotations

# adder family codes
F_EXACT = 0
F_ACLA = 1
F_LOWER_OR = 2
F_TRUNC = 3
F_NETLIST = 4

# netlist gate opcodes
OP_AND, OP_OR, OP_NOT, OP_XOR, OP_NAND, OP_NOR, OP_XNOR, OP_BUF = range(8)


class AdderHandle:
    __slots__ = (
        "family", "width", "mask", "block", "alg1", "split",
        "ops", "in1", "in2", "sum_nodes", "cout_node", "n_nodes",
    )

    def __init__(self, family, width, p1, p2, prog):
        self.family = family
        self.width = width
        self.mask = (1 << width) - 1
        self.block = p1 if family == F_ACLA else 0
        self.alg1 = p2 if family == F_ACLA else 0
        self.split = p1 if family in (F_LOWER_OR, F_TRUNC) else 0
        if family == F_NETLIST:
            ops, in1, in2, sum_nodes, cout_node, n_nodes = prog
            self.ops = [int(v) for v in ops]
            self.in1 = [int(v) for v in in1]
            self.in2 = [int(v) for v in in2]
            self.sum_nodes = [int(v) for v in sum_nodes]
            self.cout_node = int(cout_node)
            self.n_nodes = int(n_nodes)


def build_adder(family, width, p1, p2, prog):
    return AdderHandle(family, width, p1, p2, prog)


def _acla_block_carry(ab, bb, k, alg1):
    # bit index 0 is the block MSB: bit t of the block is (x >> (k-1-t)) & 1
    a0 = ab >> (k - 1)
    b0 = bb >> (k - 1)
    a1 = (ab >> (k - 2)) & 1
    b1 = (bb >> (k - 2)) & 1
    a2 = (ab >> (k - 3)) & 1
    b2 = (bb >> (k - 3)) & 1
    p0 = a0 ^ b0
    p1 = a1 ^ b1
    ecu = (a0 & b0) | (p0 & a1 & b1) | (p0 & p1 & a2 & b2)
    gen_low = (ab & bb) & ((1 << (k - 3)) - 1)
    cju = p0 & p1 & (a2 | b2) & (1 if gen_low else 0)
    if alg1:
        cju &= a2 ^ b2
    return ecu | cju


def add_one(h, a, b, cin):
    """Evaluate one addition; returns sum | cout << width."""
    w = h.width
    fam = h.family
    if fam == F_EXACT:
        return a + b + cin
    if fam == F_ACLA:
        k = h.block
        kmask = (1 << k) - 1
        s = 0
        c_prev = cin
        cout = 0
        for sh in range(0, w, k):
            ab = (a >> sh) & kmask
            bb = (b >> sh) & kmask
            cout = _acla_block_carry(ab, bb, k, h.alg1)
            s |= ((ab + bb + c_prev) & kmask) << sh
            c_prev = cout
        return s | (cout << w)
    if fam == F_LOWER_OR or fam == F_TRUNC:
        split = h.split
        if split == 0:
            return a + b + cin
        t = (a >> split) + (b >> split)
        if fam == F_LOWER_OR:
            lowbits = (a | b) & ((1 << split) - 1)
        else:
            lowbits = 0
        hi = w - split
        return ((t & ((1 << hi) - 1)) << split) | lowbits | ((t >> hi) << w)
    # netlist
    vals = bytearray(h.n_nodes)
    for i in range(w):
        vals[i] = (a >> i) & 1
        vals[w + i] = (b >> i) & 1
    vals[2 * w] = cin
    base = 2 * w + 1
    ops = h.ops
    in1 = h.in1
    in2 = h.in2
    for t in range(len(ops)):
        op = ops[t]
        x = vals[in1[t]]
        if op == OP_AND:
            v = x & vals[in2[t]]
        elif op == OP_OR:
            v = x | vals[in2[t]]
        elif op == OP_NOT:
            v = x ^ 1
        elif op == OP_XOR:
            v = x ^ vals[in2[t]]
        elif op == OP_NAND:
            v = (x & vals[in2[t]]) ^ 1
        elif op == OP_NOR:
            v = (x | vals[in2[t]]) ^ 1
        elif op == OP_XNOR:
            v = x ^ vals[in2[t]] ^ 1
        else:  # OP_BUF
            v = x
        vals[base + t] = v
    s = 0
    for i in range(w):
        s |= vals[h.sum_nodes[i]] << i
    return s | (vals[h.cout_node] << w)


def add_batch(h, a, b, out):
    """Columnwise add with cin=0 over int64 arrays; out gets sum | cout << w."""
    import numpy as np

    w = h.width
    fam = h.family
    if fam == F_EXACT:
        np.add(a, b, out=out)
        return
    if fam == F_LOWER_OR or fam == F_TRUNC:
        split = h.split
        if split == 0:
            np.add(a, b, out=out)
            return
        t = (a >> split) + (b >> split)
        hi = w - split
        res = ((t & ((1 << hi) - 1)) << split) | ((t >> hi) << w)
        if fam == F_LOWER_OR:
            res |= (a | b) & ((1 << split) - 1)
        out[:] = res
        return
    if fam == F_ACLA:
        k = h.block
        kmask = (1 << k) - 1
        low = (1 << (k - 3)) - 1
        s = np.zeros_like(a)
        c_prev = np.zeros_like(a)
        cout = None
        for sh in range(0, w, k):
            ab = (a >> sh) & kmask
            bb = (b >> sh) & kmask
            a0 = ab >> (k - 1)
            b0 = bb >> (k - 1)
            a1 = (ab >> (k - 2)) & 1
            b1 = (bb >> (k - 2)) & 1
            a2 = (ab >> (k - 3)) & 1
            b2 = (bb >> (k - 3)) & 1
            p0 = a0 ^ b0
            p1 = a1 ^ b1
            ecu = (a0 & b0) | (p0 & a1 & b1) | (p0 & p1 & a2 & b2)
            cju = p0 & p1 & (a2 | b2) & (((ab & bb) & low) != 0)
            if h.alg1:
                cju = cju & (a2 ^ b2)
            cout = ecu | cju
            s |= ((ab + bb + c_prev) & kmask) << sh
            c_prev = cout
        out[:] = s | (cout << w)
        return
    for i in range(a.shape[0]):
        out[i] = add_one(h, int(a[i]), int(b[i]), 0)


class CordicHandle:
    __slots__ = (
        "width", "frac", "iters", "atan", "shifts", "signs",
        "pi_raw", "half_pi_raw", "adder",
    )

    def __init__(self, width, frac, iters, atan_raw, csd_shifts, csd_signs,
                 pi_raw, half_pi_raw, adder):
        self.width = width
        self.frac = frac
        self.iters = iters
        self.atan = [int(v) for v in atan_raw]
        self.shifts = [int(v) for v in csd_shifts]
        self.signs = [int(v) for v in csd_signs]
        self.pi_raw = pi_raw
        self.half_pi_raw = half_pi_raw
        self.adder = adder


def build_cordic(width, frac, iters, atan_raw, csd_shifts, csd_signs,
                 pi_raw, half_pi_raw, adder):
    return CordicHandle(width, frac, iters, atan_raw, csd_shifts, csd_signs,
                        pi_raw, half_pi_raw, adder)


def _wrap(width, v):
    v &= (1 << width) - 1
    if v & (1 << (width - 1)):
        v -= 1 << width
    return v


def _addw(ad, x, y):
    r = add_one(ad, x & ad.mask, y & ad.mask, 0) & ad.mask
    if r & (1 << (ad.width - 1)):
        r -= 1 << ad.width
    return r


def _subw(ad, x, y):
    return _addw(ad, x, _wrap(ad.width, -y))


def scale_one(h, v):
    """Multiply by the quantized CORDIC gain inverse via the CSD shift-add chain."""
    ad = h.adder
    acc = 0
    for s, sg in zip(h.shifts, h.signs):
        t = v >> s
        acc = _addw(ad, acc, t) if sg > 0 else _subw(ad, acc, t)
    return acc


def _dseq(h, z):
    ad = h.adder
    ds = []
    for i in range(h.iters):
        if z >= 0:
            ds.append(1)
            z = _subw(ad, z, h.atan[i])
        else:
            ds.append(-1)
            z = _addw(ad, z, h.atan[i])
    return ds


def _apply_seq(h, x, y, ds):
    ad = h.adder
    for i in range(h.iters):
        xi = x >> i
        yi = y >> i
        if ds[i] > 0:
            x = _subw(ad, x, yi)
            y = _addw(ad, y, xi)
        else:
            x = _addw(ad, x, yi)
            y = _subw(ad, y, xi)
    return scale_one(h, x), scale_one(h, y)


def rotate_one(h, x, y, z):
    return _apply_seq(h, x, y, _dseq(h, z))


def vector_one(h, x, y):
    if x == 0 and y == 0:
        return 0, 0
    ad = h.adder
    off = 0
    if x < 0:
        off = h.pi_raw if y >= 0 else -h.pi_raw
        x = _wrap(h.width, -x)
        y = _wrap(h.width, -y)
    z = 0
    for i in range(h.iters):
        xi = x >> i
        yi = y >> i
        if y >= 0:
            x = _addw(ad, x, yi)
            y = _subw(ad, y, xi)
            z = _addw(ad, z, h.atan[i])
        else:
            x = _subw(ad, x, yi)
            y = _addw(ad, y, xi)
            z = _subw(ad, z, h.atan[i])
    # bias trim: truncating shifts pump ~half an ulp per iteration into the
    # magnitude accumulator; subtract the accrued offset before compensation
    x = _addw(ad, x, _wrap(h.width, -(h.iters >> 1)))
    mag = scale_one(h, x)
    if mag < 0:
        mag = 0
    ang = _addw(ad, z, off) if off else z
    return mag, ang


def rotate_pairs(h, xs, ys, z, fold):
    """Rotate each (xs[i], ys[i]) in place by the angle with raw value z.

    With fold nonzero, angles beyond +-pi/2 are pre-reduced by negating the
    pair and rotating by z -+ pi, which keeps the residual angle inside the
    CORDIC convergence range.
    """
    neg = False
    if fold:
        if z > h.half_pi_raw:
            z -= h.pi_raw
            neg = True
        elif z < -h.half_pi_raw:
            z += h.pi_raw
            neg = True
    ds = _dseq(h, z)
    w = h.width
    n = xs.shape[0]
    for t in range(n):
        x = int(xs[t])
        y = int(ys[t])
        if x == 0 and y == 0:
            continue
        if neg:
            x = _wrap(w, -x)
            y = _wrap(w, -y)
        x, y = _apply_seq(h, x, y, ds)
        xs[t] = x
        ys[t] = y
