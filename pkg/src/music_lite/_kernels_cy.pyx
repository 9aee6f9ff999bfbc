# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels; bit-exact twin of ``music_lite._kernels_py``.

See that module for the semantics. Handles are built through
:mod:`music_lite.kernels`, which owns backend selection.
"""

import numpy as np

ctypedef long long i64

F_EXACT = 0
F_ACLA = 1
F_LOWER_OR = 2
F_TRUNC = 3
F_NETLIST = 4


cdef class AdderHandle:
    cdef public int family
    cdef public int width
    cdef public i64 mask
    cdef public int block
    cdef public int alg1
    cdef public int split
    cdef int[::1] ops
    cdef int[::1] in1
    cdef int[::1] in2
    cdef int[::1] sum_nodes
    cdef int cout_node
    cdef int n_nodes
    cdef unsigned char[::1] vals


def build_adder(family, width, p1, p2, prog):
    cdef AdderHandle h = AdderHandle()
    h.family = family
    h.width = width
    h.mask = (<i64>1 << width) - 1
    h.block = p1 if family == F_ACLA else 0
    h.alg1 = p2 if family == F_ACLA else 0
    h.split = p1 if family in (F_LOWER_OR, F_TRUNC) else 0
    if family == F_NETLIST:
        ops, in1, in2, sum_nodes, cout_node, n_nodes = prog
        h.ops = np.ascontiguousarray(ops, dtype=np.intc)
        h.in1 = np.ascontiguousarray(in1, dtype=np.intc)
        h.in2 = np.ascontiguousarray(in2, dtype=np.intc)
        h.sum_nodes = np.ascontiguousarray(sum_nodes, dtype=np.intc)
        h.cout_node = cout_node
        h.n_nodes = n_nodes
        h.vals = np.zeros(n_nodes, dtype=np.uint8)
    return h


cdef inline i64 _acla_block_carry(i64 ab, i64 bb, int k, int alg1):
    cdef i64 a0 = ab >> (k - 1)
    cdef i64 b0 = bb >> (k - 1)
    cdef i64 a1 = (ab >> (k - 2)) & 1
    cdef i64 b1 = (bb >> (k - 2)) & 1
    cdef i64 a2 = (ab >> (k - 3)) & 1
    cdef i64 b2 = (bb >> (k - 3)) & 1
    cdef i64 p0 = a0 ^ b0
    cdef i64 p1 = a1 ^ b1
    cdef i64 ecu = (a0 & b0) | (p0 & a1 & b1) | (p0 & p1 & a2 & b2)
    cdef i64 gen_low = (ab & bb) & (((<i64>1) << (k - 3)) - 1)
    cdef i64 cju = p0 & p1 & (a2 | b2) & (1 if gen_low != 0 else 0)
    if alg1:
        cju &= a2 ^ b2
    return ecu | cju


cdef i64 _add_one(AdderHandle h, i64 a, i64 b, i64 cin):
    cdef int w = h.width
    cdef int fam = h.family
    cdef int k, sh, hi, i, t, op
    cdef i64 kmask, s, c_prev, cout, ab, bb, tt, lowbits, v, x
    if fam == F_EXACT:
        return a + b + cin
    if fam == F_ACLA:
        k = h.block
        kmask = ((<i64>1) << k) - 1
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
        sh = h.split
        if sh == 0:
            return a + b + cin
        tt = (a >> sh) + (b >> sh)
        if fam == F_LOWER_OR:
            lowbits = (a | b) & (((<i64>1) << sh) - 1)
        else:
            lowbits = 0
        hi = w - sh
        return ((tt & (((<i64>1) << hi) - 1)) << sh) | lowbits | ((tt >> hi) << w)
    # netlist
    for i in range(w):
        h.vals[i] = <unsigned char>((a >> i) & 1)
        h.vals[w + i] = <unsigned char>((b >> i) & 1)
    h.vals[2 * w] = <unsigned char>cin
    cdef int base = 2 * w + 1
    cdef int ngates = h.ops.shape[0]
    for t in range(ngates):
        op = h.ops[t]
        x = h.vals[h.in1[t]]
        if op == 0:
            v = x & h.vals[h.in2[t]]
        elif op == 1:
            v = x | h.vals[h.in2[t]]
        elif op == 2:
            v = x ^ 1
        elif op == 3:
            v = x ^ h.vals[h.in2[t]]
        elif op == 4:
            v = (x & h.vals[h.in2[t]]) ^ 1
        elif op == 5:
            v = (x | h.vals[h.in2[t]]) ^ 1
        elif op == 6:
            v = x ^ h.vals[h.in2[t]] ^ 1
        else:
            v = x
        h.vals[base + t] = <unsigned char>v
    s = 0
    for i in range(w):
        s |= (<i64>h.vals[h.sum_nodes[i]]) << i
    return s | ((<i64>h.vals[h.cout_node]) << w)


def add_one(AdderHandle h, a, b, cin):
    return _add_one(h, a, b, cin)


def add_batch(AdderHandle h, i64[:] a, i64[:] b, i64[:] out):
    cdef Py_ssize_t i, n = a.shape[0]
    for i in range(n):
        out[i] = _add_one(h, a[i], b[i], 0)


cdef class CordicHandle:
    cdef public int width
    cdef public int frac
    cdef public int iters
    cdef i64[::1] atan
    cdef int[::1] shifts
    cdef int[::1] signs
    cdef public i64 pi_raw
    cdef public i64 half_pi_raw
    cdef public AdderHandle adder
    cdef int dbuf[64]


def build_cordic(width, frac, iters, atan_raw, csd_shifts, csd_signs,
                 pi_raw, half_pi_raw, adder):
    if iters > 64:
        raise ValueError("iteration count above compiled kernel limit (64)")
    cdef CordicHandle h = CordicHandle()
    h.width = width
    h.frac = frac
    h.iters = iters
    h.atan = np.ascontiguousarray(atan_raw, dtype=np.int64)
    h.shifts = np.ascontiguousarray(csd_shifts, dtype=np.intc)
    h.signs = np.ascontiguousarray(csd_signs, dtype=np.intc)
    h.pi_raw = pi_raw
    h.half_pi_raw = half_pi_raw
    h.adder = adder
    return h


cdef inline i64 _wrap(int width, i64 v):
    v &= ((<i64>1) << width) - 1
    if v & ((<i64>1) << (width - 1)):
        v -= (<i64>1) << width
    return v


cdef inline i64 _addw(AdderHandle ad, i64 x, i64 y):
    cdef i64 r = _add_one(ad, x & ad.mask, y & ad.mask, 0) & ad.mask
    if r & ((<i64>1) << (ad.width - 1)):
        r -= (<i64>1) << ad.width
    return r


cdef inline i64 _subw(AdderHandle ad, i64 x, i64 y):
    return _addw(ad, x, _wrap(ad.width, -y))


cdef i64 _scale(CordicHandle h, i64 v):
    cdef i64 acc = 0, t
    cdef Py_ssize_t j, n = h.shifts.shape[0]
    for j in range(n):
        t = v >> h.shifts[j]
        if h.signs[j] > 0:
            acc = _addw(h.adder, acc, t)
        else:
            acc = _subw(h.adder, acc, t)
    return acc


cdef void _dseq(CordicHandle h, i64 z):
    cdef int i
    for i in range(h.iters):
        if z >= 0:
            h.dbuf[i] = 1
            z = _subw(h.adder, z, h.atan[i])
        else:
            h.dbuf[i] = -1
            z = _addw(h.adder, z, h.atan[i])


cdef void _apply_seq(CordicHandle h, i64 *px, i64 *py):
    cdef i64 x = px[0], y = py[0], xi, yi
    cdef int i
    for i in range(h.iters):
        xi = x >> i
        yi = y >> i
        if h.dbuf[i] > 0:
            x = _subw(h.adder, x, yi)
            y = _addw(h.adder, y, xi)
        else:
            x = _addw(h.adder, x, yi)
            y = _subw(h.adder, y, xi)
    px[0] = _scale(h, x)
    py[0] = _scale(h, y)


def scale_one(CordicHandle h, v):
    return _scale(h, v)


def rotate_one(CordicHandle h, x, y, z):
    cdef i64 cx = x, cy = y
    _dseq(h, z)
    _apply_seq(h, &cx, &cy)
    return cx, cy


def vector_one(CordicHandle h, x0, y0):
    cdef i64 x = x0, y = y0, z = 0, off = 0, xi, yi
    cdef int i
    if x == 0 and y == 0:
        return 0, 0
    if x < 0:
        off = h.pi_raw if y >= 0 else -h.pi_raw
        x = _wrap(h.width, -x)
        y = _wrap(h.width, -y)
    for i in range(h.iters):
        xi = x >> i
        yi = y >> i
        if y >= 0:
            x = _addw(h.adder, x, yi)
            y = _subw(h.adder, y, xi)
            z = _addw(h.adder, z, h.atan[i])
        else:
            x = _subw(h.adder, x, yi)
            y = _addw(h.adder, y, xi)
            z = _subw(h.adder, z, h.atan[i])
    # bias trim: truncating shifts pump ~half an ulp per iteration into the
    # magnitude accumulator; subtract the accrued offset before compensation
    x = _addw(h.adder, x, _wrap(h.width, -(h.iters >> 1)))
    cdef i64 mag = _scale(h, x)
    if mag < 0:
        mag = 0
    cdef i64 ang = _addw(h.adder, z, off) if off != 0 else z
    return mag, ang


def rotate_pairs(CordicHandle h, i64[:] xs, i64[:] ys, z, fold):
    cdef i64 cz = z
    cdef bint neg = False
    if fold:
        if cz > h.half_pi_raw:
            cz -= h.pi_raw
            neg = True
        elif cz < -h.half_pi_raw:
            cz += h.pi_raw
            neg = True
    _dseq(h, cz)
    cdef Py_ssize_t t, n = xs.shape[0]
    cdef i64 x, y
    cdef int w = h.width
    for t in range(n):
        x = xs[t]
        y = ys[t]
        if x == 0 and y == 0:
            continue
        if neg:
            x = _wrap(w, -x)
            y = _wrap(w, -y)
        _apply_seq(h, &x, &y)
        xs[t] = x
        ys[t] = y
