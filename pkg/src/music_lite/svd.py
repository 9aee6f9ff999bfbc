"""Complex fixed-point SVD built from CORDIC Givens rotations.

The decomposition is the two-stage Golub-Kahan scheme. Stage one makes the
matrix real upper bidiagonal: per column, every entry is phase-normalized
(a vectoring on its re/im pair yields magnitude and phase; the phase is
unwound across the row or column) and then zeroed against the diagonal by
a real Givens rotation whose angle again comes from a vectoring. Stage two
runs zero-shift bulge-chasing QR sweeps on the bidiagonal until every
superdiagonal entry is negligible relative to its diagonal neighbors.

Every rotation is applied to the working matrix and to the accumulated
left/right factors as it is generated; nothing is deferred or multiplied
out later. All arithmetic below the ingest quantization runs on raw
integer words through the configured adder, so approximate adders perturb
the whole decomposition, which is the point of the exercise.

Ingest prescales by a power of two chosen from the Frobenius norm, which
bounds every singular value and intermediate column norm by one; with the
CORDIC gain under 1.65 and sqrt(2)-sized pairs, no intermediate can reach
the Q2.13 limit of 4, so wraparound stays confined to what the approximate
adders themselves introduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cordic import CordicConfig
from .fixedpoint import FixedFormat, FixedWord

SWEEP_CAP_FACTOR = 30   # max QR sweeps = 30 * n
DEFLATE_FLOOR_ULP = 8   # absolute floor: deflation and mid-chase bulge drops
STALL_SWEEPS = 3        # non-shrinking sweeps tolerated before forcing deflation


class NonConvergenceError(RuntimeError):
    """QR sweeps hit the cap with superdiagonal mass left.

    A reportable outcome, not a crash: harness code records the run as
    non-converged and moves on.
    """

    def __init__(self, sweeps: int, residual: float):
        super().__init__(
            f"bidiagonal QR did not converge in {sweeps} sweeps "
            f"(residual {residual:.3e})")
        self.sweeps = sweeps
        self.residual = residual


@dataclass
class FixedMatrix:
    """Complex matrix as raw integer re/im parts plus a power-of-two scale.

    float value = (re + 1j*im) * 2**-frac * 2**scale.
    """

    fmt: FixedFormat
    scale: int
    re: np.ndarray
    im: np.ndarray

    @classmethod
    def from_complex(cls, a, fmt: FixedFormat,
                     scale: int | None = None) -> "FixedMatrix":
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if scale is None:
            # every intermediate 2-vector during the decomposition is
            # bounded by the spectral norm, so prescale by a sound sigma_1
            # bound into (1.2, 2.4]: the CORDIC growth factor K*2.4 < 4
            # still fits the two integer bits, and a covariance-like
            # matrix (sigma_1 ~ N * entry) keeps twice the entry
            # resolution a Frobenius rule would leave it
            fro = float(np.linalg.norm(a))
            if fro == 0.0:
                scale = 0
            else:
                mags = np.abs(a)
                mixed = math.sqrt(float(mags.sum(axis=0).max())
                                  * float(mags.sum(axis=1).max()))
                bound = min(fro, mixed)
                scale = math.ceil(math.log2(bound / 2.4))
        factor = math.ldexp(1.0, fmt.frac - scale)
        re = np.round(a.real * factor).astype(np.int64)
        im = np.round(a.imag * factor).astype(np.int64)
        top = max(int(np.abs(re).max(initial=0)), int(np.abs(im).max(initial=0)))
        if top > fmt.max_raw:
            raise OverflowError("matrix does not fit the format at this scale")
        return cls(fmt=fmt, scale=scale, re=re, im=im)

    @classmethod
    def identity(cls, n: int, fmt: FixedFormat) -> "FixedMatrix":
        one = 1 << fmt.frac
        return cls(fmt=fmt, scale=0,
                   re=np.eye(n, dtype=np.int64) * one,
                   im=np.zeros((n, n), dtype=np.int64))

    @property
    def shape(self):
        return self.re.shape

    def to_complex(self, apply_scale: bool = True) -> np.ndarray:
        out = (self.re + 1j * self.im) * self.fmt.ulp
        return out * math.ldexp(1.0, self.scale) if apply_scale else out


@dataclass
class Bidiagonal:
    """Real upper-bidiagonal core: diagonal d, superdiagonal e (raw words)."""

    fmt: FixedFormat
    scale: int
    m: int
    d: np.ndarray
    e: np.ndarray

    def to_dense(self, apply_scale: bool = True) -> np.ndarray:
        n = len(self.d)
        b = np.zeros((self.m, n))
        b[np.arange(n), np.arange(n)] = self.d * self.fmt.ulp
        if n > 1:
            b[np.arange(n - 1), np.arange(1, n)] = self.e * self.fmt.ulp
        return b * math.ldexp(1.0, self.scale) if apply_scale else b


@dataclass
class SvdResult:
    fmt: FixedFormat
    scale: int
    u_re: np.ndarray
    u_im: np.ndarray
    s_raw: np.ndarray
    v_re: np.ndarray
    v_im: np.ndarray
    sweeps: int

    @property
    def u(self) -> np.ndarray:
        return (self.u_re + 1j * self.u_im) * self.fmt.ulp

    @property
    def v(self) -> np.ndarray:
        return (self.v_re + 1j * self.v_im) * self.fmt.ulp

    @property
    def s_scaled(self) -> np.ndarray:
        """Singular values of the prescaled matrix (unit norm domain)."""
        return self.s_raw * self.fmt.ulp

    @property
    def s(self) -> np.ndarray:
        """Singular values of the ingested matrix."""
        return self.s_scaled * math.ldexp(1.0, self.scale)


def givens_from(cfg: CordicConfig, x: FixedWord, y: FixedWord):
    """Rotation parameters annihilating y against x: (magnitude, angle).

    Rotating the pair by minus the returned angle maps it to (magnitude, 0).
    """
    mag, ang = kernels.vector_one(_ch(cfg), x.raw, y.raw)
    return FixedWord(cfg.fmt, mag), FixedWord(cfg.fmt, ang)


def phase_normalize(cfg: CordicConfig, entry_re: FixedWord, entry_im: FixedWord):
    """Magnitude and phase of a complex entry; rotating the entry's re/im
    pair by minus the phase makes it real nonnegative."""
    mag, ang = kernels.vector_one(_ch(cfg), entry_re.raw, entry_im.raw)
    return FixedWord(cfg.fmt, mag), FixedWord(cfg.fmt, ang)


def _ch(cfg: CordicConfig):
    from .cordic import _chandle
    return _chandle(cfg)


class _Worker:
    """Shared rotation plumbing over raw re/im arrays."""

    def __init__(self, cfg: CordicConfig):
        self.ch = _ch(cfg)
        self._x1 = np.zeros(1, dtype=np.int64)
        self._y1 = np.zeros(1, dtype=np.int64)

    def rot1(self, x: int, y: int, ang: int) -> tuple[int, int]:
        self._x1[0] = x
        self._y1[0] = y
        kernels.rotate_pairs(self.ch, self._x1, self._y1, ang)
        return int(self._x1[0]), int(self._y1[0])

    def vec(self, x: int, y: int) -> tuple[int, int]:
        return kernels.vector_one(self.ch, x, y)

    def rows(self, mre, mim, j, r, ang, lo=0):
        if ang == 0:
            return
        kernels.rotate_pairs(self.ch, mre[j, lo:], mre[r, lo:], ang)
        kernels.rotate_pairs(self.ch, mim[j, lo:], mim[r, lo:], ang)

    def cols(self, mre, mim, p, q, ang, lo=0):
        if ang == 0:
            return
        kernels.rotate_pairs(self.ch, mre[lo:, p], mre[lo:, q], ang)
        kernels.rotate_pairs(self.ch, mim[lo:, p], mim[lo:, q], ang)

    def phase_row(self, mre, mim, j, ang, lo=0):
        if ang == 0:
            return
        kernels.rotate_pairs(self.ch, mre[j, lo:], mim[j, lo:], ang)

    def phase_col(self, mre, mim, c, ang, lo=0):
        if ang == 0:
            return
        kernels.rotate_pairs(self.ch, mre[lo:, c], mim[lo:, c], ang)


def _bidiagonalize_raw(wk: _Worker, are, aim, ure, uim, vre, vim):
    m, n = are.shape
    for j in range(n):
        # make the pivot real nonnegative
        if aim[j, j] != 0 or are[j, j] < 0:
            mag, phi = wk.vec(int(are[j, j]), int(aim[j, j]))
            are[j, j] = mag
            aim[j, j] = 0
            wk.phase_row(are, aim, j, -phi, lo=j + 1)
            wk.phase_col(ure, uim, j, phi)
        # zero the column below the diagonal
        for r in range(j + 1, m):
            if aim[r, j] != 0 or are[r, j] < 0:
                mag, phi = wk.vec(int(are[r, j]), int(aim[r, j]))
                are[r, j] = mag
                aim[r, j] = 0
                wk.phase_row(are, aim, r, -phi, lo=j + 1)
                wk.phase_col(ure, uim, r, phi)
            if are[r, j] != 0:
                mag, theta = wk.vec(int(are[j, j]), int(are[r, j]))
                are[j, j] = mag
                are[r, j] = 0
                wk.rows(are, aim, j, r, -theta, lo=j + 1)
                wk.cols(ure, uim, j, r, -theta)
        if j > n - 2:
            continue
        # make the superdiagonal pivot real nonnegative
        if aim[j, j + 1] != 0 or are[j, j + 1] < 0:
            mag, phi = wk.vec(int(are[j, j + 1]), int(aim[j, j + 1]))
            are[j, j + 1] = mag
            aim[j, j + 1] = 0
            wk.phase_col(are, aim, j + 1, -phi, lo=j + 1)
            wk.phase_col(vre, vim, j + 1, -phi)
        # zero the row beyond the superdiagonal
        for c in range(j + 2, n):
            if aim[j, c] != 0 or are[j, c] < 0:
                mag, phi = wk.vec(int(are[j, c]), int(aim[j, c]))
                are[j, c] = mag
                aim[j, c] = 0
                wk.phase_col(are, aim, c, -phi, lo=j + 1)
                wk.phase_col(vre, vim, c, -phi)
            if are[j, c] != 0:
                mag, theta = wk.vec(int(are[j, j + 1]), int(are[j, c]))
                are[j, j + 1] = mag
                are[j, c] = 0
                wk.cols(are, aim, j + 1, c, -theta, lo=j + 1)
                wk.cols(vre, vim, j + 1, c, -theta)


def bidiagonalize(a: FixedMatrix, cfg: CordicConfig):
    """Reduce to real upper-bidiagonal form; returns (left, B, right) with
    a ~ left @ B @ right^H. Requires m >= n (hand in the transpose else)."""
    m, n = a.shape
    if m < n:
        raise ValueError("bidiagonalization expects m >= n; pass the transpose")
    if a.fmt != cfg.fmt:
        raise ValueError("matrix format does not match the CORDIC config")
    are = np.ascontiguousarray(a.re, dtype=np.int64).copy()
    aim = np.ascontiguousarray(a.im, dtype=np.int64).copy()
    left = FixedMatrix.identity(m, a.fmt)
    right = FixedMatrix.identity(n, a.fmt)
    wk = _Worker(cfg)
    _bidiagonalize_raw(wk, are, aim, left.re, left.im, right.re, right.im)
    d = are[np.arange(n), np.arange(n)].copy()
    e = are[np.arange(n - 1), np.arange(1, n)].copy() if n > 1 else \
        np.zeros(0, dtype=np.int64)
    return left, Bidiagonal(fmt=a.fmt, scale=a.scale, m=m, d=d, e=e), right


def _sigma_min_2x2(da: float, eb: float, db: float) -> float:
    """Smaller singular value of [[da, eb], [0, db]] (host-side floats)."""
    t = da * da + eb * eb + db * db
    disc = math.sqrt(max(t * t - 4.0 * (da * db) ** 2, 0.0))
    smax = math.sqrt((t + disc) / 2.0)
    return abs(da * db) / smax if smax > 0.0 else 0.0


def _chase(wk: _Worker, d, e, ure, uim, vre, vim, lo: int, hi: int, gate: int,
           first_theta: int | None = None) -> int:
    """One bulge chase over [lo, hi]; returns where the wavefront stopped.

    With first_theta None the opening rotation comes from vectoring
    (d[lo], e[lo]) and e[lo] is annihilated exactly (zero-shift).
    Otherwise first_theta seeds the sweep (shifted variant); the rest of
    the chase is identical.

    Bulges at or below `gate` raw ulp are dropped instead of annihilated:
    vectoring a noise-floor pair yields an essentially random angle, and
    applying that rotation churns already-converged entries. Dropping
    costs at most `gate` ulp of singular-value accuracy (Weyl bound),
    the same budget the deflation floor already spends. The returned
    index (< hi when a bulge was dropped) lets the caller resume the
    sweep below the drop point so the block bottom is never starved.
    """
    if first_theta is None:
        mag, ang = wk.vec(int(d[lo]), int(e[lo]))
        d[lo] = mag
        e[lo] = 0
        th = -ang
    else:
        th = first_theta
        d[lo], e[lo] = wk.rot1(int(d[lo]), int(e[lo]), th)
    wk.cols(vre, vim, lo, lo + 1, th)
    bulge, d[lo + 1] = wk.rot1(0, int(d[lo + 1]), th)
    for i in range(lo, hi):
        # left rotation on rows (i, i+1) kills the bulge at (i+1, i)
        if abs(bulge) <= gate:
            return i
        mag, ang = wk.vec(int(d[i]), bulge)
        d[i] = mag
        ph = -ang
        wk.cols(ure, uim, i, i + 1, ph)
        e[i], d[i + 1] = wk.rot1(int(e[i]), int(d[i + 1]), ph)
        if i + 1 > hi - 1:
            break
        bulge2, e[i + 1] = wk.rot1(0, int(e[i + 1]), ph)
        # right rotation on cols (i+1, i+2) kills the bulge at (i, i+2)
        if abs(bulge2) <= gate:
            return i + 1
        mag, ang = wk.vec(int(e[i]), bulge2)
        e[i] = mag
        th = -ang
        wk.cols(vre, vim, i + 1, i + 2, th)
        d[i + 1], e[i + 1] = wk.rot1(int(d[i + 1]), int(e[i + 1]), th)
        bulge, d[i + 2] = wk.rot1(0, int(d[i + 2]), th)
    return hi


def diagonalize(b: Bidiagonal, cfg: CordicConfig, left: FixedMatrix | None = None,
                right: FixedMatrix | None = None, max_sweeps: int | None = None):
    """Drive the superdiagonal to zero with implicit-shift QR sweeps.

    Returns (left, d_raw, right, sweeps); rotations are folded into the
    passed factors (fresh identities when omitted). An entry deflates when
    |e_i| <= 2^(2-frac) * (|d_i| + |d_i+1|) or when it sits at the
    quantization floor of a few ulp. Each sweep is seeded by the Wilkinson
    shift taken from the trailing 2x2 of the working block (clustered
    values stall a zero-shift sweep); when the shift falls below the
    quantization of the opening angle the exact zero-shift sweep runs
    instead. Shift selection is host-side control logic; every applied
    rotation runs on the adder datapath. Raises NonConvergenceError at
    the sweep cap.
    """
    n = len(b.d)
    if left is None:
        left = FixedMatrix.identity(n, b.fmt)
    if right is None:
        right = FixedMatrix.identity(n, b.fmt)
    d = b.d.copy()
    e = b.e.copy()
    cap = max_sweeps if max_sweeps is not None else SWEEP_CAP_FACTOR * n
    shift = b.fmt.frac - 2
    wk = _Worker(cfg)
    sweeps = 0
    stall = 0
    prev_block = None
    prev_max = 0
    while True:
        for i in range(n - 1):
            if e[i] != 0:
                lim = (abs(int(d[i])) + abs(int(d[i + 1]))) >> shift
                if abs(int(e[i])) <= max(lim, DEFLATE_FLOOR_ULP):
                    e[i] = 0
        hi = n - 1
        while hi > 0 and e[hi - 1] == 0:
            hi -= 1
        if hi == 0:
            break
        lo = hi - 1
        while lo > 0 and e[lo - 1] != 0:
            lo -= 1
        # an approximate adder's error grain puts a floor under |e| that the
        # relative threshold never reaches; sweeps that stop shrinking the
        # block are burning rotations against that floor, so force the
        # smallest entry out (Weyl: the singular values move by at most |e|).
        # progress is judged against the best level seen for this block, so
        # noise-driven oscillation cannot reset the counter
        blockmax = max(abs(int(e[k])) for k in range(lo, hi))
        if (lo, hi) != prev_block or blockmax < prev_max:
            prev_block = (lo, hi)
            prev_max = blockmax
            stall = 0
        else:
            stall += 1
        if stall >= STALL_SWEEPS:
            k_min = min(range(lo, hi), key=lambda k: abs(int(e[k])))
            e[k_min] = 0
            stall = 0
            prev_block = None
            continue
        if sweeps >= cap:
            residual = float(np.abs(e).max()) * b.fmt.ulp
            raise NonConvergenceError(sweeps, residual)
        sh = _sigma_min_2x2(
            float(abs(int(d[hi - 1]))), float(abs(int(e[hi - 1]))),
            float(abs(int(d[hi]))))
        dmax = float(max(abs(int(d[k])) for k in range(lo, hi + 1)))
        first = None
        if dmax > 0.0 and sh * sh > dmax * dmax * b.fmt.ulp:
            ang = math.atan2(float(d[lo]) * float(e[lo]),
                             float(d[lo]) ** 2 - sh * sh)
            first = -round(ang * (1 << b.fmt.frac))
        # one logical sweep; resume past dropped bulges so the bottom of a
        # graded block still gets worked every sweep
        pos = lo
        while pos < hi:
            stop = _chase(wk, d, e, left.re, left.im, right.re, right.im,
                          pos, hi, DEFLATE_FLOOR_ULP, first)
            first = None
            pos = stop
            while pos < hi and e[pos] == 0:
                pos += 1
        sweeps += 1
    return left, d, right, sweeps


def svd(a, cfg: CordicConfig, max_sweeps: int | None = None) -> SvdResult:
    """Full decomposition a = U diag(S) V^H with S descending nonnegative."""
    if not isinstance(a, FixedMatrix):
        a = FixedMatrix.from_complex(a, cfg.fmt)
    left, b, right = bidiagonalize(a, cfg)
    left, d, right, sweeps = diagonalize(b, cfg, left, right, max_sweeps)
    n = len(d)
    # exact bookkeeping: flip signs, then stable-sort descending
    for i in range(n):
        if d[i] < 0:
            d[i] = -d[i]
            left.re[:, i] = -left.re[:, i]
            left.im[:, i] = -left.im[:, i]
    order = np.argsort(-d, kind="stable")
    d = d[order]
    m = left.re.shape[0]
    full = np.concatenate([order, np.arange(n, m)])
    return SvdResult(
        fmt=a.fmt, scale=a.scale,
        u_re=left.re[:, full], u_im=left.im[:, full],
        s_raw=d,
        v_re=right.re[:, order], v_im=right.im[:, order],
        sweeps=sweeps)
