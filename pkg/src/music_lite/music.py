"""Range-domain MUSIC on top of the fixed-point SVD.

Snapshots are per-symbol subcarrier vectors, so the "array" dimension is
the subcarrier index and the steering vector is the delay phase ramp
a(r)[n] = exp(-j 2 pi n df 2r/c). Only the covariance decomposition runs
in approximate fixed point; covariance accumulation, steering, spectrum
evaluation and the peak search stay in host floating precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cordic import CordicConfig
from .svd import FixedMatrix, svd

C_LIGHT = 299792458.0
SPECTRUM_FLOOR = 1e-12


@dataclass(frozen=True)
class MusicConfig:
    n_targets: int = 1
    grid_points: int = 5000
    subcarrier_spacing_hz: float = 960e3
    forward_backward: bool = False

    def __post_init__(self):
        if self.n_targets < 1:
            raise ValueError("n_targets must be >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier spacing must be positive")

    @property
    def range_max_m(self) -> float:
        """Unambiguous range c/(2 df), the period of the delay phase ramp."""
        return C_LIGHT / (2.0 * self.subcarrier_spacing_hz)

    @property
    def grid_step_m(self) -> float:
        return self.range_max_m / self.grid_points

    def grid(self) -> np.ndarray:
        return np.arange(self.grid_points) * self.grid_step_m


@dataclass
class MusicSpectrum:
    grid: np.ndarray
    p_mu: np.ndarray
    peaks: list[float] = field(default_factory=list)
    shortfall: bool = False


def covariance(d: np.ndarray, forward_backward: bool = False) -> np.ndarray:
    """Snapshot covariance R = (1/M) sum_m d_m d_m^H, exactly Hermitian.

    d is the N x M snapshot grid (columns are snapshots). With
    forward_backward, R is averaged with J conj(R) J (J the exchange
    matrix), the standard decorrelation step.
    """
    d = np.asarray(d, dtype=np.complex128)
    if d.ndim != 2 or d.shape[1] < 1:
        raise ValueError("expected an N x M snapshot matrix")
    r = d @ d.conj().T / d.shape[1]
    r = (r + r.conj().T) / 2.0
    if forward_backward:
        rb = np.conj(r[::-1, ::-1])
        r = (r + rb) / 2.0
        r = (r + r.conj().T) / 2.0
    return r


def steering(r_m: float, n_subcarriers: int, spacing_hz: float) -> np.ndarray:
    """Delay-domain steering vector for range r: unit-modulus phase ramp."""
    r_amb = C_LIGHT / (2.0 * spacing_hz)
    if not 0.0 <= r_m < r_amb:
        raise ValueError(f"range {r_m} outside [0, {r_amb}) m")
    n = np.arange(n_subcarriers)
    return np.exp(-2j * math.pi * n * spacing_hz * (2.0 * r_m / C_LIGHT))


def noise_subspace(r: np.ndarray, n_targets: int,
                   cordic_cfg: CordicConfig) -> np.ndarray:
    """Columns of U spanning the N - K smallest singular directions of R.

    R is quantized into fixed point (power-of-two prescale) and decomposed
    by the CORDIC SVD, so the configured adder shapes the subspace split.
    Raises NonConvergenceError when the decomposition stalls.
    """
    r = np.asarray(r, dtype=np.complex128)
    n = r.shape[0]
    if r.shape != (n, n):
        raise ValueError("covariance must be square")
    if not 1 <= n_targets < n:
        raise ValueError("need 1 <= n_targets < matrix order")
    fx = FixedMatrix.from_complex(r, cordic_cfg.fmt)
    res = svd(fx, cordic_cfg)
    return res.u[:, n_targets:]


def pseudospectrum(e_n: np.ndarray, cfg: MusicConfig) -> MusicSpectrum:
    """P_MU(r) = 1 / ||E_N^H a(r)||^2 over the uniform range grid.

    The denominator is floored at 1e-12; peaks (the n_targets largest
    local maxima) are attached to the returned spectrum.
    """
    e_n = np.asarray(e_n, dtype=np.complex128)
    n_sub = e_n.shape[0]
    grid = cfg.grid()
    phase = np.exp(
        -2j * math.pi * (2.0 * cfg.subcarrier_spacing_hz / C_LIGHT)
        * np.outer(np.arange(n_sub), grid))
    proj = e_n.conj().T @ phase
    den = np.einsum("ij,ij->j", proj, proj.conj()).real
    p_mu = 1.0 / np.maximum(den, SPECTRUM_FLOOR)
    spec = MusicSpectrum(grid=grid, p_mu=p_mu)
    spec.peaks, spec.shortfall = peak_search(spec, cfg.n_targets)
    return spec


def peak_search(spectrum: MusicSpectrum, n_targets: int
                ) -> tuple[list[float], bool]:
    """The n_targets largest local maxima of p_mu, descending by value.

    A point qualifies when it is >= every real neighbor and > at least one
    of them; endpoints qualify against their single neighbor, so monotone
    spectra keep a candidate while perfectly flat ones have none. Ties in
    value break toward smaller range. Returns (ranges, shortfall flag).
    """
    if n_targets < 1:
        raise ValueError("n_targets must be >= 1")
    p = np.asarray(spectrum.p_mu, dtype=np.float64)
    g = len(p)
    ge_l = np.empty(g, dtype=bool)
    ge_r = np.empty(g, dtype=bool)
    gt_l = np.zeros(g, dtype=bool)
    gt_r = np.zeros(g, dtype=bool)
    ge_l[0] = True
    ge_l[1:] = p[1:] >= p[:-1]
    ge_r[-1] = True
    ge_r[:-1] = p[:-1] >= p[1:]
    gt_l[1:] = p[1:] > p[:-1]
    gt_r[:-1] = p[:-1] > p[1:]
    cand = np.flatnonzero(ge_l & ge_r & (gt_l | gt_r))
    if len(cand) == 0:
        return [], True
    order = np.lexsort((cand, -p[cand]))
    chosen = cand[order[:n_targets]]
    peaks = [float(spectrum.grid[i]) for i in chosen]
    return peaks, len(chosen) < n_targets


def write_spectrum_csv(spectrum: MusicSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("range_m,p_mu\n")
        for r, p in zip(spectrum.grid, spectrum.p_mu):
            fh.write(f"{float(r)!r},{float(p)!r}\n")
