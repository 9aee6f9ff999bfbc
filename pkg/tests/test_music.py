"""Range-domain MUSIC pieces: steering, covariance, subspace, peak logic."""

import math

import numpy as np
import pytest

from music_lite.cordic import CordicConfig
from music_lite.music import (C_LIGHT, MusicConfig, MusicSpectrum, covariance,
                              noise_subspace, peak_search, pseudospectrum,
                              steering, write_spectrum_csv)

SPACING = 960e3


def unit_symbols(rng, n):
    return np.exp(2j * math.pi * rng.uniform(size=n))


def rank_one_cov(r_m, n_sub, n_snap, seed):
    rng = np.random.default_rng(seed)
    a = steering(r_m, n_sub, SPACING)
    d = np.outer(a, unit_symbols(rng, n_snap))
    return covariance(d)


class TestConfig:
    def test_defaults(self):
        cfg = MusicConfig()
        assert cfg.range_max_m == pytest.approx(156.14190520833333, rel=1e-15)
        assert cfg.grid_step_m == cfg.range_max_m / 5000
        grid = cfg.grid()
        assert len(grid) == 5000
        assert grid[0] == 0.0
        assert grid[1] == cfg.grid_step_m

    def test_validation(self):
        with pytest.raises(ValueError):
            MusicConfig(n_targets=0)
        with pytest.raises(ValueError):
            MusicConfig(grid_points=1)
        with pytest.raises(ValueError):
            MusicConfig(subcarrier_spacing_hz=0.0)


class TestSteering:
    def test_zero_range_is_all_ones(self):
        assert np.array_equal(steering(0.0, 16, SPACING), np.ones(16))

    def test_half_ambiguity_alternates_sign(self):
        r = C_LIGHT / (4.0 * SPACING)
        a = steering(r, 16, SPACING)
        expect = (-1.0) ** np.arange(16)
        assert np.abs(a - expect).max() <= 1e-12

    def test_unit_modulus_and_norm(self):
        a = steering(37.125, 32, SPACING)
        assert np.abs(np.abs(a) - 1.0).max() <= 1e-15
        assert np.vdot(a, a).real == pytest.approx(32.0, rel=1e-15)

    def test_range_outside_ambiguity_rejected(self):
        r_amb = C_LIGHT / (2.0 * SPACING)
        with pytest.raises(ValueError):
            steering(r_amb, 16, SPACING)
        with pytest.raises(ValueError):
            steering(-0.1, 16, SPACING)


class TestCovariance:
    def test_single_snapshot_outer_product(self):
        rng = np.random.default_rng(4)
        d = rng.standard_normal((6, 1)) + 1j * rng.standard_normal((6, 1))
        r = covariance(d)
        # matmul and outer may round differently, so compare to the ulp
        assert np.abs(r - np.outer(d[:, 0], d[:, 0].conj())).max() <= 1e-14
        assert not r.diagonal().imag.any()

    def test_exactly_hermitian(self):
        rng = np.random.default_rng(9)
        d = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
        r = covariance(d)
        assert np.array_equal(r, r.conj().T)

    def test_noiseless_snapshots_are_rank_one(self):
        r = rank_one_cov(42.0, 16, 8, seed=12)
        s = np.linalg.svd(r, compute_uv=False)
        assert s[1] < 1e-8 * s[0]

    def test_forward_backward_persymmetry(self):
        rng = np.random.default_rng(13)
        d = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
        r = covariance(d, forward_backward=True)
        assert np.array_equal(r, r.conj().T)
        assert np.abs(r - np.conj(r[::-1, ::-1])).max() <= 1e-12

    def test_bad_shapes_rejected(self):
        with pytest.raises(ValueError):
            covariance(np.ones(5))
        with pytest.raises(ValueError):
            covariance(np.ones((4, 0)))


class TestNoiseSubspace:
    def test_identity_covariance(self):
        e_n = noise_subspace(np.eye(4), 1, CordicConfig())
        assert np.array_equal(e_n, np.eye(4)[:, 1:])

    def test_orthogonal_to_steering(self):
        r0 = 42.0
        r = rank_one_cov(r0, 16, 8, seed=21)
        e_n = noise_subspace(r, 1, CordicConfig())
        a = steering(r0, 16, SPACING)
        assert np.linalg.norm(e_n.conj().T @ a) <= 1e-2 * np.linalg.norm(a)

    def test_max_targets_leaves_one_column(self):
        r = rank_one_cov(10.0, 6, 4, seed=3)
        e_n = noise_subspace(r, 5, CordicConfig())
        assert e_n.shape == (6, 1)

    def test_validation(self):
        with pytest.raises(ValueError):
            noise_subspace(np.ones((3, 4)), 1, CordicConfig())
        with pytest.raises(ValueError):
            noise_subspace(np.eye(4), 0, CordicConfig())
        with pytest.raises(ValueError):
            noise_subspace(np.eye(4), 4, CordicConfig())


class TestPseudospectrum:
    def test_identity_covariance_is_flat(self):
        cfg = MusicConfig()
        e_n = np.eye(8)[:, 1:].astype(np.complex128)
        spec = pseudospectrum(e_n, cfg)
        # flat up to float ripple; exactly-flat peak handling is covered in
        # TestPeakSearch on synthetic arrays
        assert np.abs(spec.p_mu - 1.0 / 7.0).max() <= 1e-9

    def test_on_grid_target_peaks_at_its_cell(self):
        cfg = MusicConfig()
        r0 = float(cfg.grid()[1600])
        r = rank_one_cov(r0, 32, 8, seed=31)
        e_n = noise_subspace(r, 1, CordicConfig())
        spec = pseudospectrum(e_n, cfg)
        assert not spec.shortfall
        assert spec.peaks[0] == r0
        assert spec.p_mu.argmax() == 1600


class TestPeakSearch:
    def spectrum(self, p):
        p = np.asarray(p, dtype=np.float64)
        return MusicSpectrum(grid=np.arange(len(p), dtype=np.float64), p_mu=p)

    def test_monotone_rise_keeps_the_endpoint(self):
        peaks, short = peak_search(self.spectrum([1, 2, 3, 4]), 1)
        assert peaks == [3.0]
        assert not short

    def test_flat_spectrum_has_no_peaks(self):
        peaks, short = peak_search(self.spectrum([2, 2, 2, 2]), 1)
        assert peaks == []
        assert short

    def test_two_peaks_ordered_by_height(self):
        p = [1, 5, 1, 1, 7, 1]
        peaks, short = peak_search(self.spectrum(p), 2)
        assert peaks == [4.0, 1.0]
        assert not short

    def test_ties_break_toward_smaller_range(self):
        p = [1, 5, 1, 5, 1]
        peaks, _ = peak_search(self.spectrum(p), 1)
        assert peaks == [1.0]

    def test_plateau_keeps_only_its_edges(self):
        p = [1, 2, 2, 2, 1]
        peaks, _ = peak_search(self.spectrum(p), 4)
        assert peaks == [1.0, 3.0]

    def test_shortfall_reports_partial_list(self):
        peaks, short = peak_search(self.spectrum([1, 5, 1]), 3)
        assert peaks == [1.0]
        assert short

    def test_rejects_bad_target_count(self):
        with pytest.raises(ValueError):
            peak_search(self.spectrum([1, 2, 1]), 0)


class TestSpectrumCsv:
    def test_header_and_repr_rows(self, tmp_path):
        spec = MusicSpectrum(grid=np.array([0.0, 0.1]),
                             p_mu=np.array([1.5, 0.3333333333333333]))
        out = tmp_path / "spec.csv"
        write_spectrum_csv(spec, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "range_m,p_mu"
        assert lines[1] == "0.0,1.5"
        assert lines[2] == "0.1,0.3333333333333333"
