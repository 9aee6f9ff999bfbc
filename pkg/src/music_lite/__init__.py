"""Approximate-adder MUSIC testbed: fixed-point CORDIC SVD inside a
range-domain MUSIC estimator, fed by an OFDM radar pipeline."""

__version__ = "0.1.0"

from .adders import (AdderModel, ErrorMetrics, GateCost, acla_adder,
                     characterize, exact_adder, gate_cost, lower_or_adder,
                     netlist_adder, parse_adder, truncated_adder)
from .cordic import (DEFAULT_FORMAT, CordicConfig, cordic_gain, cordic_rotate,
                     cordic_vector, gain_compensate)
from .dse import (ConfigError, DsePoint, QualityConstraints, SweepPlan,
                  SweepResult, apply_constraints, design_points, emit_report,
                  pareto_filter, run_sweep)
from .fixedpoint import FixedFormat, FixedWord, fx_add, fx_sub
from .music import (MusicConfig, MusicSpectrum, covariance, noise_subspace,
                    peak_search, pseudospectrum, steering, write_spectrum_csv)
from .ofdm import (OfdmConfig, RadarScene, RngSpec, RunResult, build_frame,
                   channel, reciprocal_filter, run_pipeline)
from .svd import (Bidiagonal, FixedMatrix, NonConvergenceError, SvdResult,
                  bidiagonalize, diagonalize, svd)

__all__ = [name for name in dir() if not name.startswith("_")]
