"""Monte-Carlo SNR sweeps over adder configurations and the Pareto view.

A sweep runs the full radar pipeline runs_per_cell times for every
(adder, SNR) cell. Per-run RNG streams derive from (base_seed, snr index,
run index) and deliberately not from the adder, so every adder sees the
same noise and symbol draws (common random numbers) and parallel
execution reproduces the serial rows bit for bit.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adders import AdderModel, gate_cost, parse_adder
from .cordic import DEFAULT_FORMAT, CordicConfig
from .fixedpoint import FixedFormat
from .music import MusicConfig
from .ofdm import OfdmConfig, RadarScene, RngSpec, run_pipeline

DSE_FOOTER = ("# proxy costs are unit-gate counts; synthesized-silicon "
              "area/power savings do not transfer to these units")


class ConfigError(ValueError):
    """Invalid run configuration (maps to exit code 2 in the CLI)."""


@dataclass(frozen=True)
class SweepPlan:
    adders: tuple[str, ...] = ("cla:16", "acla:16:4", "loa:16:2", "loa:16:4",
                               "trunc:16:2", "trunc:16:4")
    snrs_db: tuple[float, ...] = (-5.0, 0.0, 5.0, 10.0, 15.0)
    runs_per_cell: int = 100
    base_seed: int = 2024

    def __post_init__(self):
        if not self.adders:
            raise ConfigError("sweep needs at least one adder")
        if not self.snrs_db:
            raise ConfigError("sweep needs at least one SNR point")
        if self.runs_per_cell < 1:
            raise ConfigError("runs_per_cell must be >= 1")
        for spec in self.adders:
            parse_adder(spec)


@dataclass
class RunRow:
    adder: str
    snr_db: float
    run: int
    seed: int
    estimated_range_m: float
    abs_error_pct: float
    converged: bool


@dataclass
class AggregateRow:
    adder: str
    snr_db: float
    runs: int
    converged: int
    mean_error_pct: float
    std_error_pct: float


@dataclass
class SweepResult:
    plan: SweepPlan
    rows: list[RunRow]
    aggregates: list[AggregateRow]


@dataclass
class DsePoint:
    adder: str
    mean_error_pct: float
    area_proxy: float
    power_proxy: float
    converged_fraction: float
    area_saving_pct: float = math.nan
    power_saving_pct: float = math.nan
    dominated: bool = False


@dataclass(frozen=True)
class QualityConstraints:
    """At least one bound must be set; savings are relative to the exact
    carry-lookahead baseline, which must be part of the sweep."""
    max_error_pct: float | None = None
    min_area_saving_pct: float | None = None
    min_power_saving_pct: float | None = None

    def __post_init__(self):
        if (self.max_error_pct is None and self.min_area_saving_pct is None
                and self.min_power_saving_pct is None):
            raise ConfigError("quality constraints need at least one bound")


def run_seed(base_seed: int, snr_index: int, run: int) -> RngSpec:
    """Adder-independent per-run stream (common random numbers)."""
    return RngSpec(base_seed, (snr_index, run))


def _run_cell(adder_spec: str, snr_db: float, snr_index: int,
              plan: SweepPlan, ofdm: OfdmConfig, scene: RadarScene,
              music: MusicConfig, fmt: FixedFormat,
              iterations: int | None) -> list[RunRow]:
    cc = CordicConfig(fmt=fmt, adder=parse_adder(adder_spec),
                      iterations=iterations)
    cell_scene = dataclasses.replace(scene, snr_db=snr_db)
    rows = []
    for run in range(plan.runs_per_cell):
        spec = run_seed(plan.base_seed, snr_index, run)
        res = run_pipeline(ofdm, cell_scene, music, cc, spec)
        rows.append(RunRow(adder=adder_spec, snr_db=snr_db, run=run,
                           seed=spec.state_word(),
                           estimated_range_m=res.estimated_range_m,
                           abs_error_pct=res.abs_error_pct,
                           converged=res.converged))
    return rows


def run_sweep(plan: SweepPlan, ofdm: OfdmConfig | None = None,
              scene: RadarScene | None = None,
              music: MusicConfig | None = None,
              fmt: FixedFormat = DEFAULT_FORMAT,
              iterations: int | None = None, jobs: int = 1) -> SweepResult:
    """All (adder, SNR) cells of the plan; rows sorted by (adder, snr, run).

    jobs > 1 farms cells out to worker processes; the assembled result is
    identical to a serial run. Cell means cover converged runs with a
    finite error (a run whose spectrum had no peak is excluded the same
    way a non-converged decomposition is).
    """
    ofdm = ofdm if ofdm is not None else OfdmConfig()
    scene = scene if scene is not None else RadarScene()
    music = music if music is not None else MusicConfig()
    cells = [(a, snr, i) for a in plan.adders
             for i, snr in enumerate(plan.snrs_db)]
    args = [(a, snr, i, plan, ofdm, scene, music, fmt, iterations)
            for a, snr, i in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_cell_star, args))
    else:
        chunks = [_run_cell(*a) for a in args]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.adder, r.snr_db, r.run))
    aggregates = _aggregate(rows)
    return SweepResult(plan=plan, rows=rows, aggregates=aggregates)


def _run_cell_star(args):
    return _run_cell(*args)


def _aggregate(rows: list[RunRow]) -> list[AggregateRow]:
    cells: dict[tuple[str, float], list[RunRow]] = {}
    for r in rows:
        cells.setdefault((r.adder, r.snr_db), []).append(r)
    out = []
    for (adder, snr), cell in sorted(cells.items()):
        good = [r.abs_error_pct for r in cell
                if r.converged and math.isfinite(r.abs_error_pct)]
        if good:
            mean = float(np.mean(good))
            std = float(np.std(good))
        else:
            mean = math.nan
            std = math.nan
        out.append(AggregateRow(adder=adder, snr_db=snr, runs=len(cell),
                                converged=len(good), mean_error_pct=mean,
                                std_error_pct=std))
    return out


def _baseline_name(points: list[DsePoint]) -> str | None:
    for p in points:
        family = p.adder.split(":")[0]
        if family == "cla":
            return p.adder
    return None


def design_points(result: SweepResult) -> list[DsePoint]:
    """One accuracy/area/power point per adder, in plan order.

    Accuracy is the pooled mean error over the positive-SNR cells
    (the low-SNR regime degrades every adder and would mask the
    arithmetic differences). Savings columns are filled when an exact
    carry-lookahead adder is part of the plan.
    """
    pos = [s for s in result.plan.snrs_db if s > 0]
    if not pos:
        raise ConfigError("design points need at least one positive SNR cell")
    points = []
    for spec in result.plan.adders:
        model = parse_adder(spec)
        cost = gate_cost(model)
        good = [r.abs_error_pct for r in result.rows
                if r.adder == spec and r.snr_db > 0 and r.converged
                and math.isfinite(r.abs_error_pct)]
        total = sum(1 for r in result.rows
                    if r.adder == spec and r.snr_db > 0)
        mean = float(np.mean(good)) if good else math.nan
        frac = len(good) / total if total else 0.0
        points.append(DsePoint(adder=spec, mean_error_pct=mean,
                               area_proxy=cost.area_units,
                               power_proxy=cost.energy_units,
                               converged_fraction=frac))
    base = _baseline_name(points)
    if base is not None:
        bp = next(p for p in points if p.adder == base)
        for p in points:
            p.area_saving_pct = 100.0 * (1.0 - p.area_proxy / bp.area_proxy)
            p.power_saving_pct = 100.0 * (1.0 - p.power_proxy / bp.power_proxy)
    mark_dominated(points)
    return points


def _dominates(p: DsePoint, q: DsePoint) -> bool:
    pa = (p.mean_error_pct, p.area_proxy, p.power_proxy)
    qa = (q.mean_error_pct, q.area_proxy, q.power_proxy)
    if any(math.isnan(v) for v in pa):
        return False
    if any(math.isnan(v) for v in qa):
        return True
    return all(x <= y for x, y in zip(pa, qa)) and any(
        x < y for x, y in zip(pa, qa))


def mark_dominated(points: list[DsePoint]) -> None:
    """Set the dominated flag; a point with no finite mean loses to any
    point with one."""
    for q in points:
        q.dominated = any(p is not q and _dominates(p, q) for p in points)


def pareto_filter(points: list[DsePoint]) -> list[DsePoint]:
    """Non-dominated subset, original order preserved."""
    mark_dominated(points)
    return [p for p in points if not p.dominated]


def apply_constraints(points: list[DsePoint],
                      qc: QualityConstraints) -> list[DsePoint]:
    """Points meeting every configured bound.

    Requires the exact carry-lookahead baseline in the point set because
    the saving bounds are defined against it.
    """
    if _baseline_name(points) is None:
        raise ConfigError(
            "quality constraints need the exact cla baseline in the sweep")
    out = []
    for p in points:
        if qc.max_error_pct is not None and not (
                p.mean_error_pct <= qc.max_error_pct):
            continue
        if qc.min_area_saving_pct is not None and not (
                p.area_saving_pct >= qc.min_area_saving_pct):
            continue
        if qc.min_power_saving_pct is not None and not (
                p.power_saving_pct >= qc.min_power_saving_pct):
            continue
        out.append(p)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def write_runs_csv(rows: list[RunRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("adder,snr_db,run,seed,estimated_range_m,"
                 "abs_error_pct,converged\n")
        for r in rows:
            fh.write(f"{r.adder},{_fmt(r.snr_db)},{r.run},{r.seed},"
                     f"{_fmt(r.estimated_range_m)},{_fmt(r.abs_error_pct)},"
                     f"{int(r.converged)}\n")


def write_aggregates_csv(aggs: list[AggregateRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("adder,snr_db,runs,converged,mean_error_pct,"
                 "std_error_pct\n")
        for a in aggs:
            fh.write(f"{a.adder},{_fmt(a.snr_db)},{a.runs},{a.converged},"
                     f"{_fmt(a.mean_error_pct)},{_fmt(a.std_error_pct)}\n")


def write_dse_csv(points: list[DsePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("adder,mean_error_pct,area_proxy,power_proxy,"
                 "area_saving_pct,power_saving_pct,dominated\n")
        for p in points:
            fh.write(f"{p.adder},{_fmt(p.mean_error_pct)},"
                     f"{_fmt(p.area_proxy)},{_fmt(p.power_proxy)},"
                     f"{_fmt(p.area_saving_pct)},{_fmt(p.power_saving_pct)},"
                     f"{int(p.dominated)}\n")
        fh.write(DSE_FOOTER + "\n")


def emit_report(result: SweepResult, points: list[DsePoint],
                outdir) -> dict[str, str]:
    """Write runs.csv, aggregates.csv and dse.csv; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = {name: os.path.join(outdir, name + ".csv")
             for name in ("runs", "aggregates", "dse")}
    write_runs_csv(result.rows, paths["runs"])
    write_aggregates_csv(result.aggregates, paths["aggregates"])
    write_dse_csv(points, paths["dse"])
    return paths
