"""Command-line surface: adder characterization, single pipeline runs,
Monte-Carlo sweeps, and the design-space report.

Exit codes: 0 success, 1 runtime failure (for example every run failed to
converge), 2 configuration or parse error. All commands are deterministic
given (config, seed); --seed overrides the config seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

from . import __version__
from .adders import characterize, parse_adder
from .cordic import CordicConfig
from .dse import (ConfigError, QualityConstraints, SweepPlan,
                  apply_constraints, design_points, emit_report, run_sweep)
from .fixedpoint import FixedFormat
from .music import MusicConfig, write_spectrum_csv
from .ofdm import OfdmConfig, RadarScene, RngSpec, run_pipeline

_SECTIONS = ("ofdm", "scene", "music", "cordic", "adder", "adders",
             "sweep", "output")
DEFAULT_SEED = 2024


def _check_keys(section: str, given: dict, allowed: tuple[str, ...]) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigError(
            f"unknown key(s) in '{section}': {', '.join(unknown)} "
            f"(allowed: {', '.join(allowed)})")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclasses.dataclass
class LoadedConfig:
    ofdm: OfdmConfig
    scene: RadarScene
    music: MusicConfig
    fmt: FixedFormat
    iterations: int | None
    adder: str | None
    adders: tuple[str, ...] | None
    sweep: dict
    outdir: str


def load_config(path: str | None) -> LoadedConfig:
    """Build typed configs from the JSON file, rejecting unknown keys."""
    raw = _load_json(path) if path else {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys("config", raw, _SECTIONS)
    try:
        ofdm_kw = dict(raw.get("ofdm", {}))
        _check_keys("ofdm", ofdm_kw,
                    ("carrier_hz", "n_subcarriers", "n_symbols",
                     "subcarrier_spacing_hz", "cp_duration_s", "modulation"))
        ofdm = OfdmConfig(**ofdm_kw)

        scene_kw = dict(raw.get("scene", {}))
        _check_keys("scene", scene_kw,
                    ("target_range_m", "target_velocity_mps", "amplitude",
                     "snr_db"))
        scene = RadarScene(**scene_kw)

        music_kw = dict(raw.get("music", {}))
        _check_keys("music", music_kw,
                    ("n_targets", "grid_points", "forward_backward"))
        music = MusicConfig(subcarrier_spacing_hz=ofdm.subcarrier_spacing_hz,
                            **music_kw)
        if music.n_targets >= ofdm.n_subcarriers:
            raise ConfigError("music.n_targets must be below n_subcarriers")

        cordic_kw = dict(raw.get("cordic", {}))
        _check_keys("cordic", cordic_kw, ("width", "frac", "iterations"))
        fmt = FixedFormat(width=int(cordic_kw.get("width", 16)),
                          frac=int(cordic_kw.get("frac", 13)))
        iterations = cordic_kw.get("iterations")
        iterations = None if iterations is None else int(iterations)

        adder = raw.get("adder")
        if adder is not None:
            if not isinstance(adder, str):
                raise ConfigError("'adder' must be an adder spec string")
            parse_adder(adder)

        adders = raw.get("adders")
        if adders is not None:
            if (not isinstance(adders, list)
                    or not all(isinstance(a, str) for a in adders)):
                raise ConfigError("'adders' must be a list of spec strings")
            adders = tuple(adders)
            for a in adders:
                parse_adder(a)

        sweep_kw = dict(raw.get("sweep", {}))
        _check_keys("sweep", sweep_kw,
                    ("snrs_db", "runs_per_cell", "base_seed"))

        out_kw = dict(raw.get("output", {}))
        _check_keys("output", out_kw, ("dir",))
        outdir = str(out_kw.get("dir", "out"))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(ofdm=ofdm, scene=scene, music=music, fmt=fmt,
                        iterations=iterations, adder=adder, adders=adders,
                        sweep=sweep_kw, outdir=outdir)


def _cordic_config(cfg: LoadedConfig, adder_spec: str | None) -> CordicConfig:
    model = parse_adder(adder_spec) if adder_spec else None
    try:
        return CordicConfig(fmt=cfg.fmt, adder=model,
                            iterations=cfg.iterations)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_plan(cfg: LoadedConfig, seed_override: int | None) -> SweepPlan:
    kw = dict(cfg.sweep)
    if "snrs_db" in kw:
        kw["snrs_db"] = tuple(float(s) for s in kw["snrs_db"])
    if cfg.adders is not None:
        kw["adders"] = cfg.adders
    if seed_override is not None:
        kw["base_seed"] = seed_override
    try:
        return SweepPlan(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _parse_constraints(pairs: list[str]) -> QualityConstraints | None:
    if not pairs:
        return None
    allowed = ("max_error_pct", "min_area_saving_pct", "min_power_saving_pct")
    kw = {}
    for chunk in pairs:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ConfigError(
                    f"constraint {item!r} is not of the form key=value")
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in allowed:
                raise ConfigError(f"unknown constraint {key!r} "
                                  f"(allowed: {', '.join(allowed)})")
            try:
                kw[key] = float(val)
            except ValueError as exc:
                raise ConfigError(
                    f"constraint {key} needs a number, got {val!r}") from exc
    return QualityConstraints(**kw)


def cmd_characterize(args) -> int:
    model = parse_adder(args.adder)
    if args.sampled is not None:
        mode, samples = "sampled", args.sampled
    elif args.exhaustive:
        mode, samples = "exhaustive", None
    else:
        mode = "exhaustive" if 2 * model.width <= 26 else "sampled"
        samples = None
    try:
        metrics = characterize(model, mode=mode, samples=samples,
                               seed=args.seed if args.seed is not None else 0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    seed_txt = "" if metrics.seed is None else str(metrics.seed)
    header = "adder,width,mode,samples,seed,er,mae,wce,mre,ned"
    row = (f"{model.name},{model.width},{metrics.mode},{metrics.n},"
           f"{seed_txt},{metrics.er!r},{metrics.mae!r},{metrics.wce},"
           f"{metrics.mre!r},{metrics.ned!r}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(header + "\n" + row + "\n")
    else:
        print(header)
        print(row)
    print(f"# {model.name}: ER={metrics.er:.6g} MAE={metrics.mae:.6g} "
          f"WCE={metrics.wce} MRE={metrics.mre:.6g} NED={metrics.ned:.6g} "
          f"({metrics.mode}, n={metrics.n})", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    scene = cfg.scene
    if args.no_noise:
        scene = dataclasses.replace(scene, snr_db=None)
    cc = _cordic_config(cfg, cfg.adder)
    seed = args.seed if args.seed is not None else int(
        cfg.sweep.get("base_seed", DEFAULT_SEED))
    res = run_pipeline(cfg.ofdm, scene, cfg.music, cc, RngSpec(seed),
                       keep_spectrum=args.spectrum is not None)
    print(f"adder={cc.adder.name} seed={seed} "
          f"snr_db={'none' if scene.snr_db is None else scene.snr_db}")
    print(f"estimated_range_m={res.estimated_range_m!r}")
    print(f"abs_error_pct={res.abs_error_pct!r}")
    print(f"converged={res.converged} cp_exceeded={res.cp_exceeded} "
          f"shortfall={res.shortfall}")
    if args.spectrum is not None and res.spectrum is not None:
        write_spectrum_csv(res.spectrum, args.spectrum)
        print(f"spectrum_csv={args.spectrum}")
    if not res.converged or not math.isfinite(res.estimated_range_m):
        return 1
    return 0


def _sweep_common(args):
    cfg = load_config(args.config)
    plan = _build_plan(cfg, args.seed)
    result = run_sweep(plan, ofdm=cfg.ofdm, scene=cfg.scene, music=cfg.music,
                       fmt=cfg.fmt, iterations=cfg.iterations,
                       jobs=args.jobs)
    return cfg, plan, result


def cmd_sweep(args) -> int:
    cfg, _, result = _sweep_common(args)
    points = design_points(result)
    paths = emit_report(result, points, cfg.outdir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    if result.rows and not any(r.converged for r in result.rows):
        print("error: no run converged", file=sys.stderr)
        return 1
    return 0


def cmd_dse(args) -> int:
    # parse constraints before the sweep so a typo fails fast
    qc = _parse_constraints(args.constraints)
    cfg, _, result = _sweep_common(args)
    points = design_points(result)
    if qc is not None:
        selected = apply_constraints(points, qc)
        names = {p.adder for p in selected}
        points = [p for p in points if p.adder in names]
    paths = emit_report(result, points, cfg.outdir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    kept = [p.adder for p in points if not p.dominated]
    print(f"pareto: {', '.join(kept) if kept else '(empty)'}")
    if result.rows and not any(r.converged for r in result.rows):
        print("error: no run converged", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="music-lite",
        description="Approximate-adder OFDM radar range-MUSIC testbed")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="override the config seed")

    c = sub.add_parser("characterize", help="measure adder error metrics")
    c.add_argument("--adder", required=True,
                   help="adder spec, family:width[:params]")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true",
                      help="enumerate all operand pairs (2*width <= 26)")
    mode.add_argument("--sampled", type=int, metavar="N",
                      help="draw N random operand pairs")
    c.add_argument("--seed", type=int, help="sampling seed")
    c.add_argument("--out", help="write the CSV here instead of stdout")
    c.set_defaults(func=cmd_characterize)

    s = sub.add_parser("simulate", help="run the pipeline once")
    common(s)
    s.add_argument("--no-noise", action="store_true",
                   help="disable channel noise")
    s.add_argument("--spectrum", metavar="PATH",
                   help="write the pseudospectrum CSV")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="Monte-Carlo sweep over adders x SNRs")
    common(w)
    w.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker processes (env MUSIC_LITE_JOBS)")
    w.set_defaults(func=cmd_sweep)

    d = sub.add_parser("dse", help="sweep plus Pareto/constraint report")
    common(d)
    d.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker processes (env MUSIC_LITE_JOBS)")
    d.add_argument("--constraints", action="append", default=[],
                   metavar="K=V[,K=V]",
                   help="quality bounds: max_error_pct, min_area_saving_pct,"
                        " min_power_saving_pct")
    d.set_defaults(func=cmd_dse)
    return p


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MUSIC_LITE_JOBS", "1")))
    except ValueError:
        return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        # ConfigError and bad parameter values: configuration problems
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
