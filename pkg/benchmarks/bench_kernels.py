"""Compare the compiled kernel backend against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

The adder and rotation micro-benchmarks drive both backends in-process
through the explicit `impl` parameter. The small-SVD benchmark re-executes
this script with MUSIC_LITE_KERNELS set, because the decomposition always
runs on the globally selected backend.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from music_lite import adders, kernels
from music_lite.adders import acla_adder, exact_adder


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def handle_for(model, impl):
    code = adders._FAMILY_CODES[model.family]
    if model.family == "acla":
        return kernels.build_adder_handle(
            code, model.width, model.block,
            1 if model.variant == "alg1" else 0, impl=impl)
    return kernels.build_adder_handle(code, model.width, impl=impl)


def bench_add_batch(impl, model, n=1 << 16):
    h = handle_for(model, impl)
    rng = np.random.default_rng(1)
    top = (1 << model.width) - 1
    a = rng.integers(0, top + 1, size=n, dtype=np.int64)
    b = rng.integers(0, top + 1, size=n, dtype=np.int64)
    out = np.zeros_like(a)
    return lambda: impl.add_batch(h, a, b, out)


def bench_rotate_pairs(impl, n=4096):
    h = kernels.build_cordic_handle(16, 13, 16,
                                    handle_for(exact_adder(16), impl),
                                    impl=impl)
    rng = np.random.default_rng(2)
    xs = rng.integers(-8192, 8192, size=n, dtype=np.int64)
    ys = rng.integers(-8192, 8192, size=n, dtype=np.int64)

    def run():
        impl.rotate_pairs(h, xs.copy(), ys.copy(), 3217, 1)

    return run


def svd_seconds(repeat):
    from music_lite.cordic import CordicConfig
    from music_lite.svd import svd

    rng = np.random.default_rng(3)
    mats = [(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
            * 0.3 for _ in range(10)]
    cfg = CordicConfig()

    def run():
        for m in mats:
            svd(m, cfg)

    return best_of(repeat, run)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions, best-of (default 3)")
    ap.add_argument("--svd-probe", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.svd_probe:
        print(f"{kernels.backend_name()} {svd_seconds(args.repeat):.6f}")
        return 0

    try:
        impl_cy = kernels.backend("cy")
    except ImportError:
        impl_cy = None
        print("compiled backend unavailable; timing the fallback only")
    impl_py = kernels.backend("py")

    cases = [
        ("add_batch exact:16 (65536 ops)",
         lambda impl: bench_add_batch(impl, exact_adder(16))),
        ("add_batch acla:16:4 (65536 ops)",
         lambda impl: bench_add_batch(impl, acla_adder(16, 4))),
        ("rotate_pairs W16F13 (4096 pairs)", bench_rotate_pairs),
    ]
    print(f"{'kernel':38s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, make in cases:
        t_py = best_of(args.repeat, make(impl_py))
        if impl_cy is None:
            print(f"{name:38s} {t_py * 1e3:8.2f}ms {'-':>10s} {'-':>8s}")
            continue
        t_cy = best_of(args.repeat, make(impl_cy))
        print(f"{name:38s} {t_py * 1e3:8.2f}ms {t_cy * 1e3:8.2f}ms "
              f"{t_py / t_cy:7.1f}x")

    times = {}
    for pref in ("py", "cy"):
        if pref == "cy" and impl_cy is None:
            continue
        env = dict(os.environ, MUSIC_LITE_KERNELS=pref)
        proc = subprocess.run(
            [sys.executable, __file__, "--svd-probe",
             "--repeat", str(args.repeat)],
            capture_output=True, text=True, env=env)
        if proc.returncode:
            print(f"svd probe ({pref}) failed: {proc.stderr.strip()}")
            return 1
        name, secs = proc.stdout.split()
        times[name] = float(secs)
    name = "svd 4x4 W16F13 (10 matrices)"
    if "compiled" in times:
        print(f"{name:38s} {times['python'] * 1e3:8.2f}ms "
              f"{times['compiled'] * 1e3:8.2f}ms "
              f"{times['python'] / times['compiled']:7.1f}x")
    else:
        print(f"{name:38s} {times['python'] * 1e3:8.2f}ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
