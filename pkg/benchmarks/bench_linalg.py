"""Timings for the row-reduction hot path: compiled kernel vs pure Python.

The oracle's sampling loops spend most of their time in reduced row echelon
forms over a large prime field.  This script times both implementations on
random dense matrices and on a realistic sampling workload, and prints the
speedup of whichever compiled kernel is importable.

Run:  python3 benchmarks/bench_linalg.py [--sizes 40,80,160] [--repeat 3]
"""

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from loopcrystal import _linalg  # noqa: E402
from loopcrystal import components as comp  # noqa: E402
from loopcrystal import oracle as orc  # noqa: E402
from loopcrystal.starlattice import WeightData  # noqa: E402

P = _linalg.DEFAULT_PRIME


def rand_matrix(rng, nrows, ncols):
    return [[rng.randrange(P) for _ in range(ncols)] for _ in range(nrows)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.mean(times)


def bench_rref(sizes, repeat):
    rng = random.Random(11)
    print(f"{'size':>10} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for n in sizes:
        mat = rand_matrix(rng, n, n + 8)
        t_py, _ = best_of(lambda: _linalg._rref_mod_python(mat, P), repeat)
        if _linalg._compiled is None:
            print(f"{n:>10} {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
            continue
        t_c, _ = best_of(lambda: _linalg._compiled.rref_mod(mat, P), repeat)
        print(
            f"{n:>10} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
            f"{t_py / t_c:>8.1f}x"
        )


def bench_workload(repeat):
    """Sampled epsilon battery on a 9-dimensional cyclic module."""
    curve = WeightData((3, 1, 1))
    m = comp.aperiodic_multisegments(curve, 0, (3, 3, 2))[0]

    def run():
        for v in range(3):
            orc.eps_sample(curve, m, v, 1, trials=8, seed=3)

    saved = _linalg._compiled
    try:
        _linalg._compiled = None
        t_py, _ = best_of(run, repeat)
        if saved is None:
            print(f"{'sampling':>10} {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
            return
        _linalg._compiled = saved
        t_c, _ = best_of(run, repeat)
    finally:
        _linalg._compiled = saved
    print(
        f"{'sampling':>10} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
        f"{t_py / t_c:>8.1f}x"
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="40,80,160")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"active backend: {_linalg.BACKEND}")
    bench_rref(sizes, args.repeat)
    bench_workload(args.repeat)


if __name__ == "__main__":
    main()
