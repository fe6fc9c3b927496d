"""Compare the compiled MDL scan with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--trials 20000] [--sensors 10] [--repeat 5]

Also reports the cost of a full Monte Carlo trial (snapshot draw, sample
covariance, eigendecomposition) so the kernel share of a sweep is visible.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from mdlperf import _kernels_py
from mdlperf.numerics import RngStream
from mdlperf.scenario import make_scenario
from mdlperf.simulator import sample_eigenvalues

try:
    from mdlperf import _kernels
except ImportError:  # extension not built
    _kernels = None


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--sensors", type=int, default=10)
    ap.add_argument("--snapshots", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    s = make_scenario(args.sensors, args.snapshots, [-2.0, 2.0], -2.0)
    streams = [RngStream(0, t) for t in range(min(args.trials, 2000))]
    t0 = timeit.default_timer()
    eigs = sample_eigenvalues(s, streams)
    per_trial = (timeit.default_timer() - t0) / len(streams)
    eigs = np.ascontiguousarray(np.resize(eigs, (args.trials, args.sensors)))

    py = best(lambda: _kernels_py.mdl_scan(eigs, args.snapshots), args.repeat)
    print(f"eigenvalue rows: {eigs.shape[0]} x {eigs.shape[1]}")
    print(f"numpy fallback : {py * 1e3:8.3f} ms  ({py / args.trials * 1e9:7.1f} ns/row)")
    if _kernels is None:
        print("compiled kernel: not built")
    else:
        cy = best(lambda: _kernels.mdl_scan(eigs, args.snapshots), args.repeat)
        same = np.array_equal(_kernels.mdl_scan(eigs, args.snapshots), _kernels_py.mdl_scan(eigs, args.snapshots))
        print(f"compiled kernel: {cy * 1e3:8.3f} ms  ({cy / args.trials * 1e9:7.1f} ns/row), "
              f"speed-up {py / cy:5.1f}x, identical estimates: {same}")
    print(f"full trial     : {per_trial * 1e6:8.1f} us/trial (draw + covariance + eigvalsh)")


if __name__ == "__main__":
    main()
