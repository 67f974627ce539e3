"""Compare the compiled and pure-Python kernels on a generated corpus.

    python benchmarks/bench_kernels.py --levels 40 --repeat 3
"""

from __future__ import annotations

import argparse
import math
import time

from restart_reasoner import kernels
from restart_reasoner.corpus import CorpusParams, generate_corpus
from restart_reasoner.propagation import PropagationConstants, build_network, propagate
from restart_reasoner.trajectory import Shot, trace


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads(levels, constants):
    def edges(backend):
        for lv in levels:
            build_network(lv.blocks, constants, backend)

    def spread(backend):
        for lv in levels:
            for b in lv.blocks[1:]:
                propagate(lv, b, 1.0, constants, backend)

    shots = [Shot(0.05 + 1.4 * i / 60, 21.0, 0, "top-center", "low") for i in range(60)]

    def traces(backend):
        for lv in levels:
            for s in shots:
                trace(s, lv, 0.02, backend)

    return {"build_edges": edges, "propagate": spread, "trace": traces}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", type=int, default=40)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)
    if kernels.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` with Cython available")

    levels = generate_corpus(CorpusParams(count=args.levels), args.seed)
    constants = PropagationConstants()
    print(f"{'kernel':<12} {'python (s)':>11} {'cython (s)':>11} {'speed-up':>9}")
    for name, fn in workloads(levels, constants).items():
        py = _time(lambda: fn("python"), args.repeat)
        cy = _time(lambda: fn("cython"), args.repeat)
        print(f"{name:<12} {py:>11.4f} {cy:>11.4f} {py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
