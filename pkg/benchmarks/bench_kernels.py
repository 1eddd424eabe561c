"""Time the compiled and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from ncqwalk import _backend
from ncqwalk.coins import CoinParams, coin


def cases():
    c = coin(CoinParams(0.7, -1.1))
    amps = np.array([[math.sqrt(0.5), 1j * math.sqrt(0.5)]])
    axis = np.linspace(-math.pi, math.pi, 101)
    th, ph = np.meshgrid(axis, axis, indexing="ij")
    return {
        "evolve_dense N=1000": lambda k: k.evolve_dense(c, amps, 1000),
        "path_sum N=14": lambda k: k.path_sum(c, amps[0, 0], amps[0, 1], 14),
        "gap_scan 101x101 k=256": lambda k: k.gap_scan(th, ph, 256),
        "segment_minima 1000 x 200": lambda k: [k.segment_minima(t, 2.0, 1000)
                                                for t in np.linspace(0.1, 3.0, 200)],
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = _backend.available()
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + "     speedup")
    for label, fn in cases().items():
        best = {}
        for n in names:
            best[n] = min(timeit.repeat(lambda: fn(backends[n]), number=1, repeat=args.repeat))
        line = f"{label:28s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names)
        if "cython" in best:
            line += f"  {best['python'] / best['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
