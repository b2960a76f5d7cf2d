"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-``repeat`` wall time for each
backend and the speedup. Results of the two backends are also compared.
"""

import argparse
import time

import numpy as np

from ctbduel import _kernels_py, kernels
from ctbduel.cells import complete_table


def best_time(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    table = complete_table(6)
    scores = rng.integers(0, 50, len(table)).astype(float)
    column = table.column(1, 4)
    wins = rng.integers(0, 100, (40, 40)).astype(np.int64)
    priors = rng.normal(size=(40, 40))

    def select(impl):
        return lambda: [impl.ctb_select(scores, table.best, 6) for _ in range(2000)]

    def update(impl):
        def run():
            inc = np.zeros(len(table), dtype=np.int64)
            for k in range(2000):
                impl.ctb_update(inc, column, k & 1)
            return inc
        return run

    def ip(impl):
        return lambda: [impl.ip_values(wins, priors) for _ in range(200)].pop()

    def walks(impl):
        return lambda: impl.occupation_counts(0.7, 2, 2000, 10_000, np.random.PCG64(1))

    return [
        ("ctb_select x2000 (6144 cells)", select),
        ("ctb_update x2000 (6144 cells)", update),
        ("ip_values x200 (N=40)", ip),
        ("occupation_counts 2000 x 1e4", walks),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    fast = kernels.compiled()
    if fast is None:
        print("compiled kernels not built; nothing to compare")
        return
    print(f"{'kernel':34s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}  same")
    for name, make in cases():
        tc, oc = best_time(make(fast), args.repeat)
        tp, op = best_time(make(_kernels_py), args.repeat)
        same = np.array_equal(np.asarray(oc), np.asarray(op))
        print(f"{name:34s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {same}")


if __name__ == "__main__":
    main()
