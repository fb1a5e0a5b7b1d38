"""Seeded ratio sweeps for the per-axis median mechanism.

Three experiments behind one command: the max-distance ratio on odd sizes
(stays under two), the per-size total-distance ratio (stays under
sqrt(2)*sqrt(n^2+1)/(n+1)), and the rectilinear total-distance ratio
(exactly one).  Reruns with the same flags print identical tables.
"""

import argparse
import math
import sys

from facloc.bench import BenchConfig, histogram_edges, run_bench
from facloc.geometry import Metric
from facloc.mechanisms import MechanismDescriptor
from facloc.welfare import WelfareObjective


def fmt(value: float) -> str:
    return format(value + 0.0, ".12g")


def egalitarian_sweep(trials: int, seed: int) -> bool:
    config = BenchConfig(
        trials=trials,
        n_range=(3, 9),
        parity="odd",
        objective=WelfareObjective.MAX,
        seed=seed,
    )
    result = run_bench(config, MechanismDescriptor.median())
    bound = 2.0 + 1e-6
    ok = result.max_ratio <= bound
    print("max-distance ratio, odd sizes 3..9")
    print(f"  trials {result.completed}  max {fmt(result.max_ratio)}  "
          f"mean {fmt(result.mean_ratio)}  bound {fmt(bound)}  "
          f"{'ok' if ok else 'EXCEEDED'}")
    for (lo, hi), count in zip(histogram_edges(), result.histogram):
        print(f"  [{fmt(lo)}, {fmt(hi)})  {count}")
    return ok


def utilitarian_sweep(trials: int, seed_base: int) -> bool:
    print("total-distance ratio per size")
    ok = True
    for n in (3, 5, 7, 9):
        bound = math.sqrt(2.0) * math.sqrt(n * n + 1.0) / (n + 1.0) + 1e-6
        config = BenchConfig(
            trials=trials,
            n_range=(n, n),
            seed=seed_base + n,
            objective=WelfareObjective.TOTAL,
        )
        result = run_bench(config, MechanismDescriptor.median())
        fits = result.max_ratio <= bound
        ok = ok and fits
        print(f"  n {n}  trials {result.completed}  max {fmt(result.max_ratio)}  "
              f"bound {fmt(bound)}  {'ok' if fits else 'EXCEEDED'}")
    return ok


def rectilinear_sweep(trials: int, seed: int) -> bool:
    config = BenchConfig(
        trials=trials,
        n_range=(1, 9),
        seed=seed,
        objective=WelfareObjective.TOTAL,
        metric=Metric.MANHATTAN,
    )
    result = run_bench(config, MechanismDescriptor.median())
    ok = abs(result.max_ratio - 1.0) <= 1e-9
    print("rectilinear total-distance ratio")
    print(f"  trials {result.completed}  max {fmt(result.max_ratio)}  "
          f"expected 1  {'ok' if ok else 'OFF'}")
    return ok


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=10_000,
                        help="trials for the odd-size and rectilinear sweeps")
    parser.add_argument("--per-size-trials", type=int, default=2_500,
                        help="trials per n in the total-distance sweep")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    ok = egalitarian_sweep(args.trials, args.seed)
    ok = utilitarian_sweep(args.per_size_trials, args.seed) and ok
    ok = rectilinear_sweep(args.trials, args.seed) and ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
