"""Print how the Zoutendijk increments psi(d)^2 / |d|^2 decay along converged runs.

For each problem and beta rule, reports the number of runs long enough to
split into deciles and how many have a last-decile mean below the first.

    python scripts/zoutendijk_diagnostic.py --min-iters 10 --seeds 0..99
"""

import argparse

import numpy as np

from icg import bench as B
from icg import problems as P
from icg.cg import REFERENCE_VARIANTS, SolverConfig, Status, run
from icg.cli import parse_seeds


def decile_means(z):
    z = np.asarray(z)
    k = max(1, len(z) // 10)
    return z[:k].mean(), z[-k:].mean()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-iters", type=int, default=40)
    ap.add_argument("--seeds", default="0..99")
    ap.add_argument("--eps", type=float, default=1e-6)
    ap.add_argument("--parallelism", type=int, default=1)
    args = ap.parse_args(argv)

    convex = [s.name for s in P.registry() if s.convex]
    m = B.BenchMatrix(convex, list(REFERENCE_VARIANTS), parse_seeds(args.seeds), SolverConfig(eps=args.eps))
    recs = B.run_matrix(m, args.parallelism)
    print(f"{'problem':<16}{'variant':<8}{'runs':>6}{'long':>6}{'decays':>8}{'sum 1/|d|^2':>14}")
    for prob in convex:
        for var in REFERENCE_VARIANTS:
            mine = [r for r in recs if r.problem == prob and r.variant == var]
            long = [r for r in mine if r.status is Status.CRITICAL and r.iterations >= args.min_iters]
            decays = sum(last < first for first, last in (decile_means(r.zoutendijk_increments) for r in long))
            inv = np.mean([r.inv_dnorm_sum for r in mine])
            print(f"{prob:<16}{var:<8}{len(mine):>6}{len(long):>6}{decays:>8}{inv:>14.4g}")


if __name__ == "__main__":
    main()
