"""Diagnostics for the Nystrom approximation of the limit null law.

For each (d, a) prints the trace of the discretized operator against the
exact mean, and the 0.95-quantile, for several matrix sizes and both point
samplers. Useful for judging how far the limit rows can be trusted.

    python scripts/limit_law.py --d 1 2 --a 1 --m 500 1000 2000
"""

from __future__ import annotations

import argparse

from mvnormtest.nulldist import limit_quantiles_nystrom, mean_limit


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--a", type=float, nargs="+", default=[1.0])
    ap.add_argument("--m", type=int, nargs="+", default=[500, 1000, 2000])
    ap.add_argument("--sims", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--sampler", nargs="+", default=["sobol", "iid"])
    args = ap.parse_args()

    print(f"{'d':>2} {'a':>5} {'sampler':>7} {'m':>5} {'seed':>4} {'trace/mean-1':>13} {'q95':>8}")
    for d in args.d:
        for a in args.a:
            mean = mean_limit(d, a)
            for sampler in args.sampler:
                for m in args.m:
                    for seed in range(args.seeds):
                        q, lim = limit_quantiles_nystrom(d, a, m, args.sims, (0.05,), seed, sampler=sampler)
                        print(f"{d:>2} {a:>5g} {sampler:>7} {m:>5} {seed:>4} {lim.trace / mean - 1:>13.2e} {q[0.05]:>8.4f}")


if __name__ == "__main__":
    main()
