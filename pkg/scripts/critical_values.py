"""Simulate the table of 0.95-quantiles of the scaled statistic under normality.

Finite-n rows come from direct simulation; ``--limit`` adds rows for the limit
law computed from Nystrom eigenvalues.

    python scripts/critical_values.py --d 1 2 --n 20 50 100 --reps 100000 --limit
"""

from __future__ import annotations

import argparse
import csv
import logging
import time
from pathlib import Path

from mvnormtest.nulldist import DEFAULT_A_GRID, critical_values_mc, limit_critical_values

log = logging.getLogger("critical_values")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3, 5, 10])
    ap.add_argument("--n", type=int, nargs="+", default=[20, 50, 100])
    ap.add_argument("--a", type=float, nargs="+", default=list(DEFAULT_A_GRID))
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--limit", action="store_true", help="also compute limit-law rows")
    ap.add_argument("--m", type=int, default=2000)
    ap.add_argument("--out", type=Path, default=Path("results/critical_values.csv"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    rows = []
    for d in args.d:
        for n in args.n:
            t0 = time.perf_counter()
            tab = critical_values_mc(n, d, args.a, args.alpha, args.reps, args.seed, args.workers)
            log.info("d=%d n=%d done in %.1fs: %s", d, n, time.perf_counter() - t0,
                     " ".join(f"{q:.3f}" for q in tab.entries.values()))
            rows.append((d, n, tab))
        if args.limit:
            tab = limit_critical_values(d, args.a, args.alpha, args.m, args.reps, args.seed, args.workers)
            log.info("d=%d n=inf: %s", d, " ".join(f"{q:.3f}" for q in tab.entries.values()))
            rows.append((d, "inf", tab))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d", "n"] + [f"a={a:g}" for a in args.a])
        for d, n, tab in rows:
            writer.writerow([d, n] + [f"{tab[a]:.4f}" for a in args.a])
    print(args.out.read_text())


if __name__ == "__main__":
    main()
