"""Convergence of the two boundary transforms of the statistic.

For small ``a`` the transform approaches Mardia's kurtosis minus d^2, but only
once ``a`` is small compared with the smallest squared distance between
residuals. The table shows both a fixed a-sequence and one scaled by that
distance. For large ``a`` the transform approaches the MRS skewness at rate 1/a.

    python scripts/boundary_limits.py --d 1 2 3 --n 10 --samples 5
"""

from __future__ import annotations

import argparse

import numpy as np

from mvnormtest import large_a_transform, mardia_kurtosis, mrs_skewness, small_a_transform, standardize


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--samples", type=int, default=5)
    args = ap.parse_args()

    fixed_small = (1e-2, 1e-3, 1e-4)
    scaled_small = (1e-2, 5e-3, 2.5e-3)
    fixed_large = (1e2, 1e3, 1e4)
    for d in args.d:
        print(f"d={d}, n={args.n}")
        for seed in range(args.samples):
            y = standardize(np.random.default_rng([seed, d]).standard_normal((args.n, d)))
            dmin = float(np.min(y.sq_dists[np.triu_indices(args.n, 1)]))
            kurt, skew = mardia_kurtosis(y) - d**2, mrs_skewness(y)
            e_fixed = [abs(small_a_transform(y, a) - kurt) for a in fixed_small]
            e_scaled = [abs(small_a_transform(y, f * dmin) - kurt) for f in scaled_small]
            e_large = [abs(large_a_transform(y, a) - skew) for a in fixed_large]
            fmt = " ".join
            print(
                f"  seed {seed}: min sq dist {dmin:.1e} | small a fixed {fmt(f'{e:.1e}' for e in e_fixed)}"
                f" | scaled {fmt(f'{e:.1e}' for e in e_scaled)} | large a {fmt(f'{e:.1e}' for e in e_large)}"
            )


if __name__ == "__main__":
    main()
