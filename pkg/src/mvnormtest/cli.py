"""Command-line interface.

Exit codes: 0 success, 1 usage or data error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .alternatives import AlternativeParseError, parse_alternative
from .harness import PowerStudySpec, dumps, load_critvals, power_study, run_test
from .nulldist import DEFAULT_A_GRID, NumericalError, critical_values_mc, limit_critical_values, limit_quantiles_nystrom, mean_limit
from .oracle import UnsupportedDimensionError, gauss_hermite_grid, u_statistic_quadrature
from .sample import DataError, load_sample, standardize
from .statistic import u_values

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
ORACLE_RTOL = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _n_or_inf(text: str) -> int | str:
    if text.lower() in ("inf", "infinity", "∞"):
        return "inf"
    return int(text)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_test(args) -> int:
    sample = load_sample(args.input)
    report = run_test(sample, args.a, args.alpha, args.reps, args.seed, args.workers)
    data = report.to_dict()
    data["input"] = str(args.input)
    if args.format == "json":
        _write(json.dumps(data, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _write(dumps(report, "csv"), args.out)
    return EXIT_OK


def cmd_critvals(args) -> int:
    if args.n == "inf":
        tab = limit_critical_values(args.d, args.a, args.alpha, args.m, args.reps, args.seed, args.workers)
    else:
        tab = critical_values_mc(args.n, args.d, args.a, args.alpha, args.reps, args.seed, args.workers)
    _write(dumps(tab, args.format), args.out)
    return EXIT_OK


def cmd_power(args) -> int:
    alt = parse_alternative(args.alt, args.d)
    critvals = load_critvals(args.critvals) if args.critvals else None
    spec = PowerStudySpec(
        alternative=alt,
        n=args.n,
        a_grid=tuple(args.a),
        alpha=args.alpha,
        reps=args.reps,
        seed=args.seed,
        crit_reps=args.crit_reps,
        critvals=critvals,
    )
    table = power_study(spec, args.workers, args.cache_dir)
    _write(dumps(table, args.format), args.out)
    return EXIT_OK


def cmd_limit(args) -> int:
    q, lim = limit_quantiles_nystrom(args.d, args.a, args.m, args.sims, args.alpha, args.seed, args.workers)
    mean = mean_limit(args.d, args.a)
    data = {
        "d": args.d,
        "a": args.a,
        "m": args.m,
        "sims": args.sims,
        "seed": args.seed,
        "quantiles": {repr(al): v for al, v in q.items()},
        "trace": lim.trace,
        "mean_limit": mean,
        "trace_rel_error": lim.trace / mean - 1,
        "negative_eigenvalues": lim.n_negative,
        "top_eigenvalues": lim.eigenvalues[:10].tolist(),
    }
    _write(json.dumps(data, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    y = standardize(rng.standard_normal((args.n, args.d)))
    closed = u_values(y, args.a)
    rows = []
    worst = 0.0
    for a, c in zip(args.a, closed):
        q = u_statistic_quadrature(y, gauss_hermite_grid(args.d, args.nodes, a))
        rel = abs(c - q) / max(abs(c), 1e-300)
        worst = max(worst, rel)
        rows.append({"a": a, "closed_form": float(c), "quadrature": q, "rel_diff": rel})
    _write(json.dumps({"d": args.d, "n": args.n, "seed": args.seed, "rows": rows}, indent=2) + "\n", args.out)
    if worst > ORACLE_RTOL:
        print(f"oracle mismatch: max relative difference {worst:.3e} > {ORACLE_RTOL}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvnormtest", description="Weighted L2 test for multivariate normality.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, reps_default, a_default):
        p.add_argument("--a", type=_float_list, default=list(a_default), help="tuning parameter(s), comma separated")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--reps", type=int, default=reps_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1, help="worker processes; never changes results")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("test", help="test a CSV dataset for normality")
    p.add_argument("--input", required=True)
    common(p, 10_000, [1.0])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("critvals", help="simulate critical values (n=inf uses the limit law)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=_n_or_inf, required=True)
    common(p, 100_000, DEFAULT_A_GRID)
    p.add_argument("--m", type=int, default=2000, help="Nystrom size for n=inf")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_critvals)

    p = sub.add_parser("power", help="empirical power against an alternative")
    p.add_argument("--alt", required=True, help='alternative label, e.g. "NMix(0.5,1,4)"')
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, required=True)
    common(p, 10_000, DEFAULT_A_GRID)
    p.add_argument("--critvals", help="precomputed critical value table (JSON or CSV)")
    p.add_argument("--crit-reps", type=int, default=100_000)
    p.add_argument("--cache-dir", help="cache simulated critical values here")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("limit", help="limit null law quantiles via Nystrom eigenvalues")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--sims", type=int, default=100_000)
    p.add_argument("--alpha", type=_float_list, default=[0.1, 0.05, 0.01])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("oracle-check", help="closed form versus Gauss-Hermite quadrature")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=_float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=None, help="nodes per dimension")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, AlternativeParseError, UnsupportedDimensionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
