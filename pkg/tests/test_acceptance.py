"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line and adds it to the summary shown at the
end of the pytest run. All Monte Carlo work uses seed 0 (critical values for
the level check use seed 1 so that they are independent of the null draws).
"""

import math

import numpy as np
import pytest

from mvnormtest import large_a_transform, mardia_kurtosis, mrs_skewness, small_a_transform, standardize, u_values
from mvnormtest.alternatives import parse_alternative
from mvnormtest.cli import main as cli_main
from mvnormtest.harness import PowerStudySpec, power_study
from mvnormtest.nulldist import (
    DEFAULT_A_GRID,
    cov_kernel,
    critical_values_mc,
    empirical_quantile,
    limit_quantiles_nystrom,
    mean_limit,
    null_statistics,
)
from mvnormtest.oracle import gauss_hermite_grid, integrate, u_statistic_quadrature
from mvnormtest.statistic import weight_integral

from .conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow
SEED = 0


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} | {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_integral_identity():
    worst = 0.0
    for d in (1, 2, 3, 5, 10):
        for a in (0.1, 0.5, 1.0, 2.0, 5.0):
            ref = (math.pi / a) ** (d / 2) * (d * (d + 2) / (4 * a**2) - d**2 / a + d**2)
            worst = max(worst, abs(weight_integral(0.0, d, a) - ref) / abs(ref))
    record(1, "weight integral at c=0", worst <= 1e-10, f"max rel err {worst:.2e} (tol 1e-10)")


def test_02_oracle_equivalence():
    worst = 0.0
    for d in (1, 2, 3):
        schemes = {a: gauss_hermite_grid(d, a=a) for a in (0.5, 1.0, 2.0)}
        for n in (5, 10, 20):
            for seed in range(20):
                y = standardize(np.random.default_rng([seed, d, n]).standard_normal((n, d)))
                closed = u_values(y, list(schemes))
                for (a, scheme), c in zip(schemes.items(), closed):
                    worst = max(worst, abs(u_statistic_quadrature(y, scheme) - c) / c)
    record(2, "closed form vs quadrature", worst <= 1e-6, f"max rel diff {worst:.2e} over 540 cases (tol 1e-6)")


def _decreasing(errs, floor=1e-9):
    """Strictly decreasing, except that steps at or below the roundoff floor count as converged."""
    return all(e1 < e0 or e1 <= floor for e0, e1 in zip(errs, errs[1:]))


def test_03_boundary_limits():
    failures = []
    worst_small = worst_large = 0.0
    for d in (1, 2, 3):
        for seed in range(10):
            y = standardize(np.random.default_rng([seed, d]).standard_normal((10, d)))
            kurt, skew = mardia_kurtosis(y), mrs_skewness(y)
            small = [abs(small_a_transform(y, a) - (kurt - d**2)) for a in (1e-2, 1e-3, 1e-4)]
            large = [abs(large_a_transform(y, a) - skew) for a in (1e2, 1e3, 1e4)]
            worst_small = max(worst_small, small[-1])
            worst_large = max(worst_large, large[-1] / (1 + skew))
            if small[-1] > 1e-2 or not _decreasing(small):
                failures.append(f"small d={d} s={seed}")
            if large[-1] > 1e-3 * (1 + skew) or not _decreasing(large):
                failures.append(f"large d={d} s={seed}")
    detail = (
        f"small-a max err {worst_small:.2e} (tol 1e-2), large-a max rel err {worst_large:.2e} (tol 1e-3); "
        f"{len(failures)}/60 sample checks fail"
    )
    if failures:
        detail += ": " + ", ".join(failures)
    record(3, "boundary limits a->0 and a->inf", not failures, detail)


def _aitken(x0, x1, x2):
    denom = (x2 - x1) - (x1 - x0)
    return x2 if denom == 0 else x2 - (x2 - x1) ** 2 / denom


def test_04_limit_mean():
    worst_q = 0.0
    for d in (1, 2, 3):
        for a in (0.5, 1.0, 2.0):
            scheme = gauss_hermite_grid(d, 40, a)
            q = integrate(scheme, cov_kernel(scheme.nodes, scheme.nodes))
            worst_q = max(worst_q, abs(mean_limit(d, a) - q) / q)
    worst_b = 0.0
    for d in (1, 2, 3, 5):
        small = [(a / math.pi) ** (d / 2) * mean_limit(d, a) - d * (d + 2) / (4 * a**2) for a in (1e-2, 1e-3, 1e-4)]
        large = [2 * a ** (d / 2 + 1) / math.pi ** (d / 2) * mean_limit(d, a) for a in (1e2, 1e3, 1e4)]
        worst_b = max(worst_b, abs(_aitken(*small) / (2 * d) - 1), abs(_aitken(*large) / (2 * d * (d + 2)) - 1))
    ok = worst_q <= 1e-8 and worst_b < 0.01
    record(4, "limit mean", ok, f"quadrature rel diff {worst_q:.2e} (tol 1e-8); extrapolated boundary err {worst_b:.2e} (tol 1e-2)")


def test_05_finite_n_critical_values():
    expected = dict(zip(DEFAULT_A_GRID, (147.99, 25.86, 7.14, 2.46, 1.47, 1.27, 1.02)))
    row = critical_values_mc(20, 1, DEFAULT_A_GRID, reps=100_000, seed=SEED)
    checks = [(f"d=1 n=20 a={a:g}", row[a], v) for a, v in expected.items()]
    checks.append(("d=2 n=50 a=0.5", critical_values_mc(50, 2, (0.5,), reps=100_000, seed=SEED)[0.5], 3.50))
    checks.append(("d=5 n=20 a=5", critical_values_mc(20, 5, (5.0,), reps=100_000, seed=SEED)[5.0], 0.20))
    bad = [f"{name}: {got:.4g} vs {ref}" for name, got, ref in checks if abs(got / ref - 1) > 0.025]
    worst = max(abs(got / ref - 1) for _, got, ref in checks)
    detail = f"max rel dev {worst:.2%} over {len(checks)} entries (tol 2.5%)"
    if bad:
        detail += "; out of tolerance: " + "; ".join(bad)
    record(5, "finite-n critical values", not bad, detail)


def test_06_limit_rows():
    parts, ok = [], True
    for d, ref in ((1, 2.43), (2, 1.39)):
        q, lim = limit_quantiles_nystrom(d, 1.0, m=2000, l_sims=100_000, seed=SEED)
        gap = abs(lim.trace / mean_limit(d, 1.0) - 1)
        ok &= abs(q[0.05] - ref) <= 0.1 and gap <= 0.05
        parts.append(f"d={d}: {q[0.05]:.3f} vs {ref} (+-0.1), trace gap {gap:.2%}")
    _, lim3 = limit_quantiles_nystrom(3, 1.0, m=2000, l_sims=10_000, seed=SEED)
    gap3 = abs(lim3.trace / mean_limit(3, 1.0) - 1)
    ok &= gap3 <= 0.05
    parts.append(f"d=3 trace gap {gap3:.2%}")
    record(6, "limit-law rows via Nystrom (m=2000, l=100000)", ok, "; ".join(parts))


def test_07_level():
    cells, bad = 0, []
    worst = 0.0
    for d in (1, 2, 3, 5):
        for n in (20, 50):
            crit = critical_values_mc(n, d, DEFAULT_A_GRID, reps=100_000, seed=SEED + 1)
            stats = null_statistics(n, d, DEFAULT_A_GRID, reps=10_000, seed=SEED)
            rates = 100 * np.mean(stats > np.array([crit[a] for a in DEFAULT_A_GRID]), axis=0)
            for a, r in zip(DEFAULT_A_GRID, rates):
                cells += 1
                worst = max(worst, abs(r - 5))
                if abs(r - 5) > 1:
                    bad.append(f"d={d} n={n} a={a:g}: {r:.2f}%")
    detail = f"{cells} cells, max |rate - 5| = {worst:.2f}pp (tol 1pp)"
    if bad:
        detail += "; " + ", ".join(bad)
    record(7, "null rejection rate", not bad, detail)


POWER_CHECKS = [
    ("NMix(0.5,1,4)", None, 50, 0.5, 84.0, 2.5),
    ("t3", None, 100, 1.0, 89.0, 2.5),
    ("U(-sqrt3,sqrt3)", None, 20, 0.25, 22.0, 2.5),
    ("C^2(0,1)", None, 20, 0.25, 95.0, 2.5),
    ("S3(Exp(1))", None, 20, 0.5, 97.0, 2.5),
    ("NMix(0.5,0,B5)", None, 50, 0.5, None, None),
]


def test_08_power():
    parts, bad = [], []
    for label, d, n, a, ref, tol in POWER_CHECKS:
        spec = PowerStudySpec(parse_alternative(label, d), n=n, a_grid=(a,), reps=10_000, seed=SEED)
        p = power_study(spec).entries[a]
        if ref is None:
            ok = p >= 99.5
            parts.append(f"{label} n={n} a={a:g}: {p:.2f} (>= 99.5)")
        else:
            ok = abs(p - ref) <= tol
            parts.append(f"{label} n={n} a={a:g}: {p:.2f} vs {ref:g}")
        if not ok:
            bad.append(label)
    record(8, "power spot checks", not bad, "; ".join(parts))


def test_09_affine_invariance():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for d in (2, 3, 5):
        x = rng.standard_exponential((40, d))
        base = u_values(standardize(x), [0.1, 1.0, 5.0])
        for _ in range(100):
            a = rng.standard_normal((d, d))
            b = rng.normal(scale=10.0, size=d)
            moved = u_values(standardize(x @ a.T + b), [0.1, 1.0, 5.0])
            worst = max(worst, np.max(np.abs(moved - base) / base))
    record(9, "affine invariance", worst <= 1e-7, f"max rel change {worst:.2e} over 300 draws (tol 1e-7)")


def test_10_consistency():
    def median_u_over_n(draw, n):
        vals = []
        for seed in range(50):
            x = draw(np.random.default_rng([SEED, seed, n]), n)
            vals.append(u_values(standardize(x), [1.0])[0] / n)
        return float(np.median(vals))

    ns = (50, 200, 800)
    ln = [median_u_over_n(lambda r, n: r.lognormal(size=(n, 1)), n) for n in ns]
    nm = [median_u_over_n(lambda r, n: r.standard_normal((n, 1)), n) for n in ns]
    stable = abs(ln[2] / ln[1] - 1)
    shrink = nm[2] / nm[0]
    ok = min(ln) > 0 and stable < 0.25 and shrink < 0.2
    detail = (
        f"LN medians {', '.join(f'{v:.4g}' for v in ln)} (n=200->800 change {stable:.1%}, tol 25%); "
        f"normal n=800/n=50 ratio {shrink:.3f} (tol 0.2)"
    )
    record(10, "consistency of U/n", ok, detail)


def test_11_determinism(tmp_path):
    data = tmp_path / "data.csv"
    np.savetxt(data, np.random.default_rng(SEED).standard_t(4, size=(40, 2)), delimiter=",")
    commands = {
        "test": ["test", "--input", str(data), "--a", "0.5,1,2", "--reps", "3000", "--seed", "7", "--format", "csv"],
        "critvals": ["critvals", "--d", "2", "--n", "25", "--reps", "3000", "--seed", "7"],
        "power": ["power", "--alt", "t3(0,I2)", "--n", "25", "--a", "0.5,1", "--reps", "2500", "--crit-reps", "2000", "--seed", "7"],
        "limit": ["limit", "--d", "1", "--a", "1", "--m", "300", "--sims", "25000", "--seed", "7"],
    }
    differ = []
    for name, args in commands.items():
        outs = []
        for workers in (1, 2):
            out = tmp_path / f"{name}_{workers}.out"
            assert cli_main(args + ["--workers", str(workers), "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        if outs[0] != outs[1]:
            differ.append(name)
    record(11, "determinism across worker counts", not differ, f"{len(commands) - len(differ)}/{len(commands)} commands bit-identical")
