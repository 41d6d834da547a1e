"""Single-dataset testing, power studies and result serialization."""

from __future__ import annotations

import csv
import functools
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _mc
from .alternatives import AlternativeSpec, draw
from .nulldist import (
    DEFAULT_A_GRID,
    CriticalValueTable,
    critical_values_mc,
    empirical_quantile,
    null_statistics,
    p_value_from_null,
    scaled_statistics,
)
from .sample import Sample, standardize
from .statistic import mardia_kurtosis, mrs_skewness, table1_factor, u_values


@dataclass
class TestReport:
    """Outcome of testing one dataset over a grid of tuning parameters."""

    __test__ = False  # not a pytest class

    source: str | None
    n: int
    d: int
    alpha: float
    reps: int
    seed: int
    a_grid: list[float]
    u: list[float]
    scaled: list[float]
    critical_value: list[float]
    p_value: list[float]
    reject: list[bool]
    kurtosis: float
    skewness: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> TestReport:
        return cls(**data)

    def rows(self) -> list[dict]:
        return [
            {
                "source": self.source,
                "n": self.n,
                "d": self.d,
                "a": a,
                "alpha": self.alpha,
                "reps": self.reps,
                "seed": self.seed,
                "u": u,
                "scaled": s,
                "critical_value": c,
                "p_value": p,
                "reject": r,
                "kurtosis": self.kurtosis,
                "skewness": self.skewness,
            }
            for a, u, s, c, p, r in zip(
                self.a_grid, self.u, self.scaled, self.critical_value, self.p_value, self.reject
            )
        ]


def run_test(
    sample: Sample,
    a: float | Sequence[float] = 1.0,
    alpha: float = 0.05,
    reps: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> TestReport:
    """Test one sample for normality with Monte Carlo critical values and p-values.

    The same ``reps`` null replications supply the critical value and the
    p-value for every ``a``.
    """
    a_grid = [float(x) for x in np.atleast_1d(a)]
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    y = standardize(sample)
    u = u_values(y, a_grid)
    scaled = u * table1_factor(y.d, np.asarray(a_grid))
    null = null_statistics(y.n, y.d, a_grid, reps, seed, workers)
    crit = empirical_quantile(null, alpha, axis=0)
    pvals = [p_value_from_null(s, null[:, i]) for i, s in enumerate(scaled)]
    return TestReport(
        source=sample.source,
        n=y.n,
        d=y.d,
        alpha=alpha,
        reps=reps,
        seed=seed,
        a_grid=a_grid,
        u=[float(v) for v in u],
        scaled=[float(v) for v in scaled],
        critical_value=[float(v) for v in crit],
        p_value=pvals,
        reject=[bool(s > c) for s, c in zip(scaled, crit)],
        kurtosis=mardia_kurtosis(y),
        skewness=mrs_skewness(y),
    )


@dataclass
class PowerStudySpec:
    alternative: AlternativeSpec
    n: int
    a_grid: tuple[float, ...] = DEFAULT_A_GRID
    alpha: float = 0.05
    reps: int = 10_000
    seed: int = 0
    crit_reps: int = 100_000
    critvals: CriticalValueTable | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.a_grid = tuple(float(a) for a in self.a_grid)
        if not self.a_grid or min(self.a_grid) <= 0:
            raise ValueError("a_grid must be nonempty and positive")
        if self.reps < 1000:
            raise ValueError("reps must be at least 1000")
        if self.n < self.d + 1:
            raise ValueError(f"n must be at least d + 1 = {self.d + 1}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def d(self) -> int:
        return self.alternative.d

    def to_dict(self) -> dict:
        return {
            "alternative": self.alternative.to_dict(),
            "n": self.n,
            "d": self.d,
            "a_grid": list(self.a_grid),
            "alpha": self.alpha,
            "reps": self.reps,
            "seed": self.seed,
            "crit_reps": self.crit_reps,
        }


@dataclass
class PowerTable:
    spec: dict
    critvals: dict
    entries: dict[float, float]
    se: dict[float, float]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "critvals": self.critvals,
            "entries": {repr(a): p for a, p in self.entries.items()},
            "se": {repr(a): s for a, s in self.se.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> PowerTable:
        return cls(
            spec=data["spec"],
            critvals=data["critvals"],
            entries={float(a): float(p) for a, p in data["entries"].items()},
            se={float(a): float(s) for a, s in data["se"].items()},
        )

    def rows(self) -> list[dict]:
        alt = self.spec["alternative"]
        return [
            {
                "family": alt["family"],
                "params": json.dumps(alt["params"], sort_keys=True),
                "d": self.spec["d"],
                "n": self.spec["n"],
                "a": a,
                "alpha": self.spec["alpha"],
                "reps": self.spec["reps"],
                "seed": self.spec["seed"],
                "power": p,
                "power_rounded": int(round(p)),
                "se": self.se[a],
            }
            for a, p in self.entries.items()
        ]


def _critvals_cache_path(cache_dir: Path, n: int, d: int, a_grid, alpha: float, reps: int, seed: int) -> Path:
    key = json.dumps([n, d, list(a_grid), alpha, reps, seed])
    digest = hashlib.sha1(key.encode()).hexdigest()[:16]
    return cache_dir / f"critvals_d{d}_n{n}_{digest}.json"


def power_critical_values(
    spec: PowerStudySpec, workers: int = 1, cache_dir: str | Path | None = None
) -> CriticalValueTable:
    """Null critical values for a power study, on a stream independent of the alternative draws."""
    if spec.critvals is not None:
        tab = spec.critvals
        if tab.d != spec.d or tab.n != spec.n or not math.isclose(tab.alpha, spec.alpha):
            raise ValueError(
                f"critical value table is for d={tab.d}, n={tab.n}, alpha={tab.alpha}; "
                f"study needs d={spec.d}, n={spec.n}, alpha={spec.alpha}"
            )
        missing = [a for a in spec.a_grid if a not in tab.entries]
        if missing:
            raise ValueError(f"critical value table lacks a = {missing}")
        return tab
    path = None
    if cache_dir is not None:
        path = _critvals_cache_path(Path(cache_dir), spec.n, spec.d, spec.a_grid, spec.alpha, spec.crit_reps, spec.seed)
        if path.exists():
            return load_critvals(path)
    tab = critical_values_mc(
        spec.n, spec.d, spec.a_grid, spec.alpha, spec.crit_reps, spec.seed, workers, stream=_mc.CRIT_FOR_POWER_STREAM
    )
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        emit(tab, "json", path)
    return tab


def _power_block(block: int, size: int, *, alt: AlternativeSpec, n: int, a_grid, crit: np.ndarray, seed: int) -> np.ndarray:
    rng = _mc.substream(seed, _mc.ALT_STREAM, block)
    x = draw(alt, rng, n, size)
    stats = scaled_statistics(x, a_grid)
    return np.count_nonzero(stats > crit, axis=0)


def power_study(spec: PowerStudySpec, workers: int = 1, cache_dir: str | Path | None = None) -> PowerTable:
    tab = power_critical_values(spec, workers, cache_dir)
    crit = np.array([tab[a] for a in spec.a_grid])
    fn = functools.partial(_power_block, alt=spec.alternative, n=spec.n, a_grid=spec.a_grid, crit=crit, seed=spec.seed)
    counts = np.sum(_mc.map_blocks(fn, spec.reps, workers), axis=0)
    phat = counts / spec.reps
    entries = {a: float(100 * p) for a, p in zip(spec.a_grid, phat)}
    se = {a: float(100 * math.sqrt(p * (1 - p) / spec.reps)) for a, p in zip(spec.a_grid, phat)}
    return PowerTable(spec=spec.to_dict(), critvals=tab.to_dict(), entries=entries, se=se)


def _rows(obj) -> list[dict]:
    if hasattr(obj, "rows"):
        return obj.rows()
    raise TypeError(f"cannot write {type(obj).__name__} as CSV")


def dumps(obj, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(obj.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        rows = _rows(obj)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(obj, fmt: str, path: str | Path) -> Path:
    """Write a report, critical value table or power table as CSV or JSON."""
    path = Path(path)
    path.write_text(dumps(obj, fmt))
    return path


def load_critvals(path: str | Path) -> CriticalValueTable:
    """Read a critical value table written by :func:`emit` (JSON or CSV)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError(f"{path} has no rows")
        first = rows[0]
        n = first["n"]
        return CriticalValueTable(
            d=int(first["d"]),
            n=n if n == "inf" else int(n),
            alpha=float(first["alpha"]),
            reps=int(first["reps"]),
            seed=int(first["seed"]),
            entries={float(r["a"]): float(r["quantile"]) for r in rows},
        )
    return CriticalValueTable.from_dict(json.loads(text))
