"""Null distribution of the statistic: limit kernel and mean, Monte Carlo
critical values, Nystrom approximation of the limit law, p-values."""

from __future__ import annotations

import functools
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import special
from scipy.stats import qmc

from . import _mc
from .sample import pairwise_sq_dists, scaled_residuals
from .statistic import table1_factor, u_from_cache

log = logging.getLogger(__name__)

DEFAULT_A_GRID = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0)


class NumericalError(RuntimeError):
    pass


@dataclass
class CriticalValueTable:
    """Empirical (1 - alpha)-quantiles of the table-scaled statistic, keyed by ``a``.

    ``n`` is ``"inf"`` for limit-law rows, in which case ``reps`` counts the
    simulated weighted chi-square sums and ``m`` the Nystrom size.
    """

    d: int
    n: int | str
    alpha: float
    reps: int
    seed: int
    entries: dict[float, float]
    m: int | None = None

    def __getitem__(self, a: float) -> float:
        return self.entries[float(a)]

    @property
    def a_grid(self) -> list[float]:
        return list(self.entries)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["entries"] = {repr(float(a)): q for a, q in self.entries.items()}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> CriticalValueTable:
        data = dict(data)
        data["entries"] = {float(a): float(q) for a, q in data["entries"].items()}
        n = data["n"]
        data["n"] = n if n == "inf" else int(n)
        return cls(**data)

    def rows(self) -> list[dict]:
        return [
            {"d": self.d, "n": self.n, "a": a, "alpha": self.alpha, "reps": self.reps, "seed": self.seed, "quantile": q}
            for a, q in self.entries.items()
        ]


@dataclass
class NystromLimit:
    d: int
    a: float
    m: int
    eigenvalues: np.ndarray = field(repr=False)
    seed: int
    n_negative: int = 0

    @property
    def trace(self) -> float:
        return float(self.eigenvalues.sum())


def cov_kernel(s: np.ndarray, t: np.ndarray) -> float | np.ndarray:
    """Covariance kernel of the limiting Gaussian process under normality.

    ``s`` and ``t`` broadcast over leading axes; the last axis holds coordinates.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    d = s.shape[-1]
    ss = np.sum(s * s, axis=-1)
    tt = np.sum(t * t, axis=-1)
    st = np.sum(s * t, axis=-1)
    diff = ss + tt - 2 * st
    out = np.exp(-diff / 2) * (2 * d + ss * tt - 2 * st * diff - 4 * diff) + 2 * np.exp(-(ss + tt) / 2) * (
        2 * ss + 2 * tt - d - 2 * st - 4 * st**2
    )
    return out if np.ndim(out) else float(out)


def kernel_matrix(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    sq = np.einsum("ij,ij->i", points, points)
    gram = points @ points.T
    diff = pairwise_sq_dists(points, sq)
    ss, tt = sq[:, None], sq[None, :]
    return np.exp(-diff / 2) * (2 * d + ss * tt - 2 * gram * diff - 4 * diff) + 2 * np.exp(-(ss + tt) / 2) * (
        2 * ss + 2 * tt - d - 2 * gram - 4 * gram**2
    )


def mean_limit(d: int, a: float) -> float:
    """Expectation of the limit null law, ``int K(t,t) exp(-a|t|^2) dt``."""
    if a <= 0:
        raise ValueError("a must be positive")
    g = (a / (a + 1)) ** (d / 2)
    return 2 * d * (math.pi / a) ** (d / 2) * (
        1 - g + g / (a + 1) - (d + 2) * g / (a + 1) ** 2 + (d + 2) / (8 * a**2)
    )


def empirical_quantile(values: np.ndarray, alpha: float, axis: int = 0) -> np.ndarray:
    """Order statistic of rank ``ceil((1 - alpha) * reps)``, no interpolation."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    reps = values.shape[axis]
    # guard against (1 - alpha) * reps landing a hair above an integer
    k = max(1, math.ceil((1 - alpha) * reps - 1e-9))
    return np.take(np.sort(values, axis=axis), k - 1, axis=axis)


def _null_block(block: int, size: int, *, n: int, d: int, a_grid: tuple[float, ...], seed: int, stream: int) -> np.ndarray:
    rng = _mc.substream(seed, stream, block)
    x = rng.standard_normal((size, n, d))
    return scaled_statistics(x, a_grid)


def scaled_statistics(x: np.ndarray, a_grid: Sequence[float], max_elems: int = 2_000_000) -> np.ndarray:
    """Table-scaled statistic for each sample in a stack ``x`` of shape ``(reps, n, d)``.

    Samples are processed in chunks bounded by ``max_elems`` pair entries.
    """
    reps, n, d = x.shape
    chunk = max(1, max_elems // (n * n))
    out = np.empty((reps, len(a_grid)))
    for lo in range(0, reps, chunk):
        y = scaled_residuals(x[lo : lo + chunk])
        sq = np.einsum("bij,bij->bi", y, y)
        out[lo : lo + chunk] = u_from_cache(sq, pairwise_sq_dists(y, sq), d, a_grid)
    return out * table1_factor(d, np.asarray(a_grid))


def null_statistics(
    n: int,
    d: int,
    a_grid: Sequence[float],
    reps: int,
    seed: int,
    workers: int = 1,
    stream: int = _mc.NULL_STREAM,
) -> np.ndarray:
    """Table-scaled statistic under N_d(0, I) for ``reps`` replications, shape ``(reps, len(a_grid))``."""
    if n <= d:
        raise ValueError(f"n must exceed d (got n={n}, d={d})")
    fn = functools.partial(_null_block, n=n, d=d, a_grid=tuple(float(a) for a in a_grid), seed=seed, stream=stream)
    return np.concatenate(_mc.map_blocks(fn, reps, workers), axis=0)


def critical_values_mc(
    n: int,
    d: int,
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    alpha: float = 0.05,
    reps: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    stream: int = _mc.NULL_STREAM,
) -> CriticalValueTable:
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    stats = null_statistics(n, d, a_grid, reps, seed, workers, stream)
    q = empirical_quantile(stats, alpha, axis=0)
    entries = {float(a): float(v) for a, v in zip(a_grid, q)}
    return CriticalValueTable(d=d, n=n, alpha=alpha, reps=reps, seed=seed, entries=entries)


def nystrom_points(d: int, a: float, m: int, seed: int, sampler: str = "sobol") -> np.ndarray:
    """``m`` points distributed as N(0, (2a)^-1 I_d), the normalized weight.

    ``sampler="sobol"`` maps a scrambled Sobol' sequence through the normal
    quantile function (randomized QMC); ``"iid"`` draws plain normals.
    """
    rng = _mc.substream(seed, _mc.NYSTROM_STREAM, 0)
    if sampler == "iid":
        z = rng.standard_normal((m, d))
    elif sampler == "sobol":
        with warnings.catch_warnings():
            # balance warning for m not a power of two
            warnings.simplefilter("ignore", UserWarning)
            u = qmc.Sobol(d, scramble=True, seed=rng).random(m)
        z = special.ndtri(u)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return z / math.sqrt(2 * a)


def nystrom_eigenvalues(d: int, a: float, m: int = 2000, seed: int = 0, sampler: str = "sobol") -> NystromLimit:
    """Eigenvalues of the kernel integral operator on L2(w_a).

    The operator is discretized on ``m`` points from the normalized weight,
    giving the matrix ``(pi/a)^(d/2) K(t_i, t_j) / m``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    points = nystrom_points(d, a, m, seed, sampler)
    mat = kernel_matrix(points) * ((math.pi / a) ** (d / 2) / m)
    mat = 0.5 * (mat + mat.T)
    lam = np.linalg.eigvalsh(mat)[::-1]
    if not np.all(np.isfinite(lam)):
        raise NumericalError("non-finite eigenvalues in Nystrom approximation")
    neg = lam < 0
    big_neg = int(np.sum(lam < -1e-8 * lam[0]))
    if big_neg:
        log.warning("Nystrom matrix has %d eigenvalues below -1e-8 * lambda_1; clipped to 0", big_neg)
    lam = np.where(neg, 0.0, lam)
    return NystromLimit(d=d, a=float(a), m=m, eigenvalues=lam, seed=seed, n_negative=int(neg.sum()))


def _chi2_mix_block(block: int, size: int, *, lam: np.ndarray, seed: int) -> np.ndarray:
    rng = _mc.substream(seed, _mc.NYSTROM_STREAM, block + 1)
    z = rng.standard_normal((size, lam.size))
    return (z * z) @ lam


def limit_quantiles_nystrom(
    d: int,
    a: float,
    m: int = 2000,
    l_sims: int = 100_000,
    alpha_list: Sequence[float] = (0.05,),
    seed: int = 0,
    workers: int = 1,
    sampler: str = "sobol",
) -> tuple[dict[float, float], NystromLimit]:
    """Quantiles of the table-scaled limit null law via weighted chi-square sums.

    Eigenvalues below ``1e-13 * lambda_1`` are dropped before simulation;
    their summed contribution is far below Monte Carlo resolution.
    """
    if m < 200:
        raise ValueError("m must be at least 200")
    if l_sims < 10_000:
        raise ValueError("l_sims must be at least 10000")
    lim = nystrom_eigenvalues(d, a, m, seed, sampler)
    lam = lim.eigenvalues[lim.eigenvalues > 1e-13 * lim.eigenvalues[0]]
    fn = functools.partial(_chi2_mix_block, lam=lam, seed=seed)
    sims = np.concatenate(_mc.map_blocks(fn, l_sims, workers))
    sims *= table1_factor(d, a)
    return {float(al): float(empirical_quantile(sims, al)) for al in alpha_list}, lim


def limit_critical_values(
    d: int,
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    alpha: float = 0.05,
    m: int = 2000,
    l_sims: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    sampler: str = "sobol",
) -> CriticalValueTable:
    entries = {}
    for a in a_grid:
        q, _ = limit_quantiles_nystrom(d, a, m, l_sims, (alpha,), seed, workers, sampler)
        entries[float(a)] = q[alpha]
    return CriticalValueTable(d=d, n="inf", alpha=alpha, reps=l_sims, seed=seed, entries=entries, m=m)


def p_value_from_null(observed: float, null: np.ndarray) -> float:
    null = np.asarray(null)
    return float((1 + np.count_nonzero(null >= observed)) / (null.size + 1))


def p_value_mc(
    u_scaled_observed: float,
    n: int,
    d: int,
    a: float,
    reps: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> float:
    """Add-one Monte Carlo p-value of a table-scaled observed statistic."""
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    null = null_statistics(n, d, [a], reps, seed, workers)[:, 0]
    return p_value_from_null(u_scaled_observed, null)
