"""Data ingestion and scaled residuals."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SINGULAR_RTOL = 1e-12


class DataError(ValueError):
    """Raised for malformed input tables or samples that cannot be standardized."""


class SingularCovarianceError(DataError):
    pass


@dataclass(frozen=True)
class Sample:
    """Raw ``n x d`` observation matrix."""

    values: np.ndarray
    source: str | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataError(f"sample must be a 2-d array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {row + 1}, column {col + 1}")
        n, d = values.shape
        if n <= d:
            raise DataError(f"n must exceed d (got n={n}, d={d})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ScaledResiduals:
    """Standardized observations with cached squared norms and pairwise distances.

    Rows of ``y`` have sample mean zero and sample covariance (1/n convention)
    equal to the identity.
    """

    y: np.ndarray
    sq_norms: np.ndarray = field(repr=False)
    sq_dists: np.ndarray = field(repr=False)

    @classmethod
    def from_residuals(cls, y: np.ndarray) -> ScaledResiduals:
        y = np.array(y, dtype=float)
        sq_norms = np.einsum("ij,ij->i", y, y)
        sq_dists = pairwise_sq_dists(y, sq_norms)
        for arr in (y, sq_norms, sq_dists):
            arr.setflags(write=False)
        return cls(y, sq_norms, sq_dists)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.y.shape[1]


def pairwise_sq_dists(y: np.ndarray, sq_norms: np.ndarray | None = None) -> np.ndarray:
    """Squared Euclidean distances between the rows of ``y`` (last two axes).

    Works on stacked inputs of shape ``(..., n, d)``.
    """
    if sq_norms is None:
        sq_norms = np.einsum("...ij,...ij->...i", y, y)
    gram = y @ np.swapaxes(y, -1, -2)
    dist = sq_norms[..., :, None] + sq_norms[..., None, :] - 2.0 * gram
    np.maximum(dist, 0.0, out=dist)
    n = y.shape[-2]
    dist[..., np.arange(n), np.arange(n)] = 0.0
    return dist


def inv_sqrt_sym(m: np.ndarray, rtol: float = SINGULAR_RTOL) -> np.ndarray:
    """Inverse of the symmetric positive definite square root of ``m``.

    Parameters
    ----------
    m : np.ndarray
        Symmetric positive definite matrix, or a stack of them with shape
        ``(..., d, d)``.
    rtol : float
        Eigenvalues at or below ``rtol`` times the largest eigenvalue are
        treated as singular.

    Returns
    -------
    np.ndarray
        Symmetric ``R`` with ``R @ m @ R == I``.

    Raises
    ------
    SingularCovarianceError
        If ``m`` is numerically singular.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-1] != m.shape[-2]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    scale = np.max(np.abs(m), axis=(-2, -1), keepdims=True)
    if not np.allclose(m, np.swapaxes(m, -1, -2), rtol=0.0, atol=1e-10 * np.max(scale)):
        raise ValueError("matrix is not symmetric")
    evals, evecs = np.linalg.eigh(m)
    top = evals[..., -1:]
    if np.any(evals[..., 0:1] <= rtol * top) or np.any(top <= 0):
        raise SingularCovarianceError(
            "sample covariance matrix is singular "
            f"(smallest eigenvalue {float(np.min(evals[..., 0])):.3e})"
        )
    return (evecs * evals[..., None, :] ** -0.5) @ np.swapaxes(evecs, -1, -2)


def scaled_residuals(x: np.ndarray) -> np.ndarray:
    """Scaled residuals ``S_n^{-1/2} (x_j - mean)`` for ``x`` of shape ``(..., n, d)``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-2]
    centered = x - x.mean(axis=-2, keepdims=True)
    cov = np.swapaxes(centered, -1, -2) @ centered / n
    # symmetrize against roundoff in the matmul
    cov = 0.5 * (cov + np.swapaxes(cov, -1, -2))
    return centered @ inv_sqrt_sym(cov)


def standardize(s: Sample | np.ndarray) -> ScaledResiduals:
    values = s.values if isinstance(s, Sample) else Sample(s).values
    return ScaledResiduals.from_residuals(scaled_residuals(values))


def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(f"non-numeric cell {cell!r} at row {row}, column {col}") from None


def load_sample(path: str | Path, delimiter: str = ",", header: bool | None = None) -> Sample:
    """Read a numeric CSV table, one observation per row.

    A single header row is detected automatically when ``header`` is None:
    the first row counts as a header if any of its cells fails to parse as
    a number.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [
            [cell.strip() for cell in row]
            for row in csv.reader(fh, delimiter=delimiter)
            if row and any(cell.strip() for cell in row)
        ]
    if not rows:
        raise DataError(f"{path} contains no data")

    if header is None:
        first = rows[0]
        header = any(not _is_number(cell) for cell in first)
    start = 1 if header else 0
    body = rows[start:]
    if not body:
        raise DataError(f"{path} contains a header but no data rows")

    width = len(body[0])
    data = []
    for i, row in enumerate(body, start=start + 1):
        if len(row) != width:
            raise DataError(f"ragged row {i}: expected {width} columns, got {len(row)}")
        data.append([_parse_float(cell, i, j + 1) for j, cell in enumerate(row)])
    return Sample(np.array(data, dtype=float), source=str(path))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True
