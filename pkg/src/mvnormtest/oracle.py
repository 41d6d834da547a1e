"""Definition-level evaluation by tensor Gauss-Hermite quadrature.

Everything here integrates directly against the weight ``exp(-a|t|^2)``
without using the closed form, so it serves as an independent check of
:mod:`mvnormtest.statistic`. It is also the only evaluator of the comparator
statistic built from ``|Lap psi_n - Lap psi|^2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .sample import ScaledResiduals

MAX_DIM = 4
DEFAULT_NODES = {1: 60, 2: 40, 3: 40, 4: 20}


class UnsupportedDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class EcfPoint:
    re: float
    im: float
    laplacian_re: float
    laplacian_im: float


@dataclass(frozen=True)
class QuadratureScheme:
    nodes: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,)
    a: float

    @property
    def d(self) -> int:
        return self.nodes.shape[1]


def gauss_hermite_grid(d: int, nodes_per_dim: int | None = None, a: float = 1.0) -> QuadratureScheme:
    """Tensor-product rule for ``int f(t) exp(-a|t|^2) dt`` over R^d.

    Uses the substitution ``t = u / sqrt(a)`` on the physicists' Hermite rule,
    so polynomials of degree up to ``2 * nodes_per_dim - 1`` in each
    coordinate are integrated exactly.
    """
    if d > MAX_DIM:
        raise UnsupportedDimensionError(
            f"tensor quadrature supports d <= {MAX_DIM}; use the closed form for d={d}"
        )
    if d < 1:
        raise ValueError("d must be positive")
    if a <= 0:
        raise ValueError("a must be positive")
    if nodes_per_dim is None:
        nodes_per_dim = DEFAULT_NODES[d]
    if not 10 <= nodes_per_dim <= 100:
        raise ValueError("nodes_per_dim must lie in [10, 100]")
    x, w = hermgauss(nodes_per_dim)
    x = x / math.sqrt(a)
    w = w / math.sqrt(a)
    nodes = np.array(list(itertools.product(x, repeat=d)))
    weights = np.prod(np.array(list(itertools.product(w, repeat=d))), axis=1)
    return QuadratureScheme(nodes=nodes, weights=weights, a=float(a))


def integrate(scheme: QuadratureScheme, values: np.ndarray) -> float:
    return math.fsum(scheme.weights * values)


def ecf_point(y: ScaledResiduals, t: np.ndarray) -> EcfPoint:
    phase = y.y @ np.asarray(t, dtype=float)
    c, s = np.cos(phase), np.sin(phase)
    return EcfPoint(
        re=float(c.mean()),
        im=float(s.mean()),
        laplacian_re=float(-(y.sq_norms * c).mean()),
        laplacian_im=float(-(y.sq_norms * s).mean()),
    )


def _sn_values(y: ScaledResiduals, t: np.ndarray, chunk: int = 4096) -> np.ndarray:
    t = np.atleast_2d(np.asarray(t, dtype=float))
    out = np.empty(t.shape[0])
    for lo in range(0, t.shape[0], chunk):
        tt = t[lo : lo + chunk]
        phase = tt @ y.y.T  # (m, n)
        coef = y.sq_norms[None, :] + np.einsum("ij,ij->i", tt, tt)[:, None] - y.d
        out[lo : lo + chunk] = (coef * (np.cos(phase) + np.sin(phase))).sum(axis=1)
    return out / math.sqrt(y.n)


def sn_process(y: ScaledResiduals, t: np.ndarray) -> float | np.ndarray:
    """The process ``S_n(t)``; accepts one point or an ``(m, d)`` array of points."""
    t = np.asarray(t, dtype=float)
    vals = _sn_values(y, t)
    return float(vals[0]) if t.ndim <= 1 else vals


def u_statistic_quadrature(y: ScaledResiduals, scheme: QuadratureScheme) -> float:
    if scheme.d != y.d:
        raise ValueError(f"scheme dimension {scheme.d} does not match data dimension {y.d}")
    return integrate(scheme, _sn_values(y, scheme.nodes) ** 2)


def t_statistic_quadrature(y: ScaledResiduals, scheme: QuadratureScheme, chunk: int = 4096) -> float:
    """Comparator ``n int |Lap psi_n(t) - Lap psi(t)|^2 w_a(t) dt`` with psi the N(0, I) c.f."""
    if scheme.d != y.d:
        raise ValueError(f"scheme dimension {scheme.d} does not match data dimension {y.d}")
    t = scheme.nodes
    vals = np.empty(t.shape[0])
    for lo in range(0, t.shape[0], chunk):
        tt = t[lo : lo + chunk]
        phase = tt @ y.y.T
        lap_re = -(y.sq_norms * np.cos(phase)).mean(axis=1)
        lap_im = -(y.sq_norms * np.sin(phase)).mean(axis=1)
        tsq = np.einsum("ij,ij->i", tt, tt)
        lap_normal = (tsq - y.d) * np.exp(-tsq / 2)
        vals[lo : lo + chunk] = (lap_re - lap_normal) ** 2 + lap_im**2
    return y.n * integrate(scheme, vals)
