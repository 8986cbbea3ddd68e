"""
Transport diagnostics between equal-weight point clouds.

For two clouds of the same size the optimal coupling can be taken to be a
permutation, so both the squared 2-Wasserstein distance and the Bregman
transport cost reduce to a linear assignment problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .exceptions import EmptyError, ShapeError, SizeError
from .mirror import MirrorMap


@dataclass(frozen=True)
class EmpiricalMeasure:
    """``m`` equally weighted atoms in ``d`` dimensions."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise EmptyError("an empirical measure needs at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def _as_measure(a) -> EmpiricalMeasure:
    return a if isinstance(a, EmpiricalMeasure) else EmpiricalMeasure(a)


def min_cost_assignment(cost) -> tuple[np.ndarray, float]:
    """Exact minimum-cost perfect matching of a square cost matrix.

    Returns ``(perm, total)`` with ``perm[i]`` the column matched to row ``i``.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ShapeError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix entries must be finite")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].sum())


def _check_sizes(a, b):
    if a.size != b.size:
        raise SizeError(f"clouds have {a.size} and {b.size} points")
    if a.dimension != b.dimension:
        raise SizeError(f"clouds live in dimensions {a.dimension} and {b.dimension}")


def squared_euclidean_costs(a, b) -> np.ndarray:
    a, b = _as_measure(a), _as_measure(b)
    return cdist(a.points, b.points, "sqeuclidean")


def bregman_costs(mirror_map: MirrorMap, a, b) -> np.ndarray:
    """Matrix ``C[i, j] = D(a_i, b_j)``; rows play the first argument."""
    a, b = _as_measure(a), _as_measure(b)
    pa, pb = mirror_map.check_domain(a.points), mirror_map.check_domain(b.points)
    fa, fb = mirror_map.value(pa), mirror_map.value(pb)
    gb = mirror_map.grad(pb)
    cost = fa[:, None] - fb[None, :] - pa @ gb.T + np.sum(gb * pb, axis=1)[None, :]
    # rounding can push D(x, x) a hair below zero
    return np.maximum(cost, 0.0)


def empirical_w2_sq(a, b) -> float:
    """Squared 2-Wasserstein distance between two clouds of equal size."""
    a, b = _as_measure(a), _as_measure(b)
    _check_sizes(a, b)
    return min_cost_assignment(squared_euclidean_costs(a, b))[1] / a.size


def empirical_bregman_cost(mirror_map: MirrorMap, a, b) -> float:
    """Bregman transport cost ``inf E D(X, Y)`` with ``X ~ a``, ``Y ~ b``."""
    a, b = _as_measure(a), _as_measure(b)
    _check_sizes(a, b)
    return min_cost_assignment(bregman_costs(mirror_map, a, b))[1] / a.size


def posterior_mean_error(samples, theta_star, burn_in: int = 0) -> float:
    """``|mean(samples[burn_in:]) - theta_star|_2``.

    ``samples`` is an ``(n, d)`` array or a trajectory's ``states``; for a
    multi-chain array ``(n, m, d)`` the mean runs over iterations and chains.
    """
    samples = getattr(samples, "states", samples)
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[None, :]
    if burn_in < 0 or burn_in >= samples.shape[0]:
        raise EmptyError(f"burn_in {burn_in} leaves no samples out of {samples.shape[0]}")
    kept = samples[burn_in:].reshape(-1, samples.shape[-1])
    return float(np.linalg.norm(kept.mean(axis=0) - np.asarray(theta_star, dtype=float)))


def per_coordinate_moments(samples) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate sample mean and unbiased variance of an ``(n, d)`` array."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] < 2:
        raise EmptyError("need at least two samples for an unbiased variance")
    return samples.mean(axis=0), samples.var(axis=0, ddof=1)
