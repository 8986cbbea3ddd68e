"""Exact reference samplers used as ground truth by the experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import BudgetError, WeightError
from .potentials import Potential

PROPOSAL_BUDGET = 10 ** 6


def _weights(weights) -> np.ndarray:
    a = np.asarray(weights, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise WeightError("need weights a_0, a_1, ..., a_d with d >= 1")
    if not np.all(a > 0) or not np.all(np.isfinite(a)):
        raise WeightError("all weights must be finite and strictly positive")
    return a


def sample_dirichlet_gamma(weights, rng, size=None, _allow_zero=False):
    """Draw from the density proportional to ``(1 - sum x)^{a_0} prod x_i^{a_i}``.

    That is the Dirichlet law with parameters ``(a_1 + 1, ..., a_d + 1, a_0 + 1)``
    restricted to its first ``d`` coordinates.  Built from independent
    ``Gamma(a_i + 1)`` variates normalised by their total.
    """
    if _allow_zero:
        a = np.asarray(weights, dtype=float)
        if np.any(a < 0):
            raise WeightError("weights must be nonnegative")
    else:
        a = _weights(weights)
    shape = () if size is None else (size,)
    g = rng.gamma(a + 1.0, size=shape + a.shape)
    return g[..., 1:] / g.sum(axis=-1, keepdims=True)


def sample_uniform_box(d: int, rng, size=None):
    """Uniform on ``[-1, 1]^d``."""
    shape = (d,) if size is None else (size, d)
    return rng.uniform(-1.0, 1.0, size=shape)


def sample_uniform_l1_ball(d: int, rng, size=None):
    """Uniform on the unit l1 ball: random signs times a uniform point of the
    l1 sphere (normalised exponentials), scaled by ``U^{1/d}``."""
    n = 1 if size is None else size
    e = rng.standard_exponential((n, d))
    signs = rng.choice(np.array([-1.0, 1.0]), size=(n, d))
    radius = rng.uniform(size=(n, 1)) ** (1.0 / d)
    out = signs * e / e.sum(axis=1, keepdims=True) * radius
    return out[0] if size is None else out


@dataclass(frozen=True)
class RejectionSpec:
    """Target ``exp(-V)`` on ``{x in [lower, upper] : feasible(x)}``.

    ``envelope`` must bound ``exp(-V)`` on the feasible part of the box; it
    is spot-checked on a grid at construction.
    """

    potential: Potential
    lower: np.ndarray
    upper: np.ndarray
    envelope: float = 1.0
    feasible: Callable | None = None
    grid_points: int = 9

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1 or np.any(hi <= lo):
            raise ValueError("bounding box must satisfy lower < upper coordinate-wise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not self.envelope > 0:
            raise ValueError("envelope must be positive")
        d = lo.size
        # at most ~1e5 grid nodes in total
        k = max(2, min(self.grid_points, int(1e5 ** (1.0 / d))))
        axes = [np.linspace(l, h, k) for l, h in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        grid = grid[self._feasible(grid)]
        if grid.size and np.max(np.exp(-self.potential.value(grid))) > self.envelope * (1 + 1e-12):
            raise ValueError("envelope constant does not dominate exp(-V) on the grid")

    @property
    def dimension(self) -> int:
        return self.lower.size

    def _feasible(self, x):
        if self.feasible is None:
            return np.ones(x.shape[0], dtype=bool)
        return np.asarray(self.feasible(x), dtype=bool)


def filled_simplex(x):
    """Membership in the open filled simplex (row-wise)."""
    x = np.asarray(x, dtype=float)
    return np.all(x > 0, axis=-1) & (x.sum(axis=-1) < 1)


def rejection_sample(spec: RejectionSpec, rng, size=None, budget: int = PROPOSAL_BUDGET,
                     return_stats: bool = False):
    """Exact draws by uniform proposals on the bounding box.

    A proposal is accepted when it is feasible and ``U <= exp(-V(x)) / M``.
    Proposals are generated in blocks; raises :class:`BudgetError` when
    ``budget`` consecutive proposals are rejected.
    """
    n = 1 if size is None else int(size)
    d = spec.dimension
    out = np.empty((n, d))
    filled = 0
    proposed = 0
    since_accept = 0
    block = 1024
    while filled < n:
        x = spec.lower + (spec.upper - spec.lower) * rng.uniform(size=(block, d))
        u = rng.uniform(size=block)
        ok = spec._feasible(x)
        acc = np.zeros(block, dtype=bool)
        if np.any(ok):
            acc[ok] = u[ok] * spec.envelope <= np.exp(-spec.potential.value(x[ok]))
        idx = np.flatnonzero(acc)
        if idx.size == 0:
            since_accept += block
            proposed += block
            if since_accept >= budget:
                raise BudgetError(f"{since_accept} proposals rejected in a row; check the envelope")
            block = min(2 * block, 1 << 16)
            continue
        # count proposals consumed up to the last accepted one that is used
        take = idx[: n - filled]
        out[filled:filled + take.size] = x[take]
        filled += take.size
        proposed += int(take[-1]) + 1 if filled == n else block
        since_accept = 0
    samples = out[0] if size is None else out
    if return_stats:
        return samples, {"proposals": proposed, "acceptance_rate": n / proposed}
    return samples
