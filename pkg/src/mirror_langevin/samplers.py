"""
Mirror-Langevin sampling, the unadjusted / projected Langevin baselines,
Euclidean projections and the theoretical step-size calculators.

Noise contract
--------------
A noise source is either a :class:`numpy.random.Generator` or a sequence of
generators, one per chain.  The mirror-descent half step consumes nothing;
the diffusion phase draws ``inner * d`` standard normals per chain per outer
step (``d`` per Euler-Maruyama substep, in order); ULA and PLA draw ``d``
per chain per step.  With one generator per chain, a chain's trajectory does
not depend on which other chains run alongside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import AlphaError, ConvergenceError, EmptyError, MirrorLangevinError
from .mirror import BoxLogBarrier, Euclidean, MirrorMap, WeightedSimplexBarrier
from .potentials import Potential

STATIONARITY_TOL = 1e-8
SAMPLERS = ("mla", "ula", "pla")


@dataclass(frozen=True)
class SamplerConfig:
    """Step size ``eta``, Euler-Maruyama substeps per diffusion phase,
    number of outer iterations and the master seed."""

    step_size: float
    inner_steps: int = 1
    iterations: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (self.step_size > 0 and math.isfinite(self.step_size)):
            raise ValueError("step_size must be a positive finite number")
        if int(self.inner_steps) != self.inner_steps or self.inner_steps < 1:
            raise ValueError("inner_steps must be a positive integer")
        if int(self.iterations) != self.iterations or self.iterations < 0:
            raise ValueError("iterations must be a nonnegative integer")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass
class ChainState:
    """Current iterate, its cached mirror image and the step counter."""

    primal: np.ndarray
    dual: np.ndarray
    step_index: int = 0

    @classmethod
    def start(cls, mirror_map: MirrorMap, x0) -> "ChainState":
        x0 = mirror_map.check_domain(np.array(x0, dtype=float))
        return cls(x0, mirror_map.grad(x0), 0)


@dataclass
class Trajectory:
    """Recorded iterates ``X_0 .. X_N``.

    ``states`` has shape ``(N + 1, d)`` for one chain or ``(N + 1, m, d)``
    for ``m`` chains advanced together.
    """

    states: np.ndarray
    sampler: str = "mla"
    meta: dict = field(default_factory=dict)

    @property
    def n_iterations(self) -> int:
        return self.states.shape[0] - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self):
        return self.states.shape[0]


# Noise ----------------------------------------------------------------------


def _standard_normal(noise, k: int, shape: tuple) -> np.ndarray:
    """Draw ``k`` blocks of standard normals with the given point shape.

    For a sequence of per-chain generators ``shape`` must be ``(m, d)`` and
    chain ``j`` draws its ``(k, d)`` block from ``noise[j]``.
    """
    if isinstance(noise, Sequence):
        m, d = shape
        if len(noise) != m:
            raise ValueError(f"got {len(noise)} noise streams for {m} chains")
        return np.stack([g.standard_normal((k, d)) for g in noise], axis=1)
    return noise.standard_normal((k,) + tuple(shape))


# Mirror-Langevin ------------------------------------------------------------


def _half_step_dual(mirror_map, potential, x, eta, dual=None):
    """Dual point ``grad phi(x) - eta grad V(x)`` and its primal preimage."""
    if dual is None:
        dual = mirror_map.grad(x)
    y = dual - eta * potential.grad(x)
    out = mirror_map.dual_grad(y)
    mirror_map.check_domain(out)
    # first-order optimality certificate of the Bregman proximal step
    resid = np.max(np.abs(mirror_map._grad(out) - y))
    if resid > STATIONARITY_TOL * max(1.0, float(np.max(np.abs(y)))):
        raise ConvergenceError(f"half-step stationarity residual {resid:.3e} too large")
    return out, y


def mla_half_step(mirror_map: MirrorMap, potential: Potential, x, eta: float):
    """Mirror-descent half step ``argmin_z <eta grad V(x), z> + D(z, x)``.

    Computed in closed form as ``grad*(grad phi(x) - eta grad V(x))``.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    x = mirror_map.check_domain(np.asarray(x, dtype=float))
    if eta == 0:
        return x.copy()
    return _half_step_dual(mirror_map, potential, x, eta)[0]


def proximal_slack(mirror_map: MirrorMap, potential: Potential, x, y, eta: float):
    """Slack of the Bregman proximal inequality at the half step ``x+``::

        D(y, x) - D(y, x+) - D(x+, x) - (f(x+) - f(y)),   f = eta <grad V(x), .>

    Nonnegative up to rounding for every interior ``y`` (batched over rows).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xp = mla_half_step(mirror_map, potential, x, eta)
    g = eta * potential.grad(x)
    gap = np.sum(g * (xp - y), axis=-1)
    return (mirror_map.bregman(y, x) - mirror_map.bregman(y, xp) - mirror_map.bregman(xp, x)) - gap


def _diffuse(mirror_map, w, eta, inner, noise):
    shape = w.shape
    w2 = np.atleast_2d(w)
    xi = _standard_normal(noise, inner, w2.shape)
    return mirror_map.diffuse_dual(w2, eta / inner, xi).reshape(shape)


def mla_diffusion_step(mirror_map: MirrorMap, x_half, eta: float, inner: int, noise):
    """Approximate the pure dual diffusion over time ``eta`` by ``inner``
    Euler-Maruyama substeps started from ``grad phi(x_half)``."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if inner < 1:
        raise ValueError("inner must be at least 1")
    x_half = mirror_map.check_domain(np.asarray(x_half, dtype=float))
    if eta == 0:
        return x_half.copy()
    w = _diffuse(mirror_map, mirror_map.grad(x_half), eta, inner, noise)
    return mirror_map.check_domain(mirror_map.dual_grad(w))


def mla_step(mirror_map: MirrorMap, potential: Potential, state: ChainState,
             cfg: SamplerConfig, noise) -> ChainState:
    """One full iteration: mirror-descent half step, then mirror diffusion."""
    eta = cfg.step_size
    if eta == 0:
        return ChainState(state.primal.copy(), state.dual.copy(), state.step_index + 1)
    _, y = _half_step_dual(mirror_map, potential, state.primal, eta, state.dual)
    w = _diffuse(mirror_map, y, eta, cfg.inner_steps, noise)
    x = mirror_map.check_domain(mirror_map.dual_grad(w))
    return ChainState(x, w, state.step_index + 1)


# Baselines ------------------------------------------------------------------


def ula_step(potential: Potential, x, eta: float, noise):
    """Unadjusted Langevin: ``x - eta grad V(x) + sqrt(2 eta) xi``."""
    x = np.asarray(x, dtype=float)
    xi = _standard_normal(noise, 1, np.atleast_2d(x).shape)[0].reshape(x.shape)
    return x - eta * potential.grad(x) + np.sqrt(2 * eta) * xi


def project_box(x):
    """Clamp every coordinate to ``[-1, 1]``."""
    return np.clip(np.asarray(x, dtype=float), -1.0, 1.0)


def project_simplex(x):
    """Euclidean projection onto the filled simplex ``{x >= 0, sum(x) <= 1}``.

    Clip to the orthant; rows whose clipped sum exceeds one are projected
    onto ``{x >= 0, sum(x) = 1}`` by sort-and-threshold.
    """
    x = np.asarray(x, dtype=float)
    out = np.maximum(x, 0.0)
    x2 = np.atleast_2d(x)
    o2 = np.atleast_2d(out)
    over = o2.sum(axis=-1) > 1.0
    if np.any(over):
        v = x2[over]
        u = -np.sort(-v, axis=-1, kind="stable")
        css = np.cumsum(u, axis=-1) - 1.0
        idx = np.arange(1, v.shape[-1] + 1)
        rho = np.sum(u - css / idx > 0, axis=-1)
        tau = css[np.arange(v.shape[0]), rho - 1] / rho
        o2[over] = np.maximum(v - tau[:, None], 0.0)
    return o2.reshape(x.shape)


def projection_for(mirror_map: MirrorMap) -> Callable:
    """Euclidean projection onto the closure of the map's domain."""
    if isinstance(mirror_map, BoxLogBarrier):
        return project_box
    if isinstance(mirror_map, WeightedSimplexBarrier):
        return project_simplex
    if isinstance(mirror_map, Euclidean):
        return lambda x: np.asarray(x, dtype=float)
    raise ValueError(f"no projection known for {mirror_map!r}")


def pla_step(potential: Potential, proj, x, eta: float, noise):
    """Projected Langevin: a ULA step followed by projection."""
    if isinstance(proj, str):
        proj = {"box": project_box, "simplex": project_simplex}[proj]
    return proj(ula_step(potential, x, eta, noise))


# Step sizes -----------------------------------------------------------------


def step_size_weak(eps: float, beta_prime: float, d: int) -> float:
    """``min(eps / (2 beta' d), 1 / beta')`` for the weakly convex case."""
    return min(eps / (2.0 * beta_prime * d), 1.0 / beta_prime)


def iterations_weak(eps: float, beta_prime: float, d: int, initial_cost: float) -> int:
    """Iterations for KL accuracy ``eps`` of the averaged law, weakly convex case:
    ``ceil(4 beta' d D0 / eps^2 * max(1, eps / (2 d)))``."""
    n = 4.0 * beta_prime * d * initial_cost / eps ** 2 * max(1.0, eps / (2.0 * d))
    return max(0, math.ceil(n))


def step_size_strong(eps: float, alpha: float, beta_prime: float, d: int) -> float:
    """``min(alpha eps / (2 beta' d), 1 / beta')``."""
    if alpha <= 0:
        raise AlphaError("alpha must be positive in the strongly convex case")
    return min(alpha * eps / (2.0 * beta_prime * d), 1.0 / beta_prime)


def iterations_strong(eps: float, alpha: float, beta_prime: float, d: int, initial_cost: float) -> int:
    """Iterations for Bregman transport accuracy ``eps`` when ``alpha > 0``:
    ``ceil(2 beta' d / (alpha^2 eps) * ln(2 D0 / eps) * max(1, alpha eps / (2 d)))``,
    and 0 once ``D0 <= eps / 2``."""
    if alpha <= 0:
        raise AlphaError("alpha must be positive in the strongly convex case")
    if initial_cost <= eps / 2.0:
        return 0
    n = (2.0 * beta_prime * d / (alpha ** 2 * eps)) * math.log(2.0 * initial_cost / eps) \
        * max(1.0, alpha * eps / (2.0 * d))
    return max(0, math.ceil(n))


# Chains ---------------------------------------------------------------------


def run_chain(mirror_map: MirrorMap, potential: Potential, sampler: str, x0,
              cfg: SamplerConfig, noise=None) -> Trajectory:
    """Run ``cfg.iterations`` steps of ``sampler`` (``"mla"``, ``"ula"`` or ``"pla"``).

    ``x0`` is one point ``(d,)`` or a batch ``(m, d)``; in the batch case
    ``noise`` should be a list of ``m`` generators.  Without ``noise`` a
    single stream seeded by ``cfg.seed`` is used.
    """
    sampler = sampler.lower()
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}")
    if noise is None:
        noise = np.random.default_rng(cfg.seed)
    x0 = np.array(x0, dtype=float)
    states = np.empty((cfg.iterations + 1,) + x0.shape)
    states[0] = x0
    proj = projection_for(mirror_map) if sampler == "pla" else None
    if sampler == "mla":
        state = ChainState.start(mirror_map, x0)
    x = x0
    for k in range(cfg.iterations):
        try:
            if sampler == "mla":
                state = mla_step(mirror_map, potential, state, cfg, noise)
                x = state.primal
            elif sampler == "ula":
                x = ula_step(potential, x, cfg.step_size, noise)
            else:
                x = pla_step(potential, proj, x, cfg.step_size, noise)
        except MirrorLangevinError as exc:
            err = type(exc)(f"{sampler} step {k + 1}: {exc}")
            err.step_index = k + 1
            raise err from exc
        states[k + 1] = x
    return Trajectory(states, sampler, {"step_size": cfg.step_size, "inner_steps": cfg.inner_steps})


def sample_from_mixture(traj: Trajectory, noise):
    """Return ``X_K`` with ``K`` uniform on ``{1, ..., N}`` (``X_0`` excluded)."""
    n = traj.n_iterations
    if n < 1:
        raise EmptyError("the mixture needs at least one iterate after X_0")
    return traj.states[int(noise.integers(1, n + 1))]
