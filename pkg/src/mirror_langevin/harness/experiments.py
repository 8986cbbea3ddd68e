"""
Experiment orchestration.

Each runner takes an :class:`ExperimentConfig` and returns a list of
:class:`RunRecord`.  Records are emitted per trial (``trial = 0..T-1``) and,
for every ``(sampler, inner_steps, iteration, metric)``, once more as the
arithmetic mean over trials with ``trial = -1``.  Baseline samplers (ULA,
PLA) have no inner discretisation and are written with ``inner_steps = 0``.

All randomness is drawn from :func:`~mirror_langevin.harness.rng.stream`
with a tag per purpose, so results do not depend on thread scheduling.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..mirror import MirrorMap, SimplexBarrier, WeightedSimplexBarrier, BoxLogBarrier, make_mirror_map
from ..oracle import RejectionSpec, filled_simplex, rejection_sample, sample_dirichlet_gamma
from ..potentials import (DirichletPotential, LogisticPotential, Potential, QuadraticPotential,
                          ZeroPotential)
from ..samplers import SamplerConfig, Trajectory, run_chain
from ..transport import empirical_w2_sq
from .config import ExperimentConfig
from .data import generate_logistic_data, read_dataset
from .records import MEAN_TRIAL, RunRecord
from .rng import chain_streams, stream


@dataclass(frozen=True)
class Setting:
    """Mirror map, potential and common starting point of one experiment."""

    mirror_map: MirrorMap
    potential: Potential
    x0: np.ndarray


# Building blocks --------------------------------------------------------------


def quadratic_on_simplex_matrix(d: int, rng) -> np.ndarray:
    """``A = B B^T`` with ``B`` uniform on ``[-1, 1]``, rescaled so that
    ``max |A_ij| = 1``."""
    b = rng.uniform(-1.0, 1.0, size=(d, d))
    a = b @ b.T
    a = 0.5 * (a + a.T)
    return a / np.max(np.abs(a))


def simplex_rejection_spec(potential: Potential) -> RejectionSpec:
    """Rejection sampler for ``exp(-V)`` on the filled simplex, ``V >= 0``."""
    d = potential.dimension
    return RejectionSpec(potential, np.zeros(d), np.ones(d), envelope=1.0, feasible=filled_simplex)


def _sampler_config(cfg: ExperimentConfig, sampler: str, inner: int | None = None,
                    iterations: int | None = None) -> SamplerConfig:
    eta = cfg.pla_step_size if sampler == "pla" else cfg.step_size
    return SamplerConfig(step_size=eta, inner_steps=cfg.inner_steps if inner is None else inner,
                         iterations=cfg.iterations if iterations is None else iterations,
                         seed=cfg.seed)


def run_cloud(setting: Setting, sampler: str, scfg: SamplerConfig, streams) -> Trajectory:
    """Advance ``len(streams)`` chains from ``setting.x0``; states are ``(N+1, m, d)``."""
    x0 = np.tile(setting.x0, (len(streams), 1))
    return run_chain(setting.mirror_map, setting.potential, sampler, x0, scfg, noise=streams)


def _inner_col(sampler: str, k: int) -> int:
    return k if sampler == "mla" else 0


def _map_trials(fn, trials: int, threads: int):
    if threads <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def average_trials(records: list[RunRecord]) -> list[RunRecord]:
    """Append one ``trial = -1`` row per key holding the mean over trials."""
    groups = defaultdict(list)
    for r in records:
        if r.trial != MEAN_TRIAL:
            groups[(r.experiment, r.sampler, r.inner_steps, r.iteration, r.metric)].append(r.value)
    means = [RunRecord(e, s, k, MEAN_TRIAL, i, m, float(np.mean(v)))
             for (e, s, k, i, m), v in groups.items()]
    return list(records) + means


# Bayesian logistic regression ---------------------------------------------------


def blr_dataset(cfg: ExperimentConfig, trial: int):
    if cfg.dataset:
        return read_dataset(cfg.dataset)
    theta = np.full(cfg.dimension, cfg.theta_star)
    return generate_logistic_data(cfg.dimension, cfg.n_pairs, theta, stream(cfg.seed, "blr-data", trial))


def blr_metrics(states: np.ndarray, theta_star: np.ndarray, burn_in: int):
    """Per-iteration errors of the cross-chain mean and of the running mean.

    Yields ``(iteration, metric, value)`` for iterations ``1..N``; the running
    mean averages iterations ``burn_in+1..k`` over all chains and is only
    reported once that window is nonempty.
    """
    chain_mean = states.mean(axis=1)
    csum = np.cumsum(chain_mean[1:], axis=0)
    for k in range(1, states.shape[0]):
        yield k, "posterior_mean_error", float(np.linalg.norm(chain_mean[k] - theta_star))
        if k > burn_in:
            window = csum[k - 1] - (csum[burn_in - 1] if burn_in > 0 else 0.0)
            est = window / (k - burn_in)
            yield k, "running_mean_error", float(np.linalg.norm(est - theta_star))


def run_experiment_blr(cfg: ExperimentConfig, threads: int = 1,
                       samplers=("mla", "pla")) -> list[RunRecord]:
    """Posterior-mean error of MLA (box log-barrier) and PLA on synthetic data."""
    theta_star = np.full(cfg.dimension, cfg.theta_star)

    def trial(t):
        ds = blr_dataset(cfg, t)
        if ds.dimension != cfg.dimension:
            raise ValueError(f"dataset has dimension {ds.dimension}, config says {cfg.dimension}")
        mirror_map = BoxLogBarrier(cfg.dimension)
        setting = Setting(mirror_map, LogisticPotential(ds), mirror_map.center())
        out = []
        for s in samplers:
            traj = run_cloud(setting, s, _sampler_config(cfg, s),
                             chain_streams(cfg.seed, f"blr-{s}", t, cfg.chains))
            for k, metric, value in blr_metrics(traj.states, theta_star, cfg.burn_in):
                out.append(RunRecord("blr", s, _inner_col(s, cfg.inner_steps), t, k, metric, value))
        return out

    return average_trials([r for rows in _map_trials(trial, cfg.trials, threads) for r in rows])


# Quadratic on the simplex -------------------------------------------------------


def simplex_quadratic_setting(cfg: ExperimentConfig) -> Setting:
    a = quadratic_on_simplex_matrix(cfg.dimension, stream(cfg.matrix_seed, "sq-matrix"))
    mirror_map = SimplexBarrier(cfg.dimension)
    return Setting(mirror_map, QuadraticPotential(a), mirror_map.center())


def _reference_kind(cfg: ExperimentConfig) -> str:
    if cfg.reference != "auto":
        return cfg.reference
    return "rejection" if cfg.dimension <= 3 else "selfref"


def simplex_quadratic_reference(cfg: ExperimentConfig, setting: Setting, trial: int) -> np.ndarray:
    kind = _reference_kind(cfg)
    if kind == "rejection":
        return rejection_sample(simplex_rejection_spec(setting.potential),
                                stream(cfg.seed, "sq-ref", trial), size=cfg.chains)
    if kind == "selfref":
        scfg = _sampler_config(cfg, "mla", iterations=cfg.selfref_iterations)
        traj = run_cloud(setting, "mla", scfg, chain_streams(cfg.seed, "sq-selfref", trial, cfg.chains))
        return traj.final
    raise ValueError(f"reference {kind!r} is not available for simplex_quadratic")


def run_experiment_simplex_quadratic(cfg: ExperimentConfig, threads: int = 1,
                                     samplers=("mla", "pla")) -> list[RunRecord]:
    """W2^2 between MLA / PLA chain clouds and a reference cloud, per iteration.

    With a rejection-sampler reference the metric is ``w2sq``; with a long
    MLA run as reference it is ``w2sq_vs_selfref``.
    """
    setting = simplex_quadratic_setting(cfg)
    metric = "w2sq" if _reference_kind(cfg) == "rejection" else "w2sq_vs_selfref"

    def trial(t):
        ref = simplex_quadratic_reference(cfg, setting, t)
        out = []
        for s in samplers:
            traj = run_cloud(setting, s, _sampler_config(cfg, s),
                             chain_streams(cfg.seed, f"sq-{s}", t, cfg.chains))
            for k in range(1, traj.states.shape[0]):
                out.append(RunRecord("simplex_quadratic", s, _inner_col(s, cfg.inner_steps), t, k,
                                     metric, empirical_w2_sq(traj.states[k], ref)))
        return out

    return average_trials([r for rows in _map_trials(trial, cfg.trials, threads) for r in rows])


# Dirichlet ------------------------------------------------------------------------


def dirichlet_setting(cfg: ExperimentConfig) -> Setting:
    mirror_map = WeightedSimplexBarrier(cfg.weight_vector)
    return Setting(mirror_map, DirichletPotential(cfg.weight_vector), mirror_map.center())


def dirichlet_mean(weights) -> np.ndarray:
    """Exact mean ``(a_i + 1) / sum_j (a_j + 1)`` of coordinates ``1..d``."""
    a = np.asarray(weights, dtype=float) + 1.0
    return a[1:] / a.sum()


def run_experiment_dirichlet(cfg: ExperimentConfig, threads: int = 1) -> list[RunRecord]:
    """MLA with the potential as its own mirror map, one curve per inner-step count.

    Every ``k`` in ``cfg.inner_steps_sweep`` reuses the same per-chain noise
    streams and the same gamma reference cloud within a trial, so the curves
    differ only through the discretisation.
    """
    setting = dirichlet_setting(cfg)
    mean = dirichlet_mean(cfg.weight_vector)

    def trial(t):
        ref = sample_dirichlet_gamma(cfg.weight_vector, stream(cfg.seed, "dir-ref", t), size=cfg.chains)
        out = []
        for k in cfg.inner_steps_sweep:
            traj = run_cloud(setting, "mla", _sampler_config(cfg, "mla", inner=k),
                             chain_streams(cfg.seed, "dir-mla", t, cfg.chains))
            for i in range(1, traj.states.shape[0]):
                cloud = traj.states[i]
                out.append(RunRecord("dirichlet", "mla", k, t, i, "w2sq", empirical_w2_sq(cloud, ref)))
                out.append(RunRecord("dirichlet", "mla", k, t, i, "mean_error",
                                     float(np.linalg.norm(cloud.mean(axis=0) - mean))))
        return out

    return average_trials([r for rows in _map_trials(trial, cfg.trials, threads) for r in rows])


# Single runs ------------------------------------------------------------------------


def custom_setting(cfg: ExperimentConfig) -> Setting:
    d = cfg.dimension
    mirror_map = make_mirror_map(cfg.mirror, d, cfg.weight_vector)
    if cfg.potential == "zero":
        potential = ZeroPotential(d)
    elif cfg.potential == "quadratic":
        potential = QuadraticPotential(np.eye(d))
    else:
        potential = DirichletPotential(cfg.weight_vector)
    return Setting(mirror_map, potential, mirror_map.center())


def build_setting(cfg: ExperimentConfig, trial: int = 0) -> Setting:
    if cfg.experiment == "blr":
        m = BoxLogBarrier(cfg.dimension)
        return Setting(m, LogisticPotential(blr_dataset(cfg, trial)), m.center())
    if cfg.experiment == "simplex_quadratic":
        return simplex_quadratic_setting(cfg)
    if cfg.experiment == "dirichlet":
        return dirichlet_setting(cfg)
    return custom_setting(cfg)


def run_single(cfg: ExperimentConfig, threads: int = 1):
    """Run ``cfg.sampler`` on the configured setting, one cloud per trial.

    Records the per-coordinate cloud mean (``mean_x1..mean_xd``) at every
    iteration; returns ``(records, final_clouds)`` with one ``(C, d)`` array
    per trial.
    """
    s = cfg.sampler

    def trial(t):
        setting = build_setting(cfg, t)
        traj = run_cloud(setting, s, _sampler_config(cfg, s),
                         chain_streams(cfg.seed, f"{cfg.experiment}-single-{s}", t, cfg.chains))
        means = traj.states.mean(axis=1)
        rows = [RunRecord(cfg.experiment, s, _inner_col(s, cfg.inner_steps), t, i, f"mean_x{j + 1}",
                          float(means[i, j]))
                for i in range(1, means.shape[0]) for j in range(means.shape[1])]
        return rows, traj.final

    results = _map_trials(trial, cfg.trials, threads)
    records = average_trials([r for rows, _ in results for r in rows])
    return records, [cloud for _, cloud in results]


RUNNERS = {
    "blr": run_experiment_blr,
    "simplex_quadratic": run_experiment_simplex_quadratic,
    "dirichlet": run_experiment_dirichlet,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[RunRecord]:
    if cfg.experiment not in RUNNERS:
        return run_single(cfg, threads)[0]
    return RUNNERS[cfg.experiment](cfg, threads)
