"""
scikit-learn style wrappers.

:class:`MirrorLangevinSampler` treats an initial point cloud as the input
``X`` and transports it with the sampler; :class:`BayesianLogisticRegressionMLA`
is a classifier whose coefficients are the posterior mean under a uniform
prior on ``[-1, 1]^d``, estimated with MLA on the box log-barrier.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .mirror import MirrorMap, make_mirror_map
from .potentials import LogisticDataset, LogisticPotential, Potential, ZeroPotential
from .samplers import SamplerConfig, run_chain, sample_from_mixture


def _streams(seed, n):
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(n)]


class MirrorLangevinSampler(TransformerMixin, BaseEstimator):
    """Run a Langevin-type sampler from every row of ``X``.

    Parameters
    ----------
    mirror : str or MirrorMap
        ``"euclidean"``, ``"box"`` or ``"simplex"``, or a map instance.
    potential : Potential, optional
        Target potential; ``None`` samples the uniform law on the domain.
    sampler : {"mla", "ula", "pla"}
    step_size, inner_steps, iterations : sampler settings.
    seed : int
        Master seed; chain ``j`` gets the ``j``-th spawned stream.
    """

    def __init__(self, mirror="box", potential=None, sampler="mla", step_size=0.01,
                 inner_steps=10, iterations=100, seed=0):
        self.mirror = mirror
        self.potential = potential
        self.sampler = sampler
        self.step_size = step_size
        self.inner_steps = inner_steps
        self.iterations = iterations
        self.seed = seed

    def _setup(self, d):
        m = self.mirror if isinstance(self.mirror, MirrorMap) else make_mirror_map(self.mirror, d)
        if m.dimension != d:
            raise ValueError(f"mirror map has dimension {m.dimension}, X has {d} features")
        p = ZeroPotential(d) if self.potential is None else self.potential
        if not isinstance(p, Potential):
            raise TypeError("potential must be a Potential instance or None")
        cfg = SamplerConfig(self.step_size, self.inner_steps, self.iterations, self.seed)
        return m, p, cfg

    def _run(self, X):
        m, p, cfg = self._setup(X.shape[1])
        return run_chain(m, p, self.sampler, X, cfg, noise=_streams(self.seed, X.shape[0]))

    def fit(self, X, y=None):
        """Run one chain per row of ``X`` and keep the trajectory."""
        X = check_array(X, dtype=float)
        self.trajectory_ = self._run(X)
        self.samples_ = self.trajectory_.final
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Final positions of chains started from the rows of ``X``."""
        check_is_fitted(self, "trajectory_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self._run(X).final

    def sample_mixture(self, n, random_state=None):
        """Draw ``n`` points, each from a uniformly chosen chain and iterate ``1..N``."""
        check_is_fitted(self, "trajectory_")
        rng = np.random.default_rng(random_state)
        states = self.trajectory_.states
        out = np.empty((n, states.shape[-1]))
        for i in range(n):
            chain = states[:, rng.integers(states.shape[1])]
            out[i] = sample_from_mixture(type(self.trajectory_)(chain), rng)
        return out


class BayesianLogisticRegressionMLA(ClassifierMixin, BaseEstimator):
    """Bayesian logistic regression with a uniform prior on ``[-1, 1]^d``.

    The posterior is sampled by MLA with the box log-barrier; ``coef_`` is
    the mean over chains and post-burn-in iterations, and ``predict_proba``
    averages the logistic link over the retained samples.
    """

    def __init__(self, step_size=0.005, inner_steps=10, iterations=500, n_chains=30, burn_in=0,
                 seed=0):
        self.step_size = step_size
        self.inner_steps = inner_steps
        self.iterations = iterations
        self.n_chains = n_chains
        self.burn_in = burn_in
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        check_classification_targets(y)
        self.classes_, labels = np.unique(y, return_inverse=True)
        if self.classes_.size != 2:
            raise ValueError("BayesianLogisticRegressionMLA needs exactly two classes")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        d = X.shape[1]
        potential = LogisticPotential(LogisticDataset(X, labels.astype(float)))
        cfg = SamplerConfig(self.step_size, self.inner_steps, self.iterations, self.seed)
        box = make_mirror_map("box", d)
        traj = run_chain(box, potential, "mla", np.zeros((self.n_chains, d)), cfg,
                         noise=_streams(self.seed, self.n_chains))
        self.samples_ = traj.states[self.burn_in + 1:].reshape(-1, d)
        self.coef_ = self.samples_.mean(axis=0)
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return X @ self.coef_

    def predict_proba(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        p1 = expit(X @ self.samples_.T).mean(axis=1)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.classes_[(self.predict_proba(X)[:, 1] > 0.5).astype(int)]
