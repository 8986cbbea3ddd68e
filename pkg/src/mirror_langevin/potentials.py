"""
Target potentials ``V`` (negative log-densities up to a constant) and the
convexity-profile constants that drive the theoretical step sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import WeightError
from .mirror import WeightedSimplexBarrier


class Potential:
    """Base class.  ``value`` and ``grad`` act on the last axis."""

    kind = ""

    def __init__(self, dimension: int):
        self.dimension = int(dimension)

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class ZeroPotential(Potential):
    """``V = 0``: the target is uniform on the mirror map's domain."""

    kind = "Zero"

    def value(self, x):
        return np.zeros(np.shape(x)[:-1])

    def grad(self, x):
        return np.zeros(np.shape(x))

    def hessian(self, x):
        return np.zeros((self.dimension, self.dimension))


class QuadraticPotential(Potential):
    """``V(x) = <x, A x> / 2`` with ``A`` symmetric positive semidefinite."""

    kind = "Quadratic"

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("quadratic form must be a square matrix")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
            raise ValueError("quadratic form must be symmetric")
        if np.linalg.eigvalsh(a).min() < -1e-10:
            raise ValueError("quadratic form must be positive semidefinite")
        super().__init__(a.shape[0])
        self.matrix = a

    @property
    def entries_bounded(self) -> bool:
        """Whether every entry has magnitude at most 1."""
        return bool(np.max(np.abs(self.matrix)) <= 1.0 + 1e-12)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.sum(x * (x @ self.matrix), axis=-1)

    def grad(self, x):
        return np.asarray(x, dtype=float) @ self.matrix

    def hessian(self, x):
        return self.matrix


@dataclass(frozen=True)
class LogisticDataset:
    """Covariates ``features`` (n, d) and binary ``labels`` (n,)."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.labels, dtype=float).ravel()
        if X.shape[0] < 1:
            raise ValueError("dataset needs at least one pair")
        if y.shape[0] != X.shape[0]:
            raise ValueError("features and labels disagree on n")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]


def softplus(t):
    """``log(1 + exp(t))`` without overflow."""
    t = np.asarray(t, dtype=float)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


class LogisticPotential(Potential):
    """Negative log-likelihood of logistic regression.

    ``V(theta) = sum_i softplus(<theta, X_i>) - Y_i <theta, X_i>``.  Paired
    with a uniform prior on ``[-1, 1]^d`` this is the posterior potential on
    the box.
    """

    kind = "LogisticRegression"

    def __init__(self, dataset: LogisticDataset):
        super().__init__(dataset.dimension)
        self.dataset = dataset

    def _scores(self, theta):
        return np.asarray(theta, dtype=float) @ self.dataset.features.T

    def value(self, theta):
        t = self._scores(theta)
        return np.sum(softplus(t) - self.dataset.labels * t, axis=-1)

    def grad(self, theta):
        t = self._scores(theta)
        return -(self.dataset.labels - expit(t)) @ self.dataset.features

    def hessian(self, theta):
        t = self._scores(theta)
        s = expit(t)
        X = self.dataset.features
        return (X * (s * (1.0 - s))[:, None]).T @ X


class DirichletPotential(Potential):
    """``V(x) = -a_0 log(1 - sum x) - sum_i a_i log x_i`` on the open filled simplex.

    Identical to :class:`~mirror_langevin.mirror.WeightedSimplexBarrier`, which
    is reused for the arithmetic so the potential can also serve as its own
    mirror map.
    """

    kind = "WeightedBarrier"

    def __init__(self, weights):
        self.barrier = WeightedSimplexBarrier(weights)
        super().__init__(self.barrier.dimension)
        self.weights = self.barrier.weights

    def value(self, x):
        return self.barrier.value(x)

    def grad(self, x):
        return self.barrier.grad(x)

    def hessian(self, x):
        return self.barrier.hessian_factor(x).hessian()


def potential_value(p: Potential, x):
    return p.value(x)


def potential_grad(p: Potential, x):
    return p.grad(x)


# Convexity profiles ---------------------------------------------------------


@dataclass(frozen=True)
class ConvexityProfile:
    """Relative convexity ``alpha``, smoothness ``beta``, Lipschitz ``lipschitz``
    (all relative to the mirror map) and ``beta_prime = beta + 2 M L``."""

    alpha: float
    beta: float
    lipschitz: float
    self_concordance: float
    beta_prime: float
    beta_prime_bound: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.alpha <= self.beta):
            raise ValueError("need 0 <= alpha <= beta")
        if self.beta_prime < self.beta:
            raise ValueError("beta_prime must dominate beta")


def composite_constant(beta: float, self_concordance: float, lipschitz: float) -> float:
    """``beta + 2 M L``."""
    return beta + 2.0 * self_concordance * lipschitz


def _power_iteration(gram, v, tol, max_iter):
    v = v / np.linalg.norm(v)
    lam = float(v @ gram @ v)
    for _ in range(max_iter):
        w = gram @ v
        lam = float(v @ w)
        # residual test: |G v - lam v| small means lam is an eigenvalue to ~tol
        if np.linalg.norm(w - lam * v) <= tol * abs(lam):
            break
        v = w / np.linalg.norm(w)
    return lam


def logistic_smoothness_bound(ds: LogisticDataset, tol: float = 1e-8, max_iter: int = 1000) -> float:
    """Largest eigenvalue of ``sum_i X_i X_i^T`` by power iteration.

    Runs from the all-ones vector and, because that vector can be an
    eigenvector of a smaller eigenvalue (e.g. ``X = [[1, 1], [2, -2]]``),
    again from a fixed pseudo-random vector; the larger Rayleigh quotient is
    returned.  Each run stops once ``|G v - lam v| <= tol * lam``.
    """
    gram = ds.features.T @ ds.features
    if not np.any(gram):
        return 0.0
    d = gram.shape[0]
    starts = (np.ones(d), np.random.default_rng(0).standard_normal(d))
    return max(_power_iteration(gram, v, tol, max_iter) for v in starts if np.any(gram @ v))


def logistic_lipschitz_bound(ds: LogisticDataset) -> float:
    """``sum_i |X_i|_2``, an upper bound on ``sup |grad V|`` since every
    residual ``Y_i - sigmoid(.)`` lies in ``[-1, 1]``."""
    return float(np.sum(np.linalg.norm(ds.features, axis=1)))


def profile_blr(beta: float, lipschitz: float) -> ConvexityProfile:
    """Profile for logistic regression under the box log-barrier.

    The barrier is 2-strongly convex, so ordinary smoothness ``beta`` and
    Lipschitz constant ``L`` become ``beta / 2`` and ``L / sqrt(2)``
    relative to it; with ``M = 1`` this gives ``beta_prime = beta / 2 + sqrt(2) L``.
    """
    if beta < 0 or lipschitz < 0:
        raise ValueError("beta and lipschitz must be nonnegative")
    rel_beta = beta / 2.0
    rel_l = lipschitz / math.sqrt(2.0)
    return ConvexityProfile(
        alpha=0.0,
        beta=rel_beta,
        lipschitz=rel_l,
        self_concordance=1.0,
        beta_prime=beta / 2.0 + math.sqrt(2.0) * lipschitz,
    )


def profile_simplex_quadratic() -> ConvexityProfile:
    """Quadratic with entries bounded by 1 under the unit simplex barrier:
    1-relatively smooth and 1-relatively Lipschitz, so ``beta_prime = 3``."""
    return ConvexityProfile(alpha=0.0, beta=1.0, lipschitz=1.0, self_concordance=1.0, beta_prime=3.0)


def profile_dirichlet(weights) -> ConvexityProfile:
    """Dirichlet potential used as its own mirror map.

    ``alpha = beta = 1``, ``L = sqrt(sum a_i)``, ``M = max a_i^{-1/2}``.
    ``beta_prime_bound`` holds the cruder ``3 sqrt(d) sqrt(a_max / a_min)``.
    """
    a = np.asarray(weights, dtype=float)
    if a.ndim != 1 or a.size < 2 or not np.all(a > 0):
        raise WeightError("all weights must be strictly positive")
    d = a.size - 1
    lip = math.sqrt(float(np.sum(a)))
    m = float(np.max(a ** -0.5))
    return ConvexityProfile(
        alpha=1.0,
        beta=1.0,
        lipschitz=lip,
        self_concordance=m,
        beta_prime=composite_constant(1.0, m, lip),
        beta_prime_bound=3.0 * math.sqrt(d) * math.sqrt(float(a.max() / a.min())),
    )


def make_potential(kind: str, **kwargs) -> Potential:
    key = kind.lower()
    if key == "zero":
        return ZeroPotential(kwargs["dimension"])
    if key == "quadratic":
        return QuadraticPotential(kwargs["matrix"])
    if key in ("logistic", "logistic_regression", "blr"):
        return LogisticPotential(kwargs["dataset"])
    if key in ("dirichlet", "weighted_barrier"):
        return DirichletPotential(kwargs["weights"])
    raise ValueError(f"unknown potential {kind!r}")

