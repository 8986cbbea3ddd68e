"""
Mirror maps of Legendre type.

Each map exposes the primal value, the gradient map into dual space, its
inverse (the gradient of the convex conjugate), a structured factor of the
Hessian and the self-concordance constant.  All methods act on the last axis
so a batch of points of shape ``(m, d)`` is handled in one call.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import ConvergenceError, DomainError, WeightError

#: Strict margin used by every interior predicate.
BOUNDARY_MARGIN = 1e-14

DUAL_TOL = 1e-12
DUAL_MAX_ITER = 200


@dataclass(frozen=True)
class HessianFactor:
    """Structured factor ``C`` with ``C @ C.T == hessian``.

    The Hessian is ``diag(diag) + scale * ones @ ones.T``.  ``structure`` is
    one of ``"identity"``, ``"diagonal"`` or ``"diagonal_plus_rank_one"``.
    Arrays may carry leading batch axes; ``diag`` has shape ``(..., d)`` and
    ``scale`` shape ``(...)``.

    For the rank-one case the factor is ``D^{1/2} (I + g u u^T)`` with
    ``u = sqrt(scale) D^{-1/2} 1`` and ``g = 1 / (1 + sqrt(1 + |u|^2))``, so
    products and solves cost O(d).
    """

    structure: str
    diag: np.ndarray
    scale: np.ndarray | float = 0.0

    @property
    def _sqrt_diag(self):
        return np.sqrt(self.diag)

    def _rank_one(self):
        sd = self._sqrt_diag
        scale = np.asarray(self.scale, dtype=float)[..., None]
        u = np.sqrt(scale) / sd
        q = np.sum(u * u, axis=-1, keepdims=True)
        g = 1.0 / (1.0 + np.sqrt(1.0 + q))
        return sd, u, q, g

    def matvec(self, v):
        """Return ``C @ v``."""
        v = np.asarray(v, dtype=float)
        if self.structure == "identity":
            return v.copy()
        if self.structure == "diagonal":
            return self._sqrt_diag * v
        sd, u, _, g = self._rank_one()
        return sd * (v + g * u * np.sum(u * v, axis=-1, keepdims=True))

    def rmatvec(self, v):
        """Return ``C.T @ v``."""
        v = np.asarray(v, dtype=float)
        if self.structure == "identity":
            return v.copy()
        if self.structure == "diagonal":
            return self._sqrt_diag * v
        sd, u, _, g = self._rank_one()
        w = sd * v
        return w + g * u * np.sum(u * w, axis=-1, keepdims=True)

    def solve(self, v):
        """Return ``C^{-1} @ v``."""
        v = np.asarray(v, dtype=float)
        if self.structure == "identity":
            return v.copy()
        if self.structure == "diagonal":
            return v / self._sqrt_diag
        sd, u, q, g = self._rank_one()
        z = v / sd
        return z - (g / (1.0 + g * q)) * u * np.sum(u * z, axis=-1, keepdims=True)

    def quad(self, u):
        """Hessian quadratic form ``<u, H u>`` evaluated from the structure."""
        u = np.asarray(u, dtype=float)
        out = np.sum(self.diag * u * u, axis=-1)
        if self.structure == "diagonal_plus_rank_one":
            out = out + np.asarray(self.scale) * np.sum(u, axis=-1) ** 2
        return out

    def dense(self):
        """Materialise ``C`` (single point only)."""
        d = self.diag.shape[-1]
        # rows of matvec(I) are the columns of C
        return self.matvec(np.eye(d)).T

    def hessian(self):
        """Materialise the Hessian (single point only)."""
        h = np.diag(self.diag)
        if self.structure == "diagonal_plus_rank_one":
            h = h + float(self.scale) * np.ones_like(h)
        return h


class MirrorMap(ABC):
    """Legendre-type mirror map on an open convex domain of R^d."""

    kind: str = ""

    def __init__(self, dimension: int):
        dimension = int(dimension)
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        self.dimension = dimension

    @property
    @abstractmethod
    def self_concordance(self) -> float:
        """Self-concordance constant ``M``."""

    @abstractmethod
    def in_domain(self, x) -> np.ndarray:
        """Boolean (batch) predicate for strict interiority."""

    @abstractmethod
    def _value(self, x): ...

    @abstractmethod
    def _grad(self, x): ...

    @abstractmethod
    def _hessian_factor(self, x) -> HessianFactor: ...

    @abstractmethod
    def dual_grad(self, y):
        """Inverse gradient map: the unique interior ``x`` with ``grad(x) == y``."""

    def center(self) -> np.ndarray:
        """A canonical interior point (used to initialise chains)."""
        return np.zeros(self.dimension)

    def check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise DomainError(
                f"expected points of dimension {self.dimension}, got shape {x.shape}"
            )
        if not np.all(self.in_domain(x)):
            raise DomainError(f"point outside the open domain of {self.kind}")
        return x

    def value(self, x):
        return self._value(self.check_domain(x))

    def grad(self, x):
        return self._grad(self.check_domain(x))

    def hessian_factor(self, x) -> HessianFactor:
        return self._hessian_factor(self.check_domain(x))

    def hessian_quad(self, x, u):
        """``<u, Hess(x) u>``."""
        return self.hessian_factor(x).quad(u)

    def diffuse_dual(self, w, h, xi):
        """Euler-Maruyama substeps of the dual diffusion ``dW = sqrt(2) C(grad*(W)) dB``.

        ``w`` has shape ``(m, d)``, ``xi`` holds one standard Gaussian draw
        per substep with shape ``(k, m, d)``.  The Hessian factor is taken at
        the current substep's primal point.
        """
        w = np.array(w, dtype=float, copy=True)
        root = np.sqrt(2.0 * h)
        for step in xi:
            x = self.dual_grad(w)
            w = w + root * self._hessian_factor(x).matvec(step)
        return w

    def bregman(self, x, y):
        x = self.check_domain(x)
        y = self.check_domain(y)
        return self._value(x) - self._value(y) - np.sum(self._grad(y) * (x - y), axis=-1)

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class Euclidean(MirrorMap):
    """``phi(x) = |x|^2 / 2``; recovers plain Langevin dynamics."""

    kind = "Euclidean"

    @property
    def self_concordance(self):
        return 0.0

    def in_domain(self, x):
        return np.all(np.isfinite(x), axis=-1)

    def _value(self, x):
        return 0.5 * np.sum(x * x, axis=-1)

    def _grad(self, x):
        return np.array(x, dtype=float, copy=True)

    def dual_grad(self, y):
        return np.array(y, dtype=float, copy=True)

    def _hessian_factor(self, x):
        return HessianFactor("identity", np.ones_like(x))


class BoxLogBarrier(MirrorMap):
    """Log barrier of the cube ``(-1, 1)^d``:
    ``phi(x) = -sum(log(1 - x) + log(1 + x))``."""

    kind = "BoxLogBarrier"

    @property
    def self_concordance(self):
        return 1.0

    def in_domain(self, x):
        return np.all(1.0 - np.abs(x) > BOUNDARY_MARGIN, axis=-1)

    def _value(self, x):
        return -np.sum(np.log1p(-x) + np.log1p(x), axis=-1)

    def _grad(self, x):
        return 1.0 / (1.0 - x) - 1.0 / (1.0 + x)

    def dual_grad(self, y):
        y = np.asarray(y, dtype=float)
        # (sqrt(1 + y^2) - 1) / y without cancellation near 0 or overflow for large y
        return y / (1.0 + np.hypot(1.0, y))

    def _hessian_factor(self, x):
        return HessianFactor("diagonal", 1.0 / (1.0 - x) ** 2 + 1.0 / (1.0 + x) ** 2)

    def diffuse_dual(self, w, h, xi):
        w = np.array(w, dtype=float, copy=True)
        return _kernels.box_dual_em(w, float(h), np.ascontiguousarray(xi, dtype=float))


class WeightedSimplexBarrier(MirrorMap):
    """Weighted barrier of the filled simplex ``{x > 0, sum(x) < 1}``.

    ``phi(x) = -a_0 log(1 - sum(x)) - sum_i a_i log(x_i)``, which is also the
    Dirichlet potential.  ``weights`` lists ``a_0`` (boundary weight) first.
    """

    kind = "WeightedSimplexBarrier"

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 1 or weights.size < 2:
            raise WeightError("need weights a_0, a_1, ..., a_d with d >= 1")
        if not np.all(weights > 0) or not np.all(np.isfinite(weights)):
            raise WeightError("all weights must be finite and strictly positive")
        super().__init__(weights.size - 1)
        self.weights = weights
        self._a0 = float(weights[0])
        self._a = weights[1:].copy()

    @property
    def self_concordance(self):
        return float(np.max(self.weights ** -0.5))

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        return np.all(x > BOUNDARY_MARGIN, axis=-1) & (1.0 - np.sum(x, axis=-1) > BOUNDARY_MARGIN)

    def center(self):
        return np.full(self.dimension, 1.0 / (self.dimension + 1))

    def _slack(self, x):
        return 1.0 - np.sum(x, axis=-1)

    def _value(self, x):
        return -self._a0 * np.log(self._slack(x)) - np.sum(self._a * np.log(x), axis=-1)

    def _grad(self, x):
        s = self._slack(x)[..., None]
        return -self._a / x + self._a0 / s

    def _hessian_factor(self, x):
        s = self._slack(x)
        return HessianFactor("diagonal_plus_rank_one", self._a / x ** 2, self._a0 / s ** 2)

    def dual_grad(self, y):
        y = np.asarray(y, dtype=float)
        c = _solve_simplex_scale(y, self._a, self._a0)
        return self._a / (c[..., None] - y)

    def diffuse_dual(self, w, h, xi):
        w = np.array(w, dtype=float, copy=True)
        w, ok = _kernels.simplex_dual_em(
            w, float(h), np.ascontiguousarray(xi, dtype=float), self._a, self._a0, DUAL_TOL, DUAL_MAX_ITER
        )
        if not ok:
            raise ConvergenceError("dual-gradient root find failed inside the diffusion step")
        return w

    def __repr__(self):
        return f"{type(self).__name__}(weights={self.weights.tolist()})"


class SimplexBarrier(WeightedSimplexBarrier):
    """Unit-weight barrier of the filled simplex:
    ``phi(x) = -sum(log x) - log(1 - sum(x))``."""

    kind = "SimplexBarrier"

    def __init__(self, dimension: int):
        super().__init__(np.ones(int(dimension) + 1))

    @property
    def self_concordance(self):
        return 1.0

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


def _solve_simplex_scale(y, a, a0, tol=DUAL_TOL, max_iter=DUAL_MAX_ITER):
    """Solve ``sum_i a_i / (c - y_i) + a0 / c = 1`` for ``c`` row-wise.

    The left side is strictly decreasing on ``(max(0, max y), inf)`` so the
    root is unique; see :func:`mirror_langevin._kernels.simplex_scale`.
    """
    y = np.asarray(y, dtype=float)
    batch = y.shape[:-1]
    c, ok = _kernels.simplex_scale(np.ascontiguousarray(y.reshape(-1, y.shape[-1])), a, a0, tol, max_iter)
    if not ok:
        raise ConvergenceError(
            f"dual-gradient root find did not reach tolerance {tol} in {max_iter} iterations"
        )
    return c.reshape(batch)


def make_mirror_map(kind: str, dimension: int | None = None, weights=None) -> MirrorMap:
    """Construct a map from a short name (``euclidean``, ``box``, ``simplex``, ``weighted_simplex``)."""
    key = kind.lower().replace("-", "_")
    if key in ("euclidean",):
        return Euclidean(dimension)
    if key in ("box", "boxlogbarrier", "box_log_barrier"):
        return BoxLogBarrier(dimension)
    if key in ("simplex", "simplexbarrier", "simplex_barrier"):
        return SimplexBarrier(dimension)
    if key in ("weighted_simplex", "weightedsimplexbarrier", "dirichlet"):
        return WeightedSimplexBarrier(weights)
    raise ValueError(f"unknown mirror map {kind!r}")


# Functional surface -------------------------------------------------------


def mirror_value(mirror_map: MirrorMap, x):
    return mirror_map.value(x)


def mirror_grad(mirror_map: MirrorMap, x):
    return mirror_map.grad(x)


def mirror_dual_grad(mirror_map: MirrorMap, y):
    return mirror_map.dual_grad(y)


def bregman_divergence(mirror_map: MirrorMap, x, y):
    """``D(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>``."""
    return mirror_map.bregman(x, y)


def hessian_factor(mirror_map: MirrorMap, x) -> HessianFactor:
    return mirror_map.hessian_factor(x)


def local_norm(mirror_map: MirrorMap, x, u):
    """``|u|_{Hess(x)}``."""
    return np.sqrt(mirror_map.hessian_quad(x, u))


def local_dual_norm(mirror_map: MirrorMap, x, u):
    """``|u|_{Hess(x)^{-1}}`` through one structured solve against the factor."""
    z = mirror_map.hessian_factor(x).solve(u)
    return np.sqrt(np.sum(z * z, axis=-1))


_FD_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_FD_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])


def third_derivative_fd(mirror_map: MirrorMap, x, u, fd_step: float) -> float:
    """Fourth-order central difference of ``t -> <u, Hess(x + t u) u>`` at 0."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    pts = x + fd_step * _FD_OFFSETS[:, None] * u
    q = mirror_map.hessian_quad(pts, np.broadcast_to(u, pts.shape))
    return float(np.dot(_FD_WEIGHTS, q) / fd_step)


def check_self_concordance(mirror_map: MirrorMap, x, u, fd_step: float = 1e-5) -> float:
    """Residual ``2 M |u|^3_{Hess(x)} - |D^3 phi(x)[u, u, u]|``.

    The third derivative is estimated by finite differences, so the residual
    is only meaningful up to :func:`self_concordance_tolerance`.  The
    stencil requires ``x +- 10 * fd_step * u`` to stay interior.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if not np.all(mirror_map.in_domain(np.stack([x - 10 * fd_step * u, x + 10 * fd_step * u]))):
        raise DomainError("finite-difference stencil leaves the domain")
    est = third_derivative_fd(mirror_map, x, u, fd_step)
    norm = float(np.sqrt(mirror_map.hessian_quad(x, u)))
    return 2.0 * mirror_map.self_concordance * norm ** 3 - abs(est)


def self_concordance_tolerance(mirror_map: MirrorMap, x, u, rel: float = 1e-4) -> float:
    """Acceptance tolerance for :func:`check_self_concordance`: ``rel`` times
    the scale ``max(1, 2 M |u|^3)`` of the two sides being compared."""
    norm = float(np.sqrt(mirror_map.hessian_quad(x, u)))
    return rel * max(1.0, 2.0 * mirror_map.self_concordance * norm ** 3)
