"""
Property suites behind ``check --suite``.

Each suite returns a list of :class:`CheckResult`; a suite passes when every
entry does.  The suites are randomised but seeded, so a failure reproduces.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..mirror import (BoxLogBarrier, Euclidean, MirrorMap, SimplexBarrier, WeightedSimplexBarrier,
                      check_self_concordance, self_concordance_tolerance)
from ..oracle import (RejectionSpec, rejection_sample, sample_dirichlet_gamma,
                      sample_uniform_box)
from ..potentials import QuadraticPotential, ZeroPotential
from ..samplers import SamplerConfig, run_chain, proximal_slack
from ..transport import bregman_costs, min_cost_assignment


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e} (threshold {self.threshold:.1e})"


def interior_points(mirror_map: MirrorMap, rng, n: int) -> np.ndarray:
    """Random interior points spread over the whole domain."""
    d = mirror_map.dimension
    if isinstance(mirror_map, BoxLogBarrier):
        return 0.999 * sample_uniform_box(d, rng, n)
    if isinstance(mirror_map, WeightedSimplexBarrier):
        # uniform on the filled simplex, kept off the faces
        x = sample_dirichlet_gamma(np.zeros(d + 1), rng, size=n, _allow_zero=True)
        return 1e-3 / (d + 1) + (1 - 1e-3) * x
    return rng.normal(scale=3.0, size=(n, d))


def standard_maps(d: int = 3) -> list[MirrorMap]:
    w = np.linspace(0.5, 3.0, d + 1)
    return [Euclidean(d), BoxLogBarrier(d), SimplexBarrier(d), WeightedSimplexBarrier(w)]


def geometry_suite(seed: int = 0, n_points: int = 1000, n_sc: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for m in standard_maps():
        name = type(m).__name__
        x = interior_points(m, rng, n_points)
        err = float(np.max(np.abs(m.dual_grad(m.grad(x)) - x)))
        out.append(CheckResult(f"{name} round trip", err <= 1e-9, err, 1e-9))

        y = interior_points(m, rng, n_points)
        low = float(min(np.min(m.bregman(x, y)), 0.0))
        self_d = float(np.max(np.abs(m.bregman(x, x))))
        out.append(CheckResult(f"{name} Bregman nonnegativity", low >= -1e-12, -low, 1e-12))
        out.append(CheckResult(f"{name} Bregman D(x, x)", self_d <= 1e-12, self_d, 1e-12))

        u = rng.normal(size=x.shape)
        f = m.hessian_factor(x)
        ct_u = f.rmatvec(u)
        lhs = np.sum(ct_u * ct_u, axis=-1)
        rhs = f.quad(u)
        rel = float(np.max(np.abs(lhs - rhs) / rhs))
        out.append(CheckResult(f"{name} factor C C^T", rel <= 1e-10, rel, 1e-10))

        if m.self_concordance > 0:
            worst = math.inf
            xs = interior_points(m, rng, 4 * n_sc)
            done = 0
            for xi in xs:
                ui = rng.normal(size=m.dimension)
                ui /= np.linalg.norm(ui)
                try:
                    r = check_self_concordance(m, xi, ui)
                except ValueError:
                    continue  # stencil too close to the boundary; draw again
                # residual relative to the size of the two sides being compared
                worst = min(worst, r * 1e-4 / self_concordance_tolerance(m, xi, ui))
                done += 1
                if done == n_sc:
                    break
            out.append(CheckResult(f"{name} self-concordance", worst >= -1e-4 and done == n_sc,
                                   worst, -1e-4))
    return out


def samplers_suite(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    d = 3
    b = rng.uniform(-1, 1, (d, d))
    a = b @ b.T
    quad = QuadraticPotential(a / np.abs(a).max())

    # Euclidean reduction
    cfg = SamplerConfig(step_size=0.01, inner_steps=1, iterations=1000, seed=seed)
    x0 = np.full(d, 0.2)
    mla = run_chain(Euclidean(d), quad, "mla", x0, cfg, noise=np.random.default_rng(seed))
    ula = run_chain(Euclidean(d), quad, "ula", x0, cfg, noise=np.random.default_rng(seed))
    err = float(np.max(np.abs(mla.states - ula.states)))
    out.append(CheckResult("MLA == ULA under the Euclidean map", err <= 1e-12, err, 1e-12))

    # Bregman proximal inequality at the half step
    m = SimplexBarrier(d)
    x = interior_points(m, rng, 100)
    y = interior_points(m, rng, 100)
    slack = float(np.min(proximal_slack(m, quad, x, y, 0.3)))
    out.append(CheckResult("half-step proximal inequality", slack >= -1e-8, slack, -1e-8))

    # confinement on a short run
    for mm in (BoxLogBarrier(d), SimplexBarrier(d)):
        traj = run_chain(mm, ZeroPotential(d), "mla", mm.center(),
                         SamplerConfig(0.01, inner_steps=10, iterations=2000, seed=seed))
        inside = bool(np.all(mm.in_domain(traj.states)))
        out.append(CheckResult(f"{type(mm).__name__} confinement", inside, float(inside), 1.0))
    return out


def transport_suite(seed: int = 0, n_instances: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    perms = np.array(list(itertools.permutations(range(6))))
    worst = 0.0
    for _ in range(n_instances):
        c = rng.uniform(size=(6, 6))
        brute = c[np.arange(6), perms].sum(axis=1).min()
        worst = max(worst, abs(min_cost_assignment(c)[1] - brute))
    out = [CheckResult("6x6 assignment vs brute force", worst <= 1e-12, worst, 1e-12)]

    box = BoxLogBarrier(1)
    worst = 0.0
    for m in range(1, 9):
        for _ in range(5):
            a = rng.uniform(-0.95, 0.95, m)
            b = rng.uniform(-0.95, 0.95, m)
            cost = bregman_costs(box, a[:, None], b[:, None])
            perm = np.empty(m, dtype=int)
            perm[np.argsort(a)] = np.argsort(b)
            sorted_cost = cost[np.arange(m), perm].sum()
            brute = min(cost[np.arange(m), list(p)].sum() for p in itertools.permutations(range(m)))
            worst = max(worst, sorted_cost - brute)
    out.append(CheckResult("1-D Bregman matching is sorted", worst <= 1e-12, worst, 1e-12))
    return out


def oracle_suite(seed: int = 0, n: int = 100_000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    a = np.array([2.0, 1.0, 3.0, 0.5])
    x = sample_dirichlet_gamma(a, rng, size=n)
    alpha = a + 1
    tot = alpha.sum()
    mean = alpha[1:] / tot
    var = mean * (1 - mean) / (tot + 1)
    z = float(np.max(np.abs(x.mean(axis=0) - mean) / np.sqrt(var / n)))
    out.append(CheckResult("Dirichlet means (z-score)", z <= 3.0, z, 3.0))

    u = sample_uniform_box(2, rng, n)
    z = float(np.max(np.abs(stats.skew(u, axis=0)) / math.sqrt(6.0 / n)))
    out.append(CheckResult("uniform box skewness (z-score)", z <= 3.0, z, 3.0))

    # 1-D rejection target exp(-x^2/2) on [0, 1]
    spec = RejectionSpec(QuadraticPotential(np.eye(1)), np.zeros(1), np.ones(1))
    s = rejection_sample(spec, rng, size=10_000)[:, 0]
    grid = np.linspace(0, 1, 4001)
    dens = np.exp(-grid ** 2 / 2)
    cdf_vals = np.concatenate([[0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(grid))])
    cdf_vals /= cdf_vals[-1]
    ks = stats.kstest(s, lambda t: np.interp(t, grid, cdf_vals)).statistic
    crit = 1.63 / math.sqrt(s.size)
    out.append(CheckResult("1-D rejection KS statistic", ks <= crit, float(ks), crit))
    return out


SUITES = {
    "geometry": geometry_suite,
    "samplers": samplers_suite,
    "transport": transport_suite,
    "oracle": oracle_suite,
}


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    return SUITES[name](seed=seed)
