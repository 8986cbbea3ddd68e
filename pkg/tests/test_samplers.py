import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from mirror_langevin.exceptions import AlphaError, ConvergenceError, EmptyError
from mirror_langevin.harness.checks import interior_points
from mirror_langevin.mirror import BoxLogBarrier, Euclidean, SimplexBarrier, WeightedSimplexBarrier
from mirror_langevin.potentials import Potential, QuadraticPotential, ZeroPotential
from mirror_langevin.samplers import (
    ChainState, SamplerConfig, Trajectory, iterations_strong, iterations_weak, mla_diffusion_step,
    mla_half_step, mla_step, pla_step, project_box, project_simplex, projection_for, proximal_slack,
    run_chain, sample_from_mixture, step_size_strong, step_size_weak, ula_step,
)


class ConstantNoise:
    """Stand-in generator whose normals are all equal to ``value``."""

    def __init__(self, value):
        self.value = value

    def standard_normal(self, shape):
        return np.full(shape, float(self.value))


class Linear(Potential):
    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)
        super().__init__(self.c.size)

    def value(self, x):
        return np.asarray(x) @ self.c

    def grad(self, x):
        return np.broadcast_to(self.c, np.shape(x)).copy()


def quad(rng, d=3):
    b = rng.uniform(-1, 1, (d, d))
    a = b @ b.T
    return QuadraticPotential(a / np.abs(a).max())


# ---------------------------------------------------------------- half step


def test_half_step_euclidean_is_gradient_descent(rng):
    p = quad(rng)
    x = rng.normal(size=3)
    assert_allclose(mla_half_step(Euclidean(3), p, x, 0.1), x - 0.1 * p.grad(x), rtol=1e-15)


def test_half_step_zero_potential(rng):
    for m in (BoxLogBarrier(3), SimplexBarrier(3)):
        x = interior_points(m, rng, 1)[0]
        assert_allclose(mla_half_step(m, ZeroPotential(3), x, 0.3), x, rtol=1e-12)


def test_half_step_box_example():
    out = mla_half_step(BoxLogBarrier(1), Linear([1.0]), np.zeros(1), 1.0)
    assert out[0] == pytest.approx(1 - math.sqrt(2), rel=1e-15)
    assert 1 - math.sqrt(2) == pytest.approx(-0.414214, abs=1e-6)


@pytest.mark.parametrize("m", [BoxLogBarrier(3), SimplexBarrier(3), WeightedSimplexBarrier([2, 1, 3, 0.5])],
                         ids=lambda m: type(m).__name__)
def test_half_step_stationarity_and_proximal_inequality(m, rng):
    p = quad(rng)
    for x in interior_points(m, rng, 20):
        xp = mla_half_step(m, p, x, 0.2)
        assert m.in_domain(xp)
        assert np.max(np.abs(m.grad(xp) - m.grad(x) + 0.2 * p.grad(x))) <= 1e-8 * max(1, np.abs(m.grad(x)).max())
        y = interior_points(m, rng, 100)
        assert np.min(proximal_slack(m, p, x, y, 0.2)) >= -1e-8


def test_proximal_step_is_the_argmin(rng):
    # the half step minimises eta <g, z> + D(z, x); compare against random competitors
    m = SimplexBarrier(3)
    p = quad(rng)
    x = np.array([0.2, 0.3, 0.1])
    eta = 0.5
    xp = mla_half_step(m, p, x, eta)
    g = eta * p.grad(x)
    obj = lambda z: z @ g + m.bregman(z, x)  # noqa: E731
    z = interior_points(m, rng, 2000)
    assert np.all(z @ g + m.bregman(z, np.broadcast_to(x, z.shape)) >= obj(xp) - 1e-12)


# ---------------------------------------------------------------- diffusion


def test_diffusion_euclidean_single_substep(rng):
    x = rng.normal(size=3)
    out = mla_diffusion_step(Euclidean(3), x, 0.3, 1, np.random.default_rng(5))
    xi = np.random.default_rng(5).standard_normal((1, 3))[0]
    assert_allclose(out, x + math.sqrt(0.6) * xi, rtol=1e-15)


@pytest.mark.parametrize("m", [Euclidean(3), BoxLogBarrier(3), SimplexBarrier(3)], ids=lambda m: type(m).__name__)
def test_zero_noise_is_a_fixed_point(m, rng):
    x = interior_points(m, rng, 1)[0]
    assert_allclose(mla_diffusion_step(m, x, 0.5, 7, ConstantNoise(0.0)), x, rtol=1e-12, atol=1e-14)


def test_diffusion_box_example():
    out = mla_diffusion_step(BoxLogBarrier(1), np.zeros(1), 0.02, 1, ConstantNoise(1.0))
    w = 0.2 * math.sqrt(2)
    assert out[0] == pytest.approx((math.sqrt(1 + w * w) - 1) / w, rel=1e-14)
    assert out[0] == pytest.approx(0.138701, abs=1e-6)


def test_diffusion_consumes_inner_times_d_normals():
    g1, g2 = np.random.default_rng(1), np.random.default_rng(1)
    mla_diffusion_step(SimplexBarrier(4), np.full(4, 0.2), 0.1, 6, g1)
    g2.standard_normal(24)
    assert g1.standard_normal() == g2.standard_normal()


def test_noise_covariance_matches_hessian():
    n = 100_000
    h = 1e-3
    for m, x in ((BoxLogBarrier(3), np.array([0.5, -0.2, 0.8])),
                 (SimplexBarrier(3), np.array([0.2, 0.3, 0.1]))):
        w = np.tile(m.grad(x), (n, 1))
        xi = np.random.default_rng(0).standard_normal((1, n, 3))
        inc = m.diffuse_dual(w, h, xi) - w
        cov = inc.T @ inc / n
        expect = 2 * h * m.hessian_factor(x).hessian()
        mask = np.abs(expect) > 0
        assert np.max(np.abs(cov[mask] / expect[mask] - 1)) <= 0.05
        if np.any(~mask):
            assert np.max(np.abs(cov[~mask])) <= 0.05 * np.abs(expect).max()


# ---------------------------------------------------------------- full step


def test_mla_equals_ula_under_euclidean_map(rng):
    p = quad(rng)
    cfg = SamplerConfig(step_size=0.01, inner_steps=1, iterations=1000, seed=3)
    x0 = np.full(3, 0.25)
    a = run_chain(Euclidean(3), p, "mla", x0, cfg, noise=np.random.default_rng(9))
    b = run_chain(Euclidean(3), p, "ula", x0, cfg, noise=np.random.default_rng(9))
    assert np.max(np.abs(a.states - b.states)) <= 1e-12


def test_mla_step_zero_potential_is_pure_diffusion(rng):
    m = SimplexBarrier(3)
    x = np.array([0.2, 0.3, 0.1])
    cfg = SamplerConfig(0.05, inner_steps=4)
    s = mla_step(m, ZeroPotential(3), ChainState.start(m, x), cfg, np.random.default_rng(2))
    d = mla_diffusion_step(m, x, 0.05, 4, np.random.default_rng(2))
    assert_allclose(s.primal, d, rtol=1e-12)
    assert s.step_index == 1
    assert_allclose(s.dual, m.grad(s.primal), rtol=1e-9, atol=1e-9)


def test_zero_step_identity():
    m = BoxLogBarrier(2)
    cfg = SamplerConfig(0.1)
    object.__setattr__(cfg, "step_size", 0.0)  # bypass validation on purpose
    st0 = ChainState.start(m, np.array([0.3, -0.6]))
    st1 = mla_step(m, QuadraticPotential(np.eye(2)), st0, cfg, np.random.default_rng(0))
    assert_array_equal(st1.primal, st0.primal)
    assert st1.step_index == 1
    assert_array_equal(mla_half_step(m, Linear([1.0, 1.0]), st0.primal, 0.0), st0.primal)


def test_sampler_config_validation():
    for bad in (dict(step_size=0.0), dict(step_size=-1.0), dict(step_size=math.inf),
                dict(step_size=0.1, inner_steps=0), dict(step_size=0.1, iterations=-1),
                dict(step_size=0.1, seed=2 ** 64)):
        with pytest.raises(ValueError):
            SamplerConfig(**bad)


# ---------------------------------------------------------------- baselines


def test_ula_examples():
    assert_array_equal(ula_step(ZeroPotential(2), np.array([0.3, 0.4]), 0.1, ConstantNoise(0.0)), [0.3, 0.4])
    out = ula_step(QuadraticPotential(np.eye(2)), np.array([1.0, 0.0]), 0.5, ConstantNoise(0.0))
    assert_allclose(out, [0.5, 0.0])


def test_ula_variance():
    n = 100_000
    x = np.zeros((n, 2))
    inc = ula_step(ZeroPotential(2), x, 0.05, np.random.default_rng(0)) - x
    assert np.all(np.abs(inc.var(axis=0, ddof=1) / 0.1 - 1) <= 0.05)


def test_projection_examples():
    assert_array_equal(project_box(np.array([0.2, -0.9])), [0.2, -0.9])
    assert_array_equal(project_box(np.array([2.0, -3.0])), [1.0, -1.0])
    assert_allclose(project_simplex(np.array([0.2, 0.3])), [0.2, 0.3])
    assert_allclose(project_simplex(np.array([-0.5, 0.3])), [0.0, 0.3])
    assert_allclose(project_simplex(np.array([0.8, 0.8])), [0.5, 0.5], rtol=1e-15)


def test_pla_examples():
    x = np.array([0.1, 0.2])
    assert_allclose(pla_step(ZeroPotential(2), "simplex", x, 0.01, ConstantNoise(0.0)), x)
    assert_allclose(pla_step(ZeroPotential(2), project_box, np.array([1.5, -0.2]), 1e-9, ConstantNoise(0.0)),
                    [1.0, -0.2], atol=1e-12)
    out = pla_step(ZeroPotential(3), "simplex", np.full(3, 0.3), 1.0, np.random.default_rng(0))
    assert np.all(out >= 0) and out.sum() <= 1 + 1e-12
    assert projection_for(BoxLogBarrier(2)) is project_box
    assert projection_for(SimplexBarrier(2)) is project_simplex


vec = st.lists(st.floats(-5, 5), min_size=1, max_size=6).map(np.array)


@given(vec)
def test_box_projection_idempotent(x):
    p = project_box(x)
    assert_array_equal(project_box(p), p)
    assert np.all(np.abs(p) <= 1)


@given(vec)
def test_simplex_projection_is_euclidean_projection(x):
    p = project_simplex(x)
    assert np.all(p >= 0) and p.sum() <= 1 + 1e-12
    assert_allclose(project_simplex(p), p, atol=1e-12)
    # variational inequality <x - p, z - p> <= 0 at the vertices of the filled simplex
    d = x.size
    verts = np.vstack([np.zeros(d), np.eye(d)])
    assert np.all((verts - p) @ (x - p) <= 1e-9)


def test_simplex_projection_batched():
    x = np.array([[0.8, 0.8], [0.1, 0.2], [-1.0, 3.0]])
    assert_allclose(project_simplex(x), [[0.5, 0.5], [0.1, 0.2], [0.0, 1.0]], atol=1e-15)


# ---------------------------------------------------------------- step sizes


def test_step_size_examples():
    assert step_size_weak(0.1, 3, 10) == pytest.approx(1 / 600, rel=1e-15)
    assert step_size_weak(1e6, 2, 1) == 0.5
    assert step_size_weak(0.1, 3, 20) == pytest.approx(step_size_weak(0.1, 3, 10) / 2)
    assert iterations_weak(1, 1, 1, 1) == 4
    assert iterations_weak(1, 1, 1, 0) == 0
    assert iterations_weak(0.05, 1, 1, 1) == 4 * iterations_weak(0.1, 1, 1, 1)
    assert step_size_strong(0.1, 1, 1, 1) == pytest.approx(0.05)
    assert iterations_strong(0.1, 1, 1, 1, 0.05) == 0
    assert iterations_strong(1, 1, 2, 2, math.e) >= 1


def test_strong_requires_alpha():
    with pytest.raises(AlphaError):
        step_size_strong(0.1, 0.0, 1, 1)
    with pytest.raises(AlphaError):
        iterations_strong(0.1, -1.0, 1, 1, 1)


@given(st.floats(1e-3, 10), st.floats(0.1, 10), st.floats(0.1, 50), st.integers(1, 100), st.floats(0.01, 100))
def test_step_size_formulas(eps, alpha, bp, d, cost):
    assert step_size_weak(eps, bp, d) == min(eps / (2 * bp * d), 1 / bp)
    assert step_size_strong(eps, alpha, bp, d) == min(alpha * eps / (2 * bp * d), 1 / bp)
    nw = 4 * bp * d * cost / eps ** 2 * max(1, eps / (2 * d))
    assert iterations_weak(eps, bp, d, cost) == math.ceil(nw)
    if cost > eps / 2:
        ns = 2 * bp * d / (alpha ** 2 * eps) * math.log(2 * cost / eps) * max(1, alpha * eps / (2 * d))
        assert iterations_strong(eps, alpha, bp, d, cost) == math.ceil(ns)
    else:
        assert iterations_strong(eps, alpha, bp, d, cost) == 0


# ---------------------------------------------------------------- chains


def test_run_chain_zero_iterations():
    traj = run_chain(BoxLogBarrier(2), ZeroPotential(2), "mla", np.zeros(2), SamplerConfig(0.1, iterations=0))
    assert traj.states.shape == (1, 2)
    assert traj.n_iterations == 0


@pytest.mark.parametrize("sampler", ["mla", "ula", "pla"])
def test_run_chain_deterministic(sampler):
    cfg = SamplerConfig(0.01, inner_steps=3, iterations=50, seed=11)
    a = run_chain(SimplexBarrier(3), ZeroPotential(3), sampler, np.full(3, 0.25), cfg)
    b = run_chain(SimplexBarrier(3), ZeroPotential(3), sampler, np.full(3, 0.25), cfg)
    assert_array_equal(a.states, b.states)
    assert a.states.shape == (51, 3)


def test_box_confinement_long_run():
    cfg = SamplerConfig(0.01, inner_steps=10, iterations=10_000, seed=0)
    traj = run_chain(BoxLogBarrier(3), ZeroPotential(3), "mla", np.zeros(3), cfg)
    assert np.all(np.abs(traj.states) < 1)


def test_batched_chains_match_individual_runs():
    m = SimplexBarrier(3)
    cfg = SamplerConfig(0.02, inner_steps=5, iterations=20)
    seeds = [4, 5, 6]
    batch = run_chain(m, ZeroPotential(3), "mla", np.tile(m.center(), (3, 1)), cfg,
                      noise=[np.random.default_rng(s) for s in seeds])
    for j, s in enumerate(seeds):
        one = run_chain(m, ZeroPotential(3), "mla", m.center(), cfg, noise=np.random.default_rng(s))
        assert_allclose(batch.states[:, j], one.states, rtol=1e-13)
    # reversing the chain order does not change any chain
    rev = run_chain(m, ZeroPotential(3), "mla", np.tile(m.center(), (3, 1)), cfg,
                    noise=[np.random.default_rng(s) for s in seeds[::-1]])
    assert_array_equal(rev.states[:, ::-1], batch.states)


def test_step_error_reports_index():
    class Fails(Potential):
        calls = 0

        def grad(self, x):
            Fails.calls += 1
            if Fails.calls == 3:
                raise ConvergenceError("boom")
            return np.zeros(np.shape(x))

    with pytest.raises(ConvergenceError, match="step 3") as info:
        run_chain(BoxLogBarrier(2), Fails(2), "mla", np.zeros(2), SamplerConfig(0.1, iterations=5))
    assert info.value.step_index == 3


def test_unknown_sampler():
    with pytest.raises(ValueError):
        run_chain(BoxLogBarrier(1), ZeroPotential(1), "hmc", np.zeros(1), SamplerConfig(0.1))


# ---------------------------------------------------------------- mixture


def test_mixture_single_iterate():
    traj = Trajectory(np.array([[0.0], [1.0]]))
    assert all(sample_from_mixture(traj, np.random.default_rng(s))[0] == 1.0 for s in range(20))


def test_mixture_empty():
    with pytest.raises(EmptyError):
        sample_from_mixture(Trajectory(np.zeros((1, 2))), np.random.default_rng(0))


def test_mixture_frequencies():
    n_iter = 5
    traj = Trajectory(np.arange(n_iter + 1, dtype=float)[:, None])
    g = np.random.default_rng(0)
    draws = np.array([sample_from_mixture(traj, g)[0] for _ in range(100_000)]).astype(int)
    assert draws.min() >= 1
    freq = np.bincount(draws, minlength=n_iter + 1)[1:] / draws.size
    sigma = math.sqrt((1 / n_iter) * (1 - 1 / n_iter) / draws.size)
    assert np.all(np.abs(freq - 1 / n_iter) <= 3 * sigma)
