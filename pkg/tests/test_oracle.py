import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, stats

from mirror_langevin.exceptions import BudgetError, WeightError
from mirror_langevin.oracle import (
    RejectionSpec, filled_simplex, rejection_sample, sample_dirichlet_gamma, sample_uniform_box,
    sample_uniform_l1_ball,
)
from mirror_langevin.potentials import QuadraticPotential, ZeroPotential


def test_dirichlet_zero_weights_is_uniform(rng):
    x = sample_dirichlet_gamma([0.0, 0.0], rng, size=20_000, _allow_zero=True)[:, 0]
    assert stats.kstest(x, "uniform").pvalue > 0.01


def test_dirichlet_default_setting_mean(rng):
    x = sample_dirichlet_gamma([2.0] * 11, rng, size=1_000_000)
    se = math.sqrt((1 / 11) * (10 / 11) / 34 / x.shape[0])
    assert np.all(np.abs(x.mean(axis=0) - 1 / 11) <= 3 * se)
    assert 3 / 33 == pytest.approx(0.090909, abs=1e-6)


def test_dirichlet_moments_asymmetric(rng):
    a = np.array([0.5, 2.0, 1.0, 4.0])
    x = sample_dirichlet_gamma(a, rng, size=100_000)
    alpha = a + 1
    tot = alpha.sum()
    mean = alpha[1:] / tot
    var = mean * (1 - mean) / (tot + 1)
    n = x.shape[0]
    assert np.all(np.abs(x.mean(axis=0) - mean) <= 3 * np.sqrt(var / n))
    # standard error of the sample variance via the fourth central moment
    centred = x - x.mean(axis=0)
    m4 = np.mean(centred ** 4, axis=0)
    se_var = np.sqrt((m4 - var ** 2) / n)
    assert np.all(np.abs(x.var(axis=0, ddof=1) - var) <= 3 * se_var)


def test_dirichlet_support_and_shapes(rng):
    x = sample_dirichlet_gamma([0.1, 0.1, 0.1], rng, size=10_000)
    assert np.all(filled_simplex(x))
    assert sample_dirichlet_gamma([1.0, 1.0, 1.0], rng).shape == (2,)


def test_dirichlet_weight_errors(rng):
    for bad in ([1.0, 0.0], [1.0, -2.0], [1.0], [[1.0, 1.0]]):
        with pytest.raises(WeightError):
            sample_dirichlet_gamma(bad, rng)


def test_uniform_box_moments(rng):
    n = 100_000
    u = sample_uniform_box(3, rng, n)
    assert np.all(np.abs(u) <= 1)
    assert np.all(np.abs(u.mean(axis=0)) <= 3 * math.sqrt(1 / 3 / n))
    # Var(U^2) = E U^4 - (E U^2)^2 = 1/5 - 1/9
    assert np.all(np.abs(u.var(axis=0) - 1 / 3) <= 3 * math.sqrt((1 / 5 - 1 / 9) / n))
    assert np.all(np.abs(stats.skew(u, axis=0)) <= 3 * math.sqrt(6 / n))


def test_l1_ball(rng):
    x = sample_uniform_l1_ball(4, rng, 50_000)
    assert np.all(np.sum(np.abs(x), axis=1) <= 1)
    # |x|_1 of a uniform point in the d-dim l1 ball has law Beta(d, 1)
    assert stats.kstest(np.sum(np.abs(x), axis=1), stats.beta(4, 1).cdf).pvalue > 0.01
    one = sample_uniform_l1_ball(1, rng, 100_000)[:, 0]
    assert abs(one.mean()) <= 3 * math.sqrt(1 / 3 / one.size)
    assert stats.kstest(one, stats.uniform(-1, 2).cdf).pvalue > 0.01
    assert sample_uniform_l1_ball(3, rng).shape == (3,)


def test_rejection_uniform_box(rng):
    spec = RejectionSpec(ZeroPotential(2), -np.ones(2), np.ones(2))
    x, info = rejection_sample(spec, rng, size=5000, return_stats=True)
    assert info["acceptance_rate"] == 1.0
    assert np.all(np.abs(x) <= 1)


def quad_simplex_spec():
    return RejectionSpec(QuadraticPotential(np.eye(2)), np.zeros(2), np.ones(2), feasible=filled_simplex)


def test_rejection_simplex_mean_matches_quadrature(rng):
    # density exp(-|x|^2/2) on the filled 2-simplex
    z = integrate.dblquad(lambda y, x: math.exp(-(x * x + y * y) / 2), 0, 1, 0, lambda x: 1 - x)[0]
    mx = integrate.dblquad(lambda y, x: x * math.exp(-(x * x + y * y) / 2), 0, 1, 0, lambda x: 1 - x)[0] / z
    s = rejection_sample(quad_simplex_spec(), rng, size=200_000)
    assert np.all(filled_simplex(s))
    se = s.std(axis=0) / math.sqrt(s.shape[0])
    assert np.all(np.abs(s.mean(axis=0) - mx) <= 3 * se)


def test_rejection_acceptance_rate(rng):
    z = integrate.dblquad(lambda y, x: math.exp(-(x * x + y * y) / 2), 0, 1, 0, lambda x: 1 - x)[0]
    expected = z / (1.0 * 1.0)  # envelope 1, box volume 1
    _, info = rejection_sample(quad_simplex_spec(), rng, size=50_000, return_stats=True)
    n = info["proposals"]
    assert abs(info["acceptance_rate"] - expected) <= 3 * math.sqrt(expected * (1 - expected) / n)


def test_rejection_one_dimensional_ks(rng):
    spec = RejectionSpec(QuadraticPotential(np.array([[4.0]])), np.array([-1.0]), np.array([1.0]))
    s = rejection_sample(spec, rng, size=10_000)[:, 0]
    norm = stats.norm(scale=0.5)
    cdf = lambda t: (norm.cdf(t) - norm.cdf(-1)) / (norm.cdf(1) - norm.cdf(-1))  # noqa: E731
    assert stats.kstest(s, cdf).statistic <= 1.63 / math.sqrt(s.size)


def test_rejection_envelope_check():
    with pytest.raises(ValueError):
        RejectionSpec(QuadraticPotential(np.eye(1)), np.array([-1.0]), np.array([1.0]), envelope=0.5)
    with pytest.raises(ValueError):
        RejectionSpec(ZeroPotential(1), np.array([1.0]), np.array([0.0]))


def test_rejection_budget(rng):
    spec = RejectionSpec(ZeroPotential(2), np.zeros(2), np.ones(2), feasible=lambda x: np.zeros(len(x), bool))
    with pytest.raises(BudgetError):
        rejection_sample(spec, rng, budget=10_000)


def test_rejection_reproducible():
    spec = quad_simplex_spec()
    a = rejection_sample(spec, np.random.default_rng(3), size=100)
    b = rejection_sample(spec, np.random.default_rng(3), size=100)
    assert_allclose(a, b, rtol=0)
