import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mirror_langevin import BayesianLogisticRegressionMLA, MirrorLangevinSampler
from mirror_langevin.harness.data import generate_logistic_data
from mirror_langevin.mirror import SimplexBarrier
from mirror_langevin.potentials import QuadraticPotential


def test_sampler_fit_and_transform():
    X = np.full((6, 3), 0.2)
    est = MirrorLangevinSampler(mirror="simplex", iterations=20, seed=1).fit(X)
    assert est.samples_.shape == (6, 3)
    assert est.trajectory_.states.shape == (21, 6, 3)
    assert np.all(est.samples_ > 0) and np.all(est.samples_.sum(axis=1) < 1)
    assert_array_equal(est.transform(X), est.samples_)  # same seed, same starts
    assert est.sample_mixture(5, random_state=0).shape == (5, 3)


def test_sampler_accepts_instances_and_checks_shapes():
    m = SimplexBarrier(2)
    est = MirrorLangevinSampler(mirror=m, potential=QuadraticPotential(np.eye(2)), iterations=3)
    est.fit([[0.3, 0.3]])
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        MirrorLangevinSampler(mirror=m).fit(np.zeros((1, 3)))
    with pytest.raises(TypeError):
        MirrorLangevinSampler(potential="quadratic").fit(np.zeros((1, 2)))


def test_sampler_not_fitted():
    with pytest.raises(NotFittedError):
        MirrorLangevinSampler().transform(np.zeros((1, 2)))


def test_get_params_and_clone():
    est = BayesianLogisticRegressionMLA(step_size=0.01, n_chains=5)
    params = est.get_params()
    assert params["step_size"] == 0.01 and params["n_chains"] == 5
    c = clone(est)
    assert c.get_params() == params and c is not est
    assert MirrorLangevinSampler(sampler="pla").get_params()["sampler"] == "pla"


def test_logistic_classifier():
    ds = generate_logistic_data(3, 500, np.full(3, 0.9), np.random.default_rng(0))
    y = np.where(ds.labels > 0, "pos", "neg")
    est = BayesianLogisticRegressionMLA(iterations=60, n_chains=8, burn_in=20).fit(ds.features, y)
    assert_array_equal(est.classes_, ["neg", "pos"])
    assert est.coef_.shape == (3,) and np.all(np.abs(est.coef_) < 1)
    assert est.samples_.shape == (40 * 8, 3)
    proba = est.predict_proba(ds.features)
    assert_allclose(proba.sum(axis=1), 1.0)
    assert set(est.predict(ds.features)) <= {"neg", "pos"}
    assert est.decision_function(ds.features).shape == (500,)
    assert 0.0 <= est.score(ds.features, y) <= 1.0


def test_logistic_classifier_errors():
    X = np.zeros((4, 2))
    with pytest.raises(ValueError):
        BayesianLogisticRegressionMLA().fit(X, [1, 1, 1, 1])
    with pytest.raises(ValueError):
        BayesianLogisticRegressionMLA(burn_in=10, iterations=10).fit(X, [0, 1, 0, 1])
    with pytest.raises(NotFittedError):
        BayesianLogisticRegressionMLA().predict(X)
