import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import random_stable_model

from dirvar.covest import sample_covariances
from dirvar.errors import SeriesTooShort
from dirvar.linalg import min_ldl_pivot
from dirvar.varproc import TimeSeries, VarModel, lag1_autocov, simulate, stationary_covariance


def loop_covariances(x, p):
    """Explicit double loop over stacked vectors."""
    t_len, d = x.shape
    stacked = [np.concatenate([x[t + p - 1 - k] for k in range(p)]) for t in range(t_len - p + 1)]
    n = len(stacked)
    s = sum(np.outer(v, v) for v in stacked) / n
    s1 = sum(np.outer(stacked[t], stacked[t + 1]) for t in range(n - 1)) / (n - 1)
    return s, s1


def test_two_point_example():
    cov = sample_covariances(TimeSeries(np.array([[1.0, 0.0], [0.0, 1.0]])), 1)
    np.testing.assert_array_equal(cov.s, 0.5 * np.eye(2))
    np.testing.assert_array_equal(cov.s1, [[0.0, 1.0], [0.0, 0.0]])
    assert (cov.n_marginal, cov.n_lag) == (2, 1)


def test_zero_series():
    cov = sample_covariances(np.zeros((10, 3)), 2)
    assert cov.s.shape == (6, 6)
    assert not cov.s.any() and not cov.s1.any()


def test_too_short():
    with pytest.raises(SeriesTooShort):
        sample_covariances(np.zeros((2, 3)), 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(
    lambda p: st.tuples(st.just(p), arrays(float, st.tuples(st.integers(p + 1, 12), st.integers(1, 4)),
                                           elements=st.floats(-5, 5)))))
def test_matches_loop_oracle(case):
    p, x = case
    cov = sample_covariances(x, p)
    s, s1 = loop_covariances(x, p)
    np.testing.assert_allclose(cov.s, s, atol=1e-12)
    np.testing.assert_allclose(cov.s1, s1, atol=1e-12)
    assert np.array_equal(cov.s, cov.s.T)
    assert cov.n_lag == cov.n_marginal - 1 == x.shape[0] - p
    assert min_ldl_pivot(cov.s + 1e-9 * np.eye(cov.s.shape[0])) >= -1e-10


@settings(max_examples=30, deadline=None)
@given(arrays(float, (8, 3), elements=st.floats(-3, 3)), st.floats(0.1, 10))
def test_scaling_equivariance(x, c):
    a = sample_covariances(x, 2)
    b = sample_covariances(c * x, 2)
    np.testing.assert_allclose(b.s, c**2 * a.s, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(b.s1, c**2 * a.s1, rtol=1e-12, atol=1e-12)


def test_long_simulation_matches_population():
    model = random_stable_model(np.random.default_rng(0), 4, 1, radius=0.6)
    x = simulate(model, 200_000, seed=1)
    cov = sample_covariances(x, 1)
    sigma = stationary_covariance(model)
    assert np.max(np.abs(cov.s - sigma)) < 0.05
    assert np.max(np.abs(cov.s1 - lag1_autocov(sigma, model.transitions[0]))) < 0.05


def test_white_noise_lag1_near_zero():
    x = simulate(VarModel((np.zeros((2, 2)),), np.eye(2)), 50_000, seed=3)
    assert np.max(np.abs(sample_covariances(x, 1).s1)) < 0.03
