import numpy as np
import pytest

from hilbert.errors import ArgumentError, ConfigError
from hilbert.groups import DirichletReducer, enumerate_primitive_geodesics
from hilbert.measures import FlowSample, patterson_sullivan, sample_flow
from hilbert.mixing import (
    BallIndicator,
    ConstantFunction,
    MixingEstimator,
    closed_orbit_average,
    closed_orbit_integral,
    parse_observable,
    reduce_points,
)


@pytest.fixture(scope="module")
def triangle_flow(triangle):
    reducer = DirichletReducer(triangle)
    mu = patterson_sullivan(triangle, s=1.2, R=5.0, delta_hat=1.0)
    return reducer, sample_flow(mu, 1.0, reducer, 2000, seed=11)


def test_parse_observable(disk):
    center = np.zeros(2)
    assert isinstance(parse_observable("one", disk, center), ConstantFunction)
    assert parse_observable("const 2.5", disk, center).value == 2.5
    ball = parse_observable("ball 0.5 0.1 0.0", disk, center)
    assert isinstance(ball, BallIndicator)
    np.testing.assert_allclose(ball.center, [0.1, 0.0])
    with pytest.raises(ConfigError):
        parse_observable("gaussian 1", disk, center)
    with pytest.raises(ConfigError):
        parse_observable("ball wide", disk, center)
    with pytest.raises(ConfigError):
        parse_observable("", disk, center)


def test_ball_indicator(disk):
    f = BallIndicator(disk, np.zeros(2), 0.5)
    np.testing.assert_array_equal(f(np.array([[0.1, 0.0], [0.9, 0.0]])), [1.0, 0.0])
    with pytest.raises(ArgumentError):
        BallIndicator(disk, np.zeros(2), 0.0)


def test_reduce_points_lands_in_dirichlet_domain(triangle, rng):
    reducer = DirichletReducer(triangle)
    from tests.helpers import random_interior

    reduced = reduce_points(reducer, random_interior(rng, 50, max_radius=0.95))
    assert np.all(reducer.is_reduced_many(reduced))


def test_constant_observables_decorrelate_exactly(triangle_flow):
    reducer, sample = triangle_flow
    estimator = MixingEstimator(sample, reducer, bootstrap=20)
    one = ConstantFunction(1.0)
    estimate = estimator.correlation(one, one, 2.0)
    assert estimate.correlation == pytest.approx(1.0)
    assert estimate.difference == pytest.approx(0.0, abs=1e-12)
    assert estimator.mean(ConstantFunction(3.0)) == pytest.approx(3.0)


def test_correlation_at_time_zero_is_mean_of_square(triangle_flow):
    reducer, sample = triangle_flow
    estimator = MixingEstimator(sample, reducer, bootstrap=0)
    f = BallIndicator(triangle_flow[0].domain, reducer.basepoint, 0.3)
    estimate = estimator.correlation(f, f, 0.0)
    assert estimate.correlation == pytest.approx(estimator.mean(f))
    assert np.isnan(estimate.stderr)


def test_estimator_needs_live_samples(triangle_flow):
    reducer, _ = triangle_flow
    empty = FlowSample(np.zeros((2, 2)), np.ones((2, 2)), np.zeros(2), np.zeros(2), 1.0)
    with pytest.raises(ArgumentError):
        MixingEstimator(empty, reducer)


def test_closed_orbit_average_of_constant(triangle):
    reducer = DirichletReducer(triangle)
    geodesics = enumerate_primitive_geodesics(triangle, 2.5, reducer=reducer)
    assert geodesics
    one = ConstantFunction(1.0)
    assert closed_orbit_average(triangle.domain, geodesics[0], one, reducer) == pytest.approx(1.0)
    total = closed_orbit_integral(triangle.domain, geodesics, one, reducer, 1.0, 2.5)
    assert total == pytest.approx(2.5 * np.exp(-2.5) * len(geodesics))
    assert closed_orbit_integral(triangle.domain, geodesics, one, reducer, 1.0, 0.01) is None
