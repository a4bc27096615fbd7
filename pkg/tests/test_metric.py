import math

import numpy as np
import pytest

from hilbert.errors import ArgumentError, DomainError
from hilbert.metric import (
    UnitTangent,
    finsler_norm,
    flip,
    flow,
    footpoint,
    geodesic_point,
    hilbert_distance,
    hilbert_distance_many,
)
from hilbert.projective import ProjectiveTransform
from tests.helpers import HALF_LOG_3, boost, random_interior


def test_distance_from_center_to_half(disk):
    assert hilbert_distance(disk, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(HALF_LOG_3, abs=1e-12)


def test_distance_matches_klein_model(disk, rng):
    xs = random_interior(rng, 50)
    ys = random_interior(rng, 50)
    for x, y in zip(xs, ys):
        num = 1.0 - x @ y
        den = math.sqrt((1.0 - x @ x) * (1.0 - y @ y))
        expected = math.acosh(max(num / den, 1.0))
        assert hilbert_distance(disk, x, y) == pytest.approx(expected, abs=1e-9)


def test_distance_is_exactly_symmetric(pnorm_ball, rng):
    xs = random_interior(rng, 30, max_radius=0.6)
    ys = random_interior(rng, 30, max_radius=0.6)
    forward = hilbert_distance_many(pnorm_ball, xs, ys)
    backward = hilbert_distance_many(pnorm_ball, ys, xs)
    assert np.array_equal(forward, backward)


def test_coincident_points_are_at_distance_zero(disk):
    assert hilbert_distance(disk, [0.3, 0.1], [0.3, 0.1]) == 0.0


def test_pnorm_distance_on_diagonal(pnorm_ball):
    c = 2.0 ** (-0.25)
    s = 0.3 / math.sqrt(2.0)
    expected = 0.5 * math.log((c + 0.3) / (c - 0.3))
    assert hilbert_distance(pnorm_ball, [0.0, 0.0], [s, s]) == pytest.approx(expected, abs=1e-4)


def test_distance_rejects_outside_points(disk):
    with pytest.raises(DomainError):
        hilbert_distance(disk, [0.0, 0.0], [1.5, 0.0])
    with pytest.raises(DomainError):
        hilbert_distance_many(disk, np.zeros((1, 2)), np.array([[0.0, 1.0]]))


def test_isometries_preserve_distance(disk, rng):
    g = ProjectiveTransform(boost(0.9))
    xs = random_interior(rng, 20)
    ys = random_interior(rng, 20)
    before = hilbert_distance_many(disk, xs, ys)
    after = hilbert_distance_many(disk, g.apply_affine(xs), g.apply_affine(ys))
    np.testing.assert_allclose(after, before, atol=1e-9)


def test_triangle_inequality(flat_ellipse, rng):
    pts = random_interior(rng, 60, max_radius=0.45)
    x, y, z = pts[:20], pts[20:40], pts[40:]
    xy = hilbert_distance_many(flat_ellipse, x, y)
    yz = hilbert_distance_many(flat_ellipse, y, z)
    xz = hilbert_distance_many(flat_ellipse, x, z)
    assert np.all(xz <= xy + yz + 1e-9)


def test_finsler_norm(disk):
    assert finsler_norm(disk, [0.5, 0.0], [1.0, 0.0]) == pytest.approx(4.0 / 3.0)
    assert finsler_norm(disk, [0.0, 0.0], [0.0, 0.0]) == 0.0


def test_finsler_norm_is_derivative_of_distance(disk):
    x = np.array([0.2, -0.1])
    v = np.array([0.3, 0.4])
    h = 1e-6
    numeric = hilbert_distance(disk, x, x + h * v) / h
    assert finsler_norm(disk, x, v) == pytest.approx(numeric, rel=1e-4)


def test_geodesic_point_has_requested_distance(disk):
    p = geodesic_point(disk, [0.0, 0.0], [0.0, 1.0], 2.0)
    assert hilbert_distance(disk, [0.0, 0.0], p) == pytest.approx(2.0, abs=1e-9)
    np.testing.assert_allclose(disk.affine(p), [0.0, math.tanh(2.0)], atol=1e-12)


def test_geodesic_point_argument_checks(disk):
    with pytest.raises(ArgumentError):
        geodesic_point(disk, [0.0, 0.0], [1.0, 0.0], -1.0)
    with pytest.raises(DomainError):
        geodesic_point(disk, [0.0, 0.0], [0.5, 0.0], 1.0)


def test_flow_moves_footpoint_by_time(disk):
    v = UnitTangent.from_footpoint(disk, [0.1, 0.2], [1.0, -0.5])
    np.testing.assert_allclose(disk.affine(footpoint(disk, v)), [0.1, 0.2], atol=1e-12)
    w = flow(disk, v, 1.25)
    assert hilbert_distance(disk, footpoint(disk, v), footpoint(disk, w)) == pytest.approx(1.25, abs=1e-9)
    back = flow(disk, flow(disk, v, 0.5), -0.5)
    assert back.xi_plus == v.xi_plus
    assert back.time == pytest.approx(v.time, abs=1e-15)


def test_flip_keeps_footpoint(disk):
    v = UnitTangent.from_footpoint(disk, [0.3, 0.0], [0.0, 1.0])
    np.testing.assert_allclose(disk.affine(footpoint(disk, flip(v))), disk.affine(footpoint(disk, v)),
                               atol=1e-12)
    assert flip(flip(v)) == v


def test_unit_tangent_needs_distinct_endpoints(disk):
    xi = disk.point([1.0, 0.0])
    with pytest.raises(ArgumentError):
        UnitTangent(xi, xi)


@pytest.mark.parametrize("name,radius", [("disk", 0.9), ("flat_ellipse", 0.45), ("pnorm_ball", 0.8)])
def test_metric_axioms_on_random_triples(request, rng, name, radius):
    domain = request.getfixturevalue(name)
    x, y, z = (random_interior(rng, 1000, max_radius=radius) for _ in range(3))
    xy = hilbert_distance_many(domain, x, y)
    yx = hilbert_distance_many(domain, y, x)
    yz = hilbert_distance_many(domain, y, z)
    xz = hilbert_distance_many(domain, x, z)
    assert np.all(np.abs(xy - yx) <= 1e-12)
    assert np.all(xy > 0.0)
    assert np.all(xy + yz - xz >= -1e-10)
    assert np.all(hilbert_distance_many(domain, x, x) == 0.0)


def test_flow_commutes_with_flip(disk):
    v = UnitTangent.from_footpoint(disk, [0.2, -0.1], [0.4, 1.0])
    for t in (-1.5, 0.3, 2.0):
        left = flow(disk, flip(v), t)
        right = flip(flow(disk, v, -t))
        assert left.xi_minus == right.xi_minus
        assert left.xi_plus == right.xi_plus
        assert left.time == pytest.approx(right.time, abs=1e-12)


def test_flow_rejects_a_tangent_from_another_domain(disk, flat_ellipse):
    v = UnitTangent.from_footpoint(disk, [0.0, 0.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        flow(flat_ellipse, v, 1.0)
