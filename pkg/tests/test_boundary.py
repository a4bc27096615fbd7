import math

import numpy as np
import pytest

from hilbert import boundary
from hilbert.boundary import (
    Cap,
    ConeVariant,
    FiniteSet,
    FullBoundary,
    Horoball,
    Shadow,
    ShadowVariant,
    busemann,
    busemann_many,
    busemann_truncated,
    cross_ratio,
    gromov_product,
    gromov_product_interior,
    gromov_product_many,
    gromov_product_mixed,
    horoball_entry,
    in_cone,
    in_horoball,
    in_shadow,
    line_distance,
    line_distance_many,
    ray_distance,
    visual_distance,
)
from hilbert.errors import ArgumentError, DomainError, NumericalError
from hilbert.metric import hilbert_distance
from hilbert.projective import ProjectiveTransform
from tests.helpers import HALF_LOG_3, boost, random_circle, random_interior, rotation


def test_busemann_toward_boundary(disk):
    assert busemann(disk, [1.0, 0.0], [0.0, 0.0], [0.5, 0.0]) == pytest.approx(HALF_LOG_3, abs=1e-12)
    assert busemann(disk, [1.0, 0.0], [0.5, 0.0], [0.0, 0.0]) == pytest.approx(-HALF_LOG_3, abs=1e-12)
    assert busemann(disk, [1.0, 0.0], [0.2, 0.2], [0.2, 0.2]) == 0.0


def test_busemann_matches_truncation(disk):
    exact = busemann(disk, [0.6, 0.8], [0.1, -0.2], [0.0, 0.5])
    assert busemann_truncated(disk, [0.6, 0.8], [0.1, -0.2], [0.0, 0.5], 10.0) == pytest.approx(exact, abs=1e-6)


def test_busemann_is_a_cocycle_on_pnorm_ball(pnorm_ball):
    xi = pnorm_ball.sample_boundary(8)[1]
    x, y, z = [0.1, 0.0], [-0.2, 0.3], [0.0, -0.4]
    total = busemann(pnorm_ball, xi, x, y) + busemann(pnorm_ball, xi, y, z)
    assert total == pytest.approx(busemann(pnorm_ball, xi, x, z), abs=1e-9)
    assert abs(busemann(pnorm_ball, xi, x, y)) <= hilbert_distance(pnorm_ball, x, y) + 1e-9


def test_busemann_requires_boundary_point(disk):
    with pytest.raises(DomainError):
        busemann(disk, [0.5, 0.0], [0.0, 0.0], [0.1, 0.0])


def test_gromov_product_of_perpendicular_points(disk):
    value = gromov_product(disk, [0.0, 0.0], [1.0, 0.0], [0.0, 1.0])
    assert value == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
    assert gromov_product(disk, [0.0, 0.0], [0.0, 1.0], [1.0, 0.0]) == pytest.approx(value, abs=1e-12)
    assert visual_distance(disk, [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.exp(-value))


def test_gromov_product_of_equal_points_raises(disk):
    with pytest.raises(ArgumentError):
        gromov_product(disk, [0.0, 0.0], [1.0, 0.0], [1.0, 0.0])
    assert visual_distance(disk, [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]) == 0.0


def test_gromov_product_of_antipodes_is_zero(disk):
    assert gromov_product(disk, [0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_interior_and_mixed_products(disk):
    assert gromov_product_interior(disk, [0.0, 0.0], [0.5, 0.0], [0.5, 0.0]) == pytest.approx(HALF_LOG_3)
    assert gromov_product_mixed(disk, [0.0, 0.0], [0.5, 0.0], [1.0, 0.0]) == pytest.approx(HALF_LOG_3)


def test_line_and_ray_distances(disk):
    assert line_distance(disk, [-1.0, 0.0], [1.0, 0.0], [0.0, 0.5]) == pytest.approx(HALF_LOG_3, abs=1e-12)
    assert ray_distance(disk, [0.0, 0.0], [1.0, 0.0], [0.0, 0.5]) == pytest.approx(HALF_LOG_3, abs=1e-12)
    behind = ray_distance(disk, [0.0, 0.0], [1.0, 0.0], [-0.5, 0.0])
    assert behind == pytest.approx(HALF_LOG_3, abs=1e-12)
    with pytest.raises(ArgumentError):
        line_distance(disk, [1.0, 0.0], [1.0, 0.0], [0.0, 0.0])


def test_line_distance_on_pnorm_ball(pnorm_ball):
    expected = 0.5 * math.log(1.3 / 0.7)
    assert line_distance(pnorm_ball, [-1.0, 0.0], [1.0, 0.0], [0.0, 0.3]) == pytest.approx(expected, abs=1e-7)


def test_horoball_levels(disk):
    h = Horoball(disk, disk.point([1.0, 0.0]), disk.point([0.0, 0.0]))
    assert in_horoball(h, [0.5, 0.0])
    assert not in_horoball(h, [-0.5, 0.0])
    with pytest.raises(DomainError):
        Horoball(disk, disk.point([0.5, 0.0]), disk.point([0.0, 0.0]))


def test_horoball_entry(disk):
    h = Horoball(disk, disk.point([1.0, 0.0]), disk.point([0.0, 0.0]))
    entry = horoball_entry(h, [-1.0, 0.0], [1.0, 0.0])
    np.testing.assert_allclose(disk.affine(entry), [0.0, 0.0], atol=1e-8)
    chord = horoball_entry(h, [0.6, -0.8], [0.6, 0.8])
    assert chord is not None
    assert h.level(chord) == pytest.approx(0.0, abs=1e-8)
    assert horoball_entry(h, [-0.6, -0.8], [-0.6, 0.8]) is None


def test_boundary_sets(disk):
    cap = Cap((1.0, 0.0), 0.3)
    assert cap.contains(disk, [math.cos(0.2), math.sin(0.2)])
    assert not cap.contains(disk, [0.0, 1.0])
    finite = FiniteSet([disk.point([0.0, 1.0])])
    assert finite.contains(disk, [0.0, 1.0])
    assert not finite.contains(disk, [1.0, 0.0])
    assert FiniteSet([]).empty
    assert FullBoundary().contains(disk, [0.0, -1.0])
    with pytest.raises(ArgumentError):
        Cap((0.0, 0.0), 0.1)


def test_plain_shadow(disk):
    shadow = Shadow(disk, disk.point([0.0, 0.0]), disk.point([0.5, 0.0]), 0.5)
    assert in_shadow(shadow, [1.0, 0.0])
    assert not in_shadow(shadow, [-1.0, 0.0])
    assert not in_shadow(shadow, [0.0, 1.0])


def test_shadow_from_boundary_source(disk):
    shadow = Shadow(disk, disk.point([-1.0, 0.0]), disk.point([0.0, 0.0]), 0.3)
    assert in_shadow(shadow, [1.0, 0.0])
    assert not in_shadow(shadow, [0.0, 1.0])
    with pytest.raises(ArgumentError):
        in_shadow(shadow, [-1.0, 0.0])


def test_shadow_variants_are_nested(disk):
    source, target = disk.point([0.0, 0.0]), disk.point([0.9, 0.0])
    xis = disk.sample_boundary(16)
    plain = Shadow(disk, source, target, 0.5).members(xis)
    enlarged = Shadow(disk, source, target, 0.5, ShadowVariant.ENLARGED).members(xis)
    contracted = Shadow(disk, source, target, 0.5, ShadowVariant.CONTRACTED).members(xis)
    assert np.all(contracted <= plain)
    assert np.all(plain <= enlarged)
    assert enlarged[0]


def test_mesh_shadow_needs_separation(disk):
    with pytest.raises(ArgumentError):
        Shadow(disk, disk.point([0.0, 0.0]), disk.point([0.5, 0.0]), 0.5, ShadowVariant.ENLARGED)


def test_cones(disk):
    cap = Cap((1.0, 0.0), 0.3)
    assert in_cone(disk, ConeVariant.EXPANDED, [0.0, 0.0], cap, 0.1, [0.5, 0.0])
    assert not in_cone(disk, ConeVariant.EXPANDED, [0.0, 0.0], cap, 0.1, [-0.5, 0.0])
    assert not in_cone(disk, ConeVariant.EXPANDED, [0.0, 0.0], FiniteSet([]), 0.1, [0.5, 0.0])
    assert in_cone(disk, ConeVariant.CONTRACTED, [0.0, 0.0], Cap((1.0, 0.0), math.pi), 0.1, [0.5, 0.0])


def test_cross_ratio_of_hyperbolic_element(disk):
    ell = 0.7
    g = ProjectiveTransform(boost(ell))
    eta = np.array([0.0, 1.0])
    g_eta = g.apply_affine(eta[None, :])[0]
    value = cross_ratio(disk, [-1.0, 0.0], [1.0, 0.0], g_eta, eta)
    assert value == pytest.approx(2.0 * ell, abs=1e-9)
    moved = cross_ratio(disk, [-1.0, 0.0], [1.0, 0.0], g_eta, eta, x=[0.2, 0.3])
    assert moved == pytest.approx(value, abs=1e-9)
    swapped = cross_ratio(disk, [-1.0, 0.0], [1.0, 0.0], eta, g_eta)
    assert swapped == pytest.approx(-value, abs=1e-9)


def test_cross_ratio_rejects_repeated_points(disk):
    with pytest.raises(ArgumentError):
        cross_ratio(disk, [1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0])


def _boundary_points(domain, rng, count):
    return domain.exit_points(np.zeros((count, 2)), random_circle(rng, count))


@pytest.mark.parametrize("word", ["a", "B", "ab"])
def test_busemann_is_invariant_under_the_group(schottky, rng, word):
    domain = schottky.domain
    g = schottky.element(schottky.parse(word)).matrix
    xis = random_circle(rng, 30)
    xs = random_interior(rng, 30, max_radius=0.8)
    ys = random_interior(rng, 30, max_radius=0.8)
    before = busemann_many(domain, xis, xs, ys)
    after = busemann_many(domain, g.apply_affine(xis), g.apply_affine(xs), g.apply_affine(ys))
    np.testing.assert_allclose(after, before, atol=1e-8)


@pytest.mark.parametrize("matrix", [boost(0.9), boost(0.4, axis=2) @ rotation(1.1)])
def test_gromov_product_is_invariant_under_isometries(disk, rng, matrix):
    g = ProjectiveTransform(matrix)
    xs = random_interior(rng, 100, max_radius=0.8)
    xis = random_circle(rng, 100)
    etas = random_circle(rng, 100)
    before = gromov_product_many(disk, xs, xis, etas)
    after = gromov_product_many(disk, g.apply_affine(xs), g.apply_affine(xis), g.apply_affine(etas))
    np.testing.assert_allclose(after, before, atol=1e-8)


@pytest.mark.parametrize("name", ["disk", "pnorm_ball"])
def test_gromov_product_basepoint_change(request, rng, name):
    domain = request.getfixturevalue(name)
    xis = _boundary_points(domain, rng, 100)
    etas = _boundary_points(domain, rng, 100)
    xs = random_interior(rng, 100, max_radius=0.7)
    moved = random_interior(rng, 100, max_radius=0.7)
    lhs = gromov_product_many(domain, xs, xis, etas)
    rhs = gromov_product_many(domain, moved, xis, etas) + 0.5 * (
        busemann_many(domain, xis, xs, moved) + busemann_many(domain, etas, xs, moved))
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


@pytest.mark.parametrize("name,batches,chords", [("disk", 10, 100), ("pnorm_ball", 4, 50)])
def test_chord_meeting_a_ball_bounds_the_gromov_product(request, rng, name, batches, chords):
    domain = request.getfixturevalue(name)
    for x in random_interior(rng, batches, max_radius=0.8):
        us = _boundary_points(domain, rng, chords)
        vs = _boundary_points(domain, rng, chords)
        radii = line_distance_many(domain, us, vs, x) + rng.uniform(0.0, 0.1, size=chords)
        products = gromov_product_many(domain, x, us, vs)
        assert np.all(products <= radii + 1e-8)


@pytest.mark.parametrize("name,count", [("disk", 200), ("pnorm_ball", 60)])
def test_busemann_on_a_shadow_is_close_to_the_distance(request, rng, name, count):
    domain = request.getfixturevalue(name)
    r = 0.4
    hits = 0
    for x, y in zip(random_interior(rng, 5, max_radius=0.5), random_interior(rng, 5, max_radius=0.5)):
        aim = (y - x)[None, :] + rng.normal(scale=0.2, size=(count, 2))
        xis = domain.exit_points(np.broadcast_to(x, aim.shape).copy(), aim)
        inside = Shadow(domain, domain.point(x), domain.point(y), r).members(xis)
        if not inside.any():
            continue
        d = hilbert_distance(domain, x, y)
        values = busemann_many(domain, xis[inside], x, y)
        hits += int(inside.sum())
        assert np.all(values > d - 2.0 * r - 1e-8)
        assert np.all(values <= d + 1e-8)
    assert hits > 0


def test_shadow_variants_are_nested_on_random_boundary_points(disk, rng):
    source, target = disk.point([0.0, 0.0]), disk.point([0.9, 0.0])
    xis = random_circle(rng, 1000)
    plain = Shadow(disk, source, target, 0.5).members(xis)
    enlarged = Shadow(disk, source, target, 0.5, ShadowVariant.ENLARGED).members(xis)
    contracted = Shadow(disk, source, target, 0.5, ShadowVariant.CONTRACTED).members(xis)
    assert np.all(contracted <= plain)
    assert np.all(plain <= enlarged)
    assert plain.any()


@pytest.mark.parametrize("name", ["disk", "pnorm_ball"])
def test_cross_ratio_does_not_depend_on_the_basepoint(request, rng, name):
    domain = request.getfixturevalue(name)
    angles = np.array([0.3, 1.9, 3.4, 5.0])
    pts = domain.exit_points(np.zeros((4, 2)), np.column_stack([np.cos(angles), np.sin(angles)]))
    reference = cross_ratio(domain, *pts)
    for x in random_interior(rng, 5, max_radius=0.7):
        assert cross_ratio(domain, *pts, x=x) == pytest.approx(reference, abs=1e-7)


def _fake_truncation(monkeypatch, values, limit=math.inf):
    calls = []

    def fake(domain, xi, x, y, T):
        calls.append(T)
        if T > limit:
            raise DomainError("ray point inside the boundary margin")
        return values(T)

    monkeypatch.setattr(boundary, "busemann_truncated", fake)
    return calls


def test_adaptive_busemann_doubles_then_halves_at_the_margin(monkeypatch):
    calls = _fake_truncation(monkeypatch, lambda T: math.exp(-2.0 * T), limit=13.0)
    value = boundary._adaptive_busemann(None, np.zeros(2), np.zeros(2), np.zeros(2))
    assert calls == [1.0, 2.0, 4.0, 8.0, 16.0, 12.0, 16.0, 14.0, 13.0]
    assert value == math.exp(-26.0)


def test_adaptive_busemann_stops_once_values_agree(monkeypatch):
    calls = _fake_truncation(monkeypatch, lambda T: 0.25)
    assert boundary._adaptive_busemann(None, np.zeros(2), np.zeros(2), np.zeros(2)) == 0.25
    assert calls == [1.0, 2.0]


def test_adaptive_busemann_fails_inside_the_first_step(monkeypatch):
    _fake_truncation(monkeypatch, lambda T: 0.0, limit=0.5)
    with pytest.raises(NumericalError):
        boundary._adaptive_busemann(None, np.zeros(2), np.zeros(2), np.zeros(2))
