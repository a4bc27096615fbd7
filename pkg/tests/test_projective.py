import numpy as np
import pytest

from hilbert.errors import ArgumentError, ChartError
from hilbert.projective import (
    AffineChart,
    HomogeneousPoint,
    IsometryType,
    ProjectiveTransform,
    classify,
    spectral_batch,
    translation_length,
)
from tests.helpers import boost, rotation


def test_homogeneous_point_is_scale_invariant():
    assert HomogeneousPoint([1.0, 2.0, -3.0]) == HomogeneousPoint([-2.0, -4.0, 6.0])
    assert HomogeneousPoint([1.0, 0.0, 0.0]) != HomogeneousPoint([1.0, 0.1, 0.0])


def test_homogeneous_point_rejects_zero_and_nonfinite():
    with pytest.raises(ArgumentError):
        HomogeneousPoint([0.0, 0.0, 0.0])
    with pytest.raises(ArgumentError):
        HomogeneousPoint([1.0, np.nan])


def test_chart_round_trip_and_infinity():
    chart = AffineChart()
    p = chart.from_affine([0.25, -0.5])
    np.testing.assert_allclose(chart.to_affine(p), [0.25, -0.5])
    with pytest.raises(ChartError):
        chart.to_affine(HomogeneousPoint([0.0, 1.0, 1.0]))


def test_other_chart_index():
    chart = AffineChart(index=2)
    np.testing.assert_allclose(chart.lift(np.array([3.0, 4.0])), [3.0, 4.0, 1.0])


def test_transform_normalizes_determinant():
    t = ProjectiveTransform(2.0 * np.eye(3))
    assert abs(np.linalg.det(t.matrix)) == pytest.approx(1.0)
    with pytest.raises(ArgumentError):
        ProjectiveTransform(np.zeros((3, 3)))
    with pytest.raises(ArgumentError):
        ProjectiveTransform(np.ones((2, 3)))


def test_transform_composition_and_inverse():
    a = ProjectiveTransform(boost(0.7))
    b = ProjectiveTransform(rotation(0.3))
    ab = a @ b
    np.testing.assert_allclose((ab @ ab.inverse()).matrix, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(a.power(-2).matrix, np.linalg.inv(a.matrix @ a.matrix), atol=1e-12)
    p = HomogeneousPoint([1.0, 0.2, 0.1])
    assert ab(p) == a(b(p))


def test_classify_boost():
    data = classify(ProjectiveTransform(boost(1.0)))
    assert data.kind is IsometryType.HYPERBOLIC
    assert data.translation_length == pytest.approx(1.0)
    np.testing.assert_allclose(AffineChart().to_affine(data.attracting), [1.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(AffineChart().to_affine(data.repelling), [-1.0, 0.0], atol=1e-9)


def test_translation_length_of_powers():
    g = ProjectiveTransform(boost(1.0))
    assert translation_length(g.power(2)) == pytest.approx(2.0)
    assert translation_length(g.inverse()) == pytest.approx(1.0)


def test_identity_and_rotation_are_elliptic():
    assert classify(ProjectiveTransform.identity(3)).kind is IsometryType.ELLIPTIC
    rot = classify(ProjectiveTransform(rotation(1.1)))
    assert rot.kind is IsometryType.ELLIPTIC
    assert rot.translation_length == 0.0


def test_modular_commutator_is_parabolic(modular):
    assert modular.word("abAB").kind is IsometryType.PARABOLIC


def test_spectral_batch_matches_classify():
    mats = np.stack([boost(0.5), boost(1.5), rotation(0.4)])
    batch = spectral_batch(mats)
    np.testing.assert_allclose(batch.translation_lengths, [0.5, 1.5, 0.0], atol=1e-12)
    assert batch.hyperbolic.tolist() == [True, True, False]


def test_spectral_batch_empty():
    batch = spectral_batch(np.zeros((0, 3, 3)))
    assert batch.kinds.shape == (0,)
