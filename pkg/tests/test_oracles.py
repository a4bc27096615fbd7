import numpy as np
import pytest

from hilbert import oracles
from hilbert.errors import ArgumentError
from hilbert.groups import enumerate_primitive_geodesics


def test_klein_oracle_passes():
    report = oracles.klein(pairs=200, seed=1)
    assert report.passed
    assert report.details["max_error"] <= 1e-10


def test_klein_distance_of_center_and_half():
    d = oracles.klein_distance(np.zeros((1, 2)), np.array([[0.5, 0.0]]))
    np.testing.assert_allclose(d, [0.5 * np.log(3.0)], atol=1e-12)


def test_ball_words_oracle(schottky):
    report = oracles.ball_words(schottky, 5.0, 5)
    assert report.passed
    assert report.details["pruned"] == 17


def test_ball_words_oracle_on_triangle_group(triangle):
    report = oracles.ball_words(triangle, 2.0, 8)
    assert report.details["missing"] == 0


@pytest.mark.parametrize("max_length,max_letters,classes", [(5.0, 6, None), (8.0, 10, 42)])
def test_cyclic_words_oracle(schottky, max_length, max_letters, classes):
    report = oracles.cyclic_words(schottky, max_length, max_letters)
    assert report.passed
    if classes is not None:
        assert report.details["census"] == classes


def test_cyclic_words_oracle_detects_a_short_census(schottky):
    lengths = [g.length for g in enumerate_primitive_geodesics(schottky, 5.0)][:-1]
    report = oracles.cyclic_words(schottky, 5.0, 6, census_lengths=lengths)
    assert not report.passed


def test_letter_bound_follows_the_slowest_short_word(cyclic, schottky):
    assert oracles.letter_bound(cyclic, 8.0) == 10
    assert oracles.letter_bound(schottky, 8.0) >= 6
    assert oracles.letter_bound(schottky, 8.0, slack=0) <= oracles.letter_bound(schottky, 8.0)


def test_letter_bound_argument_checks(cyclic):
    with pytest.raises(ArgumentError):
        oracles.letter_bound(cyclic, 0.0)
