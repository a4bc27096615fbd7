import numpy as np
import pytest

from hilbert.catalog import (
    builtin_group,
    build_domain,
    cyclic_group,
    format_generators,
    group_from_config,
    load_group,
    parse_generators,
    triangle_group,
    write_generators,
)
from hilbert.config import parse_config
from hilbert.domains import PNormBall
from hilbert.errors import ArgumentError, ConfigError
from hilbert.projective import IsometryType


def test_parse_generator_text():
    text = "#! name pair\n#! free\n# a\n1 0\n0 1\n\n# b\n2 0\n0 0.5\n"
    parsed = parse_generators(text)
    assert parsed.name == "pair"
    assert parsed.free
    assert parsed.labels == ["a", "b"]
    np.testing.assert_allclose(parsed.matrices[1], [[2.0, 0.0], [0.0, 0.5]])


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError) as info:
        parse_generators("1 0 0\n0 1\n0 0 1\n")
    assert info.value.line == 1
    with pytest.raises(ConfigError) as info:
        parse_generators("1 0\n0 x\n")
    assert info.value.line == 2
    with pytest.raises(ConfigError):
        parse_generators("#! color red\n1 0\n0 1\n")
    with pytest.raises(ConfigError):
        parse_generators("# nothing here\n")


def test_written_file_reloads(tmp_path, modular):
    path = tmp_path / "modular.gens"
    write_generators(modular, path)
    again = load_group(str(path))
    assert again.parabolics == ["abAB"]
    assert again.free
    np.testing.assert_allclose(again.matrices, modular.matrices, atol=1e-12)
    assert "#! parabolic abAB" in format_generators(modular)


def test_triangle_generator_orders(triangle):
    a, b = triangle.generators[0].matrix, triangle.generators[1].matrix
    np.testing.assert_allclose(np.linalg.matrix_power(a, 2), np.eye(3), atol=1e-9)
    np.testing.assert_allclose(np.linalg.matrix_power(b, 3), np.eye(3), atol=1e-9)
    np.testing.assert_allclose(np.linalg.matrix_power(a @ b, 7), np.eye(3), atol=1e-8)


def test_triangle_must_be_hyperbolic():
    with pytest.raises(ArgumentError):
        triangle_group(2, 3, 6)


def test_cyclic_group_length():
    g = cyclic_group(2.5)
    assert g.word("a").translation_length == pytest.approx(2.5)
    with pytest.raises(ArgumentError):
        cyclic_group(0.0)


def test_builtin_names():
    assert builtin_group("triangle(2,4,5)").name == "triangle(2,4,5)"
    assert builtin_group("cyclic(0.5)").word("a").translation_length == pytest.approx(0.5)
    with pytest.raises(ArgumentError):
        builtin_group("dodecahedron")


def test_modular_commutator_is_parabolic(modular):
    assert modular.word("abAB").kind is IsometryType.PARABOLIC
    assert modular.word("a").kind is IsometryType.HYPERBOLIC


def test_build_domain_from_config():
    config = parse_config("[domain]\nkind = pnorm\nexponent = 3\nradius = 2\n")
    domain = build_domain(config.domain)
    assert isinstance(domain, PNormBall)
    assert domain.contains([1.5, 0.0])
    with pytest.raises(ConfigError):
        build_domain(parse_config("[domain]\nkind = hull\n").domain)


def test_group_from_config_sets_parabolics():
    config = parse_config("[group]\ngenerators = builtin:modular\nparabolic = abAB\n")
    assert group_from_config(config).parabolics == ["abAB"]
    with pytest.raises(ArgumentError):
        group_from_config(parse_config("[group]\ngenerators = builtin:modular\nparabolic = xyz\n"))
