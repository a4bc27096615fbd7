import math
from pathlib import Path

import numpy as np
import pytest

from hilbert.config import load_config, parse_config
from hilbert.errors import ArgumentError, ResourceError
from hilbert.experiments import EXPERIMENTS, ExperimentRunner, _mod_one_mesh, _trend_toward_one

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL_TRIANGLE = """\
[group]
generators = builtin:triangle237

[sweep]
R = 6
t_step = 0.25
t_grid = 0 1 2
samples = 2000
bootstrap = 20
ps_radius = 5
window = 2 4
shadow_radius = 1

[tests]
phi = one
psi = one
"""


@pytest.fixture(scope="module")
def cyclic_runner():
    return ExperimentRunner(load_config(CONFIGS / "cyclic.cfg"))


@pytest.fixture(scope="module")
def triangle_runner():
    return ExperimentRunner(parse_config(SMALL_TRIANGLE))


def test_experiment_ids():
    assert len(EXPERIMENTS) == 8
    assert EXPERIMENTS[0] == "orbit-counting"


def test_unknown_experiment(cyclic_runner):
    with pytest.raises(ArgumentError):
        cyclic_runner.run("heat-kernel")


def test_cyclic_orbit_counting(cyclic_runner):
    result = cyclic_runner.run("orbit-counting")
    assert result.passed
    assert result.table.columns == ["t", "N", "stderr", "normalized"]
    counts = result.table.column("N")
    assert counts[0] == 1
    assert 239 <= counts[-1] <= 241
    assert result.verdict("exponent").observed < 0.05
    manifest = result.to_manifest()
    assert manifest["experiment"] == "orbit-counting"
    assert manifest["config_hash"] == result.config.digest()
    assert {v["criterion"] for v in manifest["verdicts"]} == {"monotone-counts", "exponent", "ratio-spread"}
    assert result.config_text().startswith("[run]")


def test_orbit_counting_needs_counts_in_window(cyclic):
    runner = ExperimentRunner(parse_config("[sweep]\nR = 0.5\nt_step = 0.5\n"), group=cyclic)
    with pytest.raises(ResourceError):
        runner.run("orbit-counting")


def test_cyclic_length_spectrum_is_not_dense(cyclic_runner):
    result = cyclic_runner.run("length-spectrum")
    assert not result.passed
    assert result.verdict("dense-mod-one").observed == 1.0
    assert result.fits["distinct_lengths"] == 1


def test_length_spectrum_needs_two_lengths(cyclic):
    runner = ExperimentRunner(parse_config("[sweep]\nl_max = 0.5\nl_step = 0.5\n"), group=cyclic)
    with pytest.raises(ResourceError):
        runner.run("length-spectrum")


def test_critical_gap_needs_a_marker(schottky):
    runner = ExperimentRunner(parse_config("[sweep]\nR = 8\n"), group=schottky)
    with pytest.raises(ArgumentError):
        runner.run("critical-gap")


def test_cyclic_geodesic_counting_matches_word_oracle(cyclic_runner):
    result = cyclic_runner.run("geodesic-counting")
    assert result.verdict("cyclic-word-oracle").passed
    assert result.fits["classes"] == 2
    assert "equidistribution" in result.tables


def test_triangle_ps_schedule(triangle_runner):
    result = triangle_runner.run("ps-schedule")
    assert len(result.table) == 6
    assert result.verdict("conformality").passed
    assert result.verdict("equivariance").passed
    assert result.fits["s_values"] == pytest.approx([result.fits["delta_hat"] + o for o in (0.1, 0.05, 0.02)])


def test_triangle_mixing_with_constant_observables(triangle_runner):
    result = triangle_runner.run("mixing")
    assert result.verdict("constant-observable").passed
    assert result.verdict("decorrelation").passed
    assert result.table.column("t") == [0.0, 1.0, 2.0]


def test_triangle_orbit_equidistribution(triangle_runner):
    result = triangle_runner.run("orbit-equidistribution")
    assert result.verdict("full-boundary-consistency").passed
    assert result.fits["sullivan_mass"] > 0
    assert {row[1] for row in result.table.rows} == {"full", "cap0", "cap1"}


def test_triangle_shadow_lemma(triangle_runner):
    result = triangle_runner.run("shadow-lemma")
    assert result.fits["constant"] >= 1.0
    assert result.tables["multiplicity"].column("shell") == [3.0, 4.0]


def test_monte_carlo_experiments_are_reproducible():
    config = parse_config(SMALL_TRIANGLE).with_values("tests", phi="ball 0.5", psi="ball 0.5")
    first = ExperimentRunner(config).run("mixing")
    second = ExperimentRunner(config).run("mixing")
    assert first.tables.keys() == second.tables.keys()
    for name, table in first.tables.items():
        assert table.columns == second.tables[name].columns
        np.testing.assert_array_equal(np.array(table.rows, dtype=float),
                                      np.array(second.tables[name].rows, dtype=float))
    assert first.fits == second.fits


def test_mod_one_mesh():
    assert _mod_one_mesh(np.array([1.0])) == 1.0
    assert _mod_one_mesh(np.array([0.5])) == pytest.approx(0.5)
    assert _mod_one_mesh(np.array([math.sqrt(2.0), math.sqrt(3.0)])) < 0.2


def test_trend_toward_one():
    assert _trend_toward_one(np.array([1.3, 1.1, 1.02]))
    assert not _trend_toward_one(np.array([1.02, 1.1, 1.3]))


@pytest.mark.slow
@pytest.mark.parametrize("config_name, experiment", [
    ("triangle237.cfg", "orbit-counting"),
    ("schottky.cfg", "shadow-lemma"),
    ("modular_cusp.cfg", "critical-gap"),
])
def test_shipped_configs_pass(config_name, experiment):
    result = ExperimentRunner(load_config(CONFIGS / config_name)).run(experiment)
    assert result.passed, [v for v in result.verdicts if not v.passed]
