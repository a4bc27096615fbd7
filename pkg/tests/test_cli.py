import json
from pathlib import Path

from click.testing import CliRunner

from hilbert.catalog import load_group
from hilbert.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, cli, main
from hilbert.storage import load_manifest

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_no_arguments_prints_usage(capsys):
    assert main([]) == EXIT_ERROR
    assert "Usage" in capsys.readouterr().err


def test_unknown_command():
    assert main(["teleport"]) == EXIT_ERROR


def test_dist(capsys):
    assert main(["dist", "--x", "0 0", "--y", "0.5 0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.5493061443"


def test_dist_outside_the_domain(capsys):
    assert main(["dist", "--x", "0 0", "--y", "1.5 0"]) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_dist_on_config_domain(capsys, tmp_path):
    cfg = tmp_path / "ellipse.cfg"
    cfg.write_text("[domain]\nkind = ellipsoid\nmatrix = 1 0; 0 4\n")
    assert main(["dist", "--domain", str(cfg), "--x", "0 0", "--y", "0 0.25"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.5493061443"


def test_oracle_klein(capsys):
    assert main(["oracle", "klein", "--pairs", "50"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("PASS klein")


def test_oracle_ball_words(capsys):
    assert main(["oracle", "ball-words", "--radius", "3", "--max-letters", "4"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_group_info(capsys):
    assert main(["group", "info", "--generators", "builtin:schottky"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "rank: 2" in out
    assert "free: yes" in out
    assert "a: hyperbolic" in out


def test_group_export(tmp_path, capsys):
    target = tmp_path / "cyclic.gen"
    assert main(["group", "export", "cyclic", "--out", str(target)]) == EXIT_OK
    assert load_group(str(target)).rank == 1


def test_experiment_refuses_non_empty_directory(tmp_path, capsys):
    out = tmp_path / "run"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    code = main(["experiment", "orbit-counting", "--config", str(CONFIGS / "cyclic.cfg"), "--out", str(out)])
    assert code == EXIT_ERROR
    assert "not empty" in capsys.readouterr().err


def test_experiment_writes_run_directory(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["experiment", "orbit-counting", "--config", str(CONFIGS / "cyclic.cfg"), "--out", str(out)])
    assert code == EXIT_OK
    manifest = load_manifest(out / "manifest.json")
    assert manifest["passed"] is True
    assert manifest["tables"] == ["tables/main.csv"]
    assert (out / "config.cfg").exists()


def test_failed_verdict_exit_code(tmp_path):
    out = tmp_path / "run"
    code = main(["experiment", "length-spectrum", "--config", str(CONFIGS / "cyclic.cfg"), "--out", str(out)])
    assert code == EXIT_FAILED
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verdicts"][0]["criterion"] == "dense-mod-one"


def test_ps_measure_writes_file():
    runner = CliRunner()
    with runner.isolated_filesystem():
        Path("cyclic.cfg").write_text("[group]\ngenerators = builtin:cyclic\n")
        result = runner.invoke(cli, ["ps-measure", "--config", "cyclic.cfg", "--s", "0.5",
                                     "--radius", "10.5", "--out", "mu.csv"])
        assert result.exit_code == 0, result.output
        assert result.output.startswith("21 atoms")
        assert Path("mu.csv").read_text().startswith("# kind = atomic-measure")
