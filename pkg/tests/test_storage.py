import json

import numpy as np
import pytest

from hilbert.errors import ConfigError, OutputError
from hilbert.measures import patterson_sullivan
from hilbert.storage import (
    Table,
    format_number,
    load_manifest,
    prepare_run_directory,
    read_measure,
    read_table,
    write_measure,
    write_run,
    write_table,
)


def test_table_rejects_wrong_width():
    table = Table(["t", "N"])
    table.add(0.5, 3)
    with pytest.raises(ValueError):
        table.add(1.0)
    assert len(table) == 1
    assert table.column("N") == [3]


def test_format_number():
    assert format_number(True) == "1"
    assert format_number(np.bool_(False)) == "0"
    assert format_number(np.int64(7)) == "7"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number("ab") == "ab"


def test_table_file_with_header(tmp_path):
    path = tmp_path / "counts.csv"
    table = Table(["t", "N", "label"])
    table.add(0.25, 4, "a")
    table.add(0.5, 9, "bA")
    write_table(path, table, {"R": 7.0, "axis": [1.0, 0.0]})
    lines = path.read_text().splitlines()
    assert lines[0] == "# R = 7"
    assert lines[1] == "# axis = 1 0"
    back = read_table(path)
    assert back.columns == ["t", "N", "label"]
    assert back.rows == [[0.25, 4.0, "a"], [0.5, 9.0, "bA"]]


def test_read_table_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_table(tmp_path / "absent.csv")


def test_measure_file_reloads(tmp_path, cyclic):
    mu = patterson_sullivan(cyclic, s=0.5, R=10.5)
    path = tmp_path / "mu.csv"
    write_measure(path, mu)
    back = read_measure(path, cyclic.domain)
    assert len(back) == len(mu)
    np.testing.assert_allclose(back.weights, mu.weights, rtol=1e-15)
    np.testing.assert_allclose(back.distances, mu.distances, rtol=1e-15)
    assert back.s == mu.s
    assert back.R == mu.R


def test_measure_file_bad_header(tmp_path, cyclic):
    path = tmp_path / "mu.csv"
    path.write_text("# kind = atomic-measure\nx0,x1,weight,distance\n0,0,1,0\n")
    with pytest.raises(ConfigError):
        read_measure(path, cyclic.domain)


def test_run_directory_needs_force(tmp_path):
    out = tmp_path / "run"
    prepare_run_directory(out)
    (out / "stale.txt").write_text("old")
    with pytest.raises(OutputError):
        prepare_run_directory(out)
    prepare_run_directory(out, force=True)
    assert not (out / "stale.txt").exists()
    assert (out / "tables").is_dir()


def test_write_run_layout(tmp_path):
    main = Table(["t", "N"], [[1.0, 3]])
    extra = Table(["length"], [[2.0]])
    out = write_run(tmp_path / "run", {"experiment": "orbit-counting", "passed": True},
                    {"main": main, "lengths": extra}, "[group]\nname = cyclic\n")
    manifest = load_manifest(out / "manifest.json")
    assert manifest["tables"] == ["tables/main.csv", "tables/lengths.csv"]
    assert manifest["passed"] is True
    assert manifest["fits"] == {}
    assert (out / "config.cfg").read_text().startswith("[group]")
    assert read_table(out / "tables" / "main.csv").rows == [[1.0, 3.0]]


def test_load_manifest_errors(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_manifest(path)
    path.write_text(json.dumps({"experiment": "mixing"}))
    assert load_manifest(path)["seed"] == 0
