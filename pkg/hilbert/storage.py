"""CSV tables, atomic measure files and JSON run manifests."""

import csv
import json
import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

import numpy as np

from .domains import ConvexDomain
from .errors import ConfigError, OutputError
from .measures import AtomicMeasure

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "config.cfg"
TABLE_DIR = "tables"


def format_number(value: Any) -> str:
    """Decimal text with 17 significant digits; integers and strings pass through."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _parse_number(text: str) -> Union[float, str]:
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class Table:
    """A named-column table of numbers (or short labels)."""

    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def _write_header(handle: TextIO, metadata: Dict[str, Any]) -> None:
    for key, value in metadata.items():
        if isinstance(value, (list, tuple, np.ndarray)):
            value = " ".join(format_number(v) for v in np.asarray(value).ravel())
        else:
            value = format_number(value)
        handle.write(f"# {key} = {value}\n")


def _read_header(lines: Sequence[str]) -> Dict[str, str]:
    meta = {}
    for line in lines:
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].partition("=")
        if sep:
            meta[key.strip()] = value.strip()
    return meta


def write_table(path: Union[str, Path], table: Table, metadata: Optional[Dict[str, Any]] = None) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            if metadata:
                _write_header(handle, metadata)
            writer = csv.writer(handle)
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([format_number(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write table {path}: {exc}") from exc


def read_table(path: Union[str, Path]) -> Table:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read table {path}: {exc}") from exc
    body = [line for line in lines if not line.startswith("#")]
    reader = csv.reader(body)
    columns = next(reader)
    return Table(columns, [[_parse_number(v) for v in row] for row in reader])


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def write_measure(path: Union[str, Path], mu: AtomicMeasure) -> None:
    """Write atoms as CSV (x0..x{n-1}, weight, distance) after a `# key = value` block."""
    n = mu.points.shape[1] if mu.points.ndim == 2 else mu.domain.dimension
    metadata = {
        "kind": "atomic-measure",
        "dimension": n,
        "atoms": len(mu),
        "s": mu.s,
        "R": mu.R,
        "normalization": mu.normalization,
        "basepoint": mu.basepoint,
        "total_mass": mu.total_mass,
    }
    if mu.origin is not None:
        metadata["origin"] = mu.origin
    table = Table([f"x{i}" for i in range(n)] + ["weight", "distance"])
    for p, w, d in zip(mu.points, mu.weights, mu.distances):
        table.add(*p, w, d)
    write_table(path, table, metadata)
    logger.info("wrote %d atoms to %s", len(mu), path)


def read_measure(path: Union[str, Path], domain: ConvexDomain) -> AtomicMeasure:
    """Read a measure file written by write_measure.

    Raises:
        ConfigError: If the header or columns are malformed.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read measure {path}: {exc}") from exc
    meta = _read_header(lines)
    try:
        n = int(meta["dimension"])
        basepoint = np.array([float(v) for v in meta["basepoint"].split()])
        origin = np.array([float(v) for v in meta["origin"].split()]) if "origin" in meta else None
        s, R = float(meta["s"]), float(meta["R"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed measure header ({exc})") from exc
    table = read_table(path)
    expected = [f"x{i}" for i in range(n)] + ["weight", "distance"]
    if table.columns != expected:
        raise ConfigError(f"{path}: expected columns {expected}, found {table.columns}")
    data = np.array(table.rows, dtype=float).reshape(-1, n + 2)
    return AtomicMeasure(domain, data[:, :n], data[:, n], data[:, n + 1], basepoint, s, R,
                         meta.get("normalization", "basepoint"), origin)


# ---------------------------------------------------------------------------
# Run directories
# ---------------------------------------------------------------------------

def prepare_run_directory(path: Union[str, Path], force: bool = False) -> Path:
    """Create the run directory; an existing non-empty one needs `force`.

    Raises:
        OutputError: If the directory has content and force is False, or cannot be created.
    """
    out = Path(path)
    if out.exists() and not out.is_dir():
        raise OutputError(f"{out} exists and is not a directory")
    if out.exists() and any(out.iterdir()):
        if not force:
            raise OutputError(f"run directory {out} is not empty; use --force to overwrite")
        logger.warning("overwriting run directory %s", out)
        shutil.rmtree(out)
    try:
        (out / TABLE_DIR).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create run directory {out}: {exc}") from exc
    return out


def write_manifest(path: Union[str, Path], manifest: Dict[str, Any]) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, ensure_ascii=False, default=_json_default)
    except OSError as exc:
        raise OutputError(f"cannot write manifest {path}: {exc}") from exc


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _default_manifest() -> Dict[str, Any]:
    return {
        "experiment": None,
        "config_hash": None,
        "seed": 0,
        "passed": None,
        "fits": {},
        "verdicts": [],
        "tables": [],
        "seconds": None,
    }


def load_manifest(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a manifest, filling any missing fields from the defaults."""
    manifest = _default_manifest()
    try:
        with open(path, "r", encoding="utf-8") as f:
            manifest.update(json.load(f))
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    return manifest


def write_run(path: Union[str, Path], manifest: Dict[str, Any], tables: Dict[str, Table],
              config_text: str, force: bool = False) -> Path:
    """Write a complete run directory: manifest, config snapshot and one CSV per table."""
    out = prepare_run_directory(path, force)
    names = []
    for name, table in tables.items():
        file_name = f"{name}.csv"
        write_table(out / TABLE_DIR / file_name, table)
        names.append(f"{TABLE_DIR}/{file_name}")
    try:
        (out / CONFIG_NAME).write_text(config_text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write config snapshot in {out}: {exc}") from exc
    write_manifest(out / MANIFEST_NAME, {**manifest, "tables": names})
    logger.info("run written to %s", out)
    return out
