"""Run configuration: an INI-style sectioned key/value format.

Vectors are whitespace-separated decimals, matrices are rows separated by
``;`` and record lists are records separated by ``;``. Every key has a typed
default; unknown sections or keys are errors.
"""

import configparser
import hashlib
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

from .errors import ConfigError

Vector = Tuple[float, ...]
Matrix = Tuple[Tuple[float, ...], ...]


@dataclass(frozen=True)
class RunSection:
    experiment: str = ""
    seed: int = 0
    output: str = "runs"


@dataclass(frozen=True)
class DomainSection:
    kind: str = "ellipsoid"
    dimension: int = 2
    matrix: Matrix = ()
    center: Vector = ()
    exponent: float = 4.0
    radius: float = 1.0
    hull_depth: int = 3


@dataclass(frozen=True)
class GroupSection:
    generators: str = "builtin:schottky"
    margin: Optional[float] = None
    cap: int = 20_000_000
    parabolic: str = ""


@dataclass(frozen=True)
class BasepointSection:
    x: Vector = ()
    y: Vector = ()


@dataclass(frozen=True)
class SweepSection:
    R: float = 12.0
    t_min: float = 0.0
    t_step: float = 0.25
    l_max: float = 8.0
    l_step: float = 0.5
    epsilon: float = 0.05
    t_grid: Vector = (0.0, 2.0, 4.0, 8.0)
    samples: int = 100_000
    bootstrap: int = 200
    schedule: Vector = (0.1, 0.05, 0.02)
    shadow_radius: float = 2.0
    window: Vector = (4.0, 10.0)
    caps: Matrix = ((1.0, 0.0, 1.5707963267948966), (-1.0, 0.0, 1.5707963267948966))
    budget: int = 10_000
    ps_radius: float = 10.0


@dataclass(frozen=True)
class ToleranceSection:
    slope: float = 0.05
    spread: float = 0.5
    ratio_low: float = 0.7
    ratio_high: float = 1.3
    sigma: float = 3.0
    gap: float = 0.3
    shadow_ratio: float = 50.0
    cauchy_shrink: float = 0.3


@dataclass(frozen=True)
class TestSection:
    expected_delta: Optional[float] = None
    phi: str = "ball 0.5"
    psi: str = "ball 0.5"


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with defaults applied."""

    run: RunSection = field(default_factory=RunSection)
    domain: DomainSection = field(default_factory=DomainSection)
    group: GroupSection = field(default_factory=GroupSection)
    basepoints: BasepointSection = field(default_factory=BasepointSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    tolerances: ToleranceSection = field(default_factory=ToleranceSection)
    tests: TestSection = field(default_factory=TestSection)

    @property
    def seed(self) -> int:
        return self.run.seed

    def digest(self) -> str:
        """SHA-256 of the serialized configuration."""
        return hashlib.sha256(serialize_config(self).encode("utf-8")).hexdigest()

    def with_values(self, section: str, **values: Any) -> "RunConfig":
        return replace(self, **{section: replace(getattr(self, section), **values)})


_SECTIONS = {f.name: f.default_factory for f in fields(RunConfig)}


def _parse_vector(text: str) -> Vector:
    return tuple(float(tok) for tok in text.split())


def _parse_matrix(text: str) -> Matrix:
    rows = [row.strip() for row in text.split(";") if row.strip()]
    return tuple(_parse_vector(row) for row in rows)


def _format_float(v: float) -> str:
    return repr(float(v))


def _format_vector(v: Vector) -> str:
    return " ".join(_format_float(x) for x in v)


def _format_matrix(m: Matrix) -> str:
    return "; ".join(_format_vector(row) for row in m)


def _optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none") else float(text)


_PARSERS: Dict[Any, Callable[[str], Any]] = {
    str: lambda s: s.strip(),
    int: lambda s: int(s),
    float: float,
    Optional[float]: _optional_float,
    Vector: _parse_vector,
    Matrix: _parse_matrix,
}

_FORMATTERS: Dict[Any, Callable[[Any], str]] = {
    str: str,
    int: str,
    float: _format_float,
    Optional[float]: lambda v: "none" if v is None else _format_float(v),
    Vector: _format_vector,
    Matrix: _format_matrix,
}


def _locate(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = re.match(r"^\[(.+)\]$", line)
        if header:
            current = header.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        ConfigError: On syntax errors (with the line number), unknown sections
            or keys, and values of the wrong type (naming the key).
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"syntax error: {exc.message.splitlines()[0]}", line=lineno) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(str(exc).splitlines()[0], line=exc.lineno) from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", line=exc.lineno) from exc
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc}") from exc

    sections: Dict[str, Any] = {}
    for name in parser.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]", key=name, line=_locate(text, name))
        default = _SECTIONS[name]()
        types = {f.name: f.type for f in fields(default)}
        values = {}
        for key, raw in parser.items(name):
            if key not in types:
                raise ConfigError(f"unknown key {key!r} in [{name}]", key=key, line=_locate(text, name, key))
            try:
                values[key] = _PARSERS[_resolve(types[key])](raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for {name}.{key}: {raw!r}", key=key,
                                  line=_locate(text, name, key)) from exc
        sections[name] = replace(default, **values)
    config = RunConfig(**sections)
    _validate(config)
    return config


def _resolve(annotation: Any) -> Any:
    if isinstance(annotation, str):
        return {"str": str, "int": int, "float": float, "Optional[float]": Optional[float],
                "Vector": Vector, "Matrix": Matrix}[annotation]
    return annotation


def _validate(config: RunConfig) -> None:
    if config.domain.kind not in ("ellipsoid", "pnorm", "hull"):
        raise ConfigError(f"domain.kind must be ellipsoid, pnorm or hull, got {config.domain.kind!r}", key="kind")
    if config.sweep.R <= 0:
        raise ConfigError("sweep.R must be positive", key="R")
    if config.sweep.t_step <= 0 or config.sweep.l_step <= 0:
        raise ConfigError("sweep steps must be positive", key="t_step")
    if len(config.sweep.window) != 2 or config.sweep.window[0] >= config.sweep.window[1]:
        raise ConfigError("sweep.window needs two increasing values", key="window")
    for cap in config.sweep.caps:
        if len(cap) != config.domain.dimension + 1:
            raise ConfigError("each cap is an axis vector followed by an angle", key="caps")
    if config.group.cap < 1:
        raise ConfigError("group.cap must be positive", key="cap")


def serialize_config(config: RunConfig) -> str:
    """Inverse of parse_config: every key is written, floats in repr form."""
    lines = []
    for name in _SECTIONS:
        section = getattr(config, name)
        lines.append(f"[{name}]")
        for f in fields(section):
            value = _FORMATTERS[_resolve(f.type)](getattr(section, f.name))
            lines.append(f"{f.name} = {value}".rstrip())
        lines.append("")
    return "\n".join(lines)


def load_config(path: Union[str, Path]) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
