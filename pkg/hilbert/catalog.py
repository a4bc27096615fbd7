"""Built-in example groups and the generator file format.

Generator files are plain text: one matrix per block, rows of whitespace
separated decimals, blocks separated by blank lines. A comment line holding a
single word just before a block labels it. Directive comments start with
``#!``: ``#! name <text>``, ``#! free`` and ``#! parabolic <word>``.
"""

import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from .config import DomainSection, RunConfig
from .domains import ConvexDomain, Ellipsoid, OrbitHull, PNormBall
from .errors import ArgumentError, ConfigError
from .groups import GroupPresentation

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"


@dataclass
class GeneratorFile:
    """Parsed contents of a generator file."""

    matrices: List[np.ndarray]
    labels: List[str]
    name: str = "group"
    free: bool = False
    parabolics: List[str] = field(default_factory=list)

    def presentation(self, domain: Optional[ConvexDomain] = None) -> GroupPresentation:
        domain = domain or Ellipsoid.unit_ball(self.matrices[0].shape[0] - 1)
        return GroupPresentation(self.matrices, domain, labels=self.labels, parabolics=self.parabolics,
                                 free=self.free, name=self.name)


def parse_generators(text: str, source: str = "<string>") -> GeneratorFile:
    """Parse generator file text.

    Raises:
        ConfigError: On malformed rows, ragged blocks or bad directives, with the line number.
    """
    matrices: List[np.ndarray] = []
    labels: List[str] = []
    name, free, parabolics = Path(source).stem, False, []
    rows: List[List[float]] = []
    pending_label: Optional[str] = None
    block_start = 0

    def close_block(lineno: int) -> None:
        nonlocal rows, pending_label
        if not rows:
            return
        width = {len(r) for r in rows}
        if len(width) != 1 or len(rows) != width.pop():
            raise ConfigError(f"{source}: matrix block is not square", line=block_start)
        matrices.append(np.array(rows, dtype=float))
        labels.append(pending_label or chr(ord("a") + len(labels)))
        rows = []
        pending_label = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            close_block(lineno)
            continue
        if line.startswith("#!"):
            parts = line[2:].split(None, 1)
            directive = parts[0].lower() if parts else ""
            if directive == "free":
                free = True
            elif directive == "name" and len(parts) == 2:
                name = parts[1].strip()
            elif directive == "parabolic" and len(parts) == 2:
                parabolics.append(parts[1].strip())
            else:
                raise ConfigError(f"{source}: unknown directive {line!r}", key=directive, line=lineno)
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if len(words) == 1 and not rows:
                pending_label = words[0]
            continue
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise ConfigError(f"{source}: cannot parse matrix row {line!r}", line=lineno) from exc
        if not rows:
            block_start = lineno
        rows.append(row)
    close_block(0)
    if not matrices:
        raise ConfigError(f"{source}: no generator matrices found")
    sizes = {m.shape[0] for m in matrices}
    if len(sizes) != 1:
        raise ConfigError(f"{source}: generators have different sizes {sorted(sizes)}")
    return GeneratorFile(matrices, labels, name=name, free=free, parabolics=parabolics)


def read_generators(path: Union[str, Path]) -> GeneratorFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read generator file {path}: {exc}") from exc
    return parse_generators(text, str(path))


def format_generators(group: GroupPresentation) -> str:
    lines = [f"#! name {group.name}"]
    if group.free:
        lines.append("#! free")
    lines.extend(f"#! parabolic {w}" for w in group.parabolics)
    for label, g in zip(group.labels[:group.rank], group.generators[:group.rank]):
        lines.append("")
        lines.append(f"# {label}")
        lines.extend(" ".join(f"{v:.17g}" for v in row) for row in g.matrix)
    return "\n".join(lines) + "\n"


def write_generators(group: GroupPresentation, path: Union[str, Path]) -> None:
    try:
        Path(path).write_text(format_generators(group), encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write generator file {path}: {exc}") from exc


def _packaged(name: str) -> GeneratorFile:
    text = resources.files("hilbert").joinpath("data", f"{name}.gens").read_text(encoding="utf-8")
    return parse_generators(text, f"{name}.gens")


# ---------------------------------------------------------------------------
# Built-in groups on the Klein disk
# ---------------------------------------------------------------------------

def _boost(length: float, axis: int = 1) -> np.ndarray:
    m = np.eye(3)
    m[0, 0] = m[axis, axis] = math.cosh(length)
    m[0, axis] = m[axis, 0] = math.sinh(length)
    return m


def schottky_group() -> GroupPresentation:
    """Rank-2 Schottky group generated by boosts along perpendicular diameters."""
    return _packaged("schottky").presentation()


def modular_group() -> GroupPresentation:
    """Symmetric-square image of the commutator subgroup of the modular group.

    A once-punctured torus group; the commutator abAB is parabolic.
    """
    return _packaged("modular").presentation()


def cyclic_group(length: float = 1.0) -> GroupPresentation:
    """Cyclic group of a boost with translation length `length` along the x-axis."""
    if length <= 0:
        raise ArgumentError("translation length must be positive")
    return GroupPresentation([_boost(length)], Ellipsoid.unit_ball(2), free=True, name=f"cyclic({length:g})")


def triangle_group(p: int = 2, q: int = 3, r: int = 7) -> GroupPresentation:
    """Orientation-preserving (p, q, r) triangle group on the Klein disk.

    Generators are products of reflections in the sides: a has order p, b has
    order q and ab has order r. The group is conjugated so that the origin is
    the centroid of the triangle's vertices, a point with trivial stabilizer.
    """
    if min(p, q, r) < 2 or 1.0 / p + 1.0 / q + 1.0 / r >= 1.0:
        raise ArgumentError(f"({p}, {q}, {r}) is not a hyperbolic triangle")
    J = np.diag([-1.0, 1.0, 1.0])
    cp, cq, cr = (math.cos(math.pi / m) for m in (p, q, r))
    gram = np.array([[1.0, -cp, -cr], [-cp, 1.0, -cq], [-cr, -cq, 1.0]])
    vals, vecs = np.linalg.eigh(gram)
    # columns of E are side normals with E^T J E = gram
    E = np.sqrt(np.abs(vals))[:, None] * vecs.T
    reflections = [np.eye(3) - 2.0 * np.outer(E[:, i], J @ E[:, i]) for i in range(3)]

    def vertex(i: int, j: int) -> np.ndarray:
        v = J @ np.cross(E[:, i], E[:, j])
        v = v / math.sqrt(-(v @ J @ v))
        return v if v[0] > 0 else -v

    c = vertex(0, 1) + vertex(1, 2) + vertex(0, 2)
    c = c / math.sqrt(-(c @ J @ c))
    w = c[1:]
    boost = np.empty((3, 3))
    boost[0, 0] = c[0]
    boost[0, 1:] = w
    boost[1:, 0] = w
    boost[1:, 1:] = np.eye(2) + np.outer(w, w) / (1.0 + c[0])
    unboost = J @ boost.T @ J
    a = unboost @ reflections[0] @ reflections[1] @ boost
    b = unboost @ reflections[1] @ reflections[2] @ boost
    return GroupPresentation([a, b], Ellipsoid.unit_ball(2), name=f"triangle({p},{q},{r})")


BUILTIN_GROUPS: Dict[str, Callable[[], GroupPresentation]] = {
    "schottky": schottky_group,
    "modular": modular_group,
    "cyclic": cyclic_group,
    "triangle237": lambda: triangle_group(2, 3, 7),
}


def builtin_group(name: str) -> GroupPresentation:
    """A catalog group by name; `triangle(p,q,r)` builds any hyperbolic triangle group."""
    key = name.strip().lower()
    if key.startswith("triangle(") and key.endswith(")"):
        try:
            p, q, r = (int(tok) for tok in key[len("triangle("):-1].split(","))
        except ValueError as exc:
            raise ArgumentError(f"cannot parse triangle group {name!r}") from exc
        return triangle_group(p, q, r)
    if key.startswith("cyclic(") and key.endswith(")"):
        try:
            length = float(key[len("cyclic("):-1])
        except ValueError as exc:
            raise ArgumentError(f"cannot parse cyclic group {name!r}") from exc
        return cyclic_group(length)
    try:
        factory = BUILTIN_GROUPS[key]
    except KeyError as exc:
        raise ArgumentError(f"unknown builtin group {name!r}; known: {', '.join(sorted(BUILTIN_GROUPS))}") from exc
    return factory()


def load_group(source: str, domain: Optional[ConvexDomain] = None) -> GroupPresentation:
    """Load `builtin:<name>` from the catalog or a generator file path."""
    if source.startswith(BUILTIN_PREFIX):
        group = builtin_group(source[len(BUILTIN_PREFIX):])
        if domain is not None and domain is not group.domain:
            group = GroupPresentation(group.generators[:group.rank], domain, labels=group.labels[:group.rank],
                                      parabolics=group.parabolics, free=group.free, name=group.name)
        return group
    logger.info("reading generators from %s", source)
    return read_generators(source).presentation(domain)


def build_domain(section: DomainSection, group: Optional[GroupPresentation] = None) -> ConvexDomain:
    """Domain described by a [domain] config section.

    A hull is the orbit of boundary samples of the unit ball under words of
    length <= hull_depth, so it needs the group.
    """
    n = section.dimension
    if section.kind == "ellipsoid":
        Q = np.array(section.matrix, dtype=float) if section.matrix else np.eye(n)
        center = section.center or None
        return Ellipsoid(Q, center)
    if section.kind == "pnorm":
        return PNormBall(section.exponent, section.radius, n)
    if section.kind == "hull":
        if group is None:
            raise ConfigError("a hull domain needs a group", key="kind")
        seeds = 0.999 * Ellipsoid.unit_ball(n).sample_boundary(8 * n)
        return OrbitHull.from_orbit(group.generators, seeds, section.hull_depth)
    raise ConfigError(f"unknown domain kind {section.kind!r}", key="kind")


def group_from_config(config: RunConfig) -> GroupPresentation:
    """Group named by the [group] section acting on the configured domain."""
    if config.domain.kind == "hull":
        seed_group = load_group(config.group.generators)
        group = load_group(config.group.generators, build_domain(config.domain, seed_group))
    else:
        group = load_group(config.group.generators, build_domain(config.domain))
    if config.group.parabolic:
        group.parabolics = [w for w in config.group.parabolic.replace(",", " ").split() if w]
        for word in group.parabolics:
            group.parse(word)
    return group
