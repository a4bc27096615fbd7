"""Brute-force reference computations used to check the fast paths.

These are deliberately slow: unpruned word enumeration, a cyclic-word census
over every reduced word, and closed-form distances on the Klein disk.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .domains import Ellipsoid
from .errors import ArgumentError
from .groups import GroupPresentation, enumerate_orbit_ball, enumerate_primitive_geodesics
from .metric import hilbert_distance_many

logger = logging.getLogger(__name__)

KLEIN_TOLERANCE = 1e-10


@dataclass
class OracleReport:
    name: str
    passed: bool
    summary: str
    details: Dict[str, Any] = field(default_factory=dict)


def _reduced_words(group: GroupPresentation, max_letters: int):
    """Depth-first (word, matrix) over freely reduced words, identity first."""
    r2 = 2 * group.rank
    stack: List[Tuple[Tuple[int, ...], np.ndarray]] = [((), np.eye(group.domain.dimension + 1))]
    while stack:
        word, m = stack.pop()
        yield word, m
        if len(word) == max_letters:
            continue
        back = group.inverse_index(word[-1]) if word else -1
        for j in range(r2 - 1, -1, -1):
            if j != back:
                stack.append((word + (j,), m @ group.matrices[j]))


def _matrix_key(m: np.ndarray) -> Tuple[int, ...]:
    flat = m.ravel() / np.linalg.norm(m)
    pivot = flat[np.argmax(np.abs(flat))]
    return tuple(np.rint(flat * np.sign(pivot) * 1e6).astype(np.int64).tolist())


def ball_words(group: GroupPresentation, radius: float, max_letters: int,
               basepoint: Optional[np.ndarray] = None) -> OracleReport:
    """Compare the pruned ball with every reduced word of up to `max_letters` letters.

    Every element the unpruned search finds within the radius must be in the
    pruned ball; the counts agree once max_letters covers the ball.
    """
    domain = group.domain
    o = domain.center if basepoint is None else np.asarray(basepoint, dtype=float)
    o_h = domain.lift(o)
    found = set()
    for _, m in _reduced_words(group, max_letters):
        img = domain.chart.project((m @ o_h)[None, :])
        if domain.distance_many(o[None, :], img)[0] <= radius:
            found.add(_matrix_key(m))
    ball = enumerate_orbit_ball(group, o, radius)
    pruned = {_matrix_key(ball.matrix(int(i))) for i in ball.within(radius)}
    missing = found - pruned
    passed = not missing and len(pruned) == len(found)
    summary = f"unpruned {len(found)} elements, pruned {len(pruned)}, missing {len(missing)}"
    logger.info("ball-words oracle for %s within %g: %s", group.name, radius, summary)
    return OracleReport("ball-words", passed, summary,
                        {"unpruned": len(found), "pruned": len(pruned), "missing": len(missing)})


def _least_rotation(word: Tuple[int, ...]) -> Tuple[int, ...]:
    return min(word[i:] + word[:i] for i in range(len(word)))


def _is_proper_power(word: Tuple[int, ...]) -> bool:
    n = len(word)
    return any(n % p == 0 and word == word[:p] * (n // p) for p in range(1, n))


def _translation_length(m: np.ndarray) -> float:
    mods = np.sort(np.abs(np.linalg.eigvals(m)))
    return 0.5 * math.log(mods[-1] / mods[0])


def letter_bound(group: GroupPresentation, max_length: float, short_letters: int = 3, slack: int = 2) -> int:
    """Word-length bound for a brute-force census up to `max_length`, independent of any census.

    The smallest translation length per letter over cyclically reduced
    hyperbolic words of at most `short_letters` letters sets the rate; the
    bound is ceil(max_length / rate) + slack.

    Raises:
        ArgumentError: If max_length <= 0 or no short word is hyperbolic.
    """
    if max_length <= 0:
        raise ArgumentError("max_length must be positive")
    rate = math.inf
    for word, m in _reduced_words(group, short_letters):
        if not word or (len(word) > 1 and word[0] == group.inverse_index(word[-1])):
            continue
        ell = _translation_length(m)
        if ell > 1e-9:
            rate = min(rate, ell / len(word))
    if not math.isfinite(rate):
        raise ArgumentError(f"no hyperbolic word of at most {short_letters} letters in {group.name}")
    return int(math.ceil(max_length / rate - 1e-9)) + slack


def cyclic_word_lengths(group: GroupPresentation, max_length: float, max_letters: int) -> List[float]:
    """Lengths of primitive classes with length <= max_length, one per cyclic word.

    Every freely and cyclically reduced word up to `max_letters` letters is
    visited; conjugacy classes are cyclic words, proper powers are dropped.
    Valid for free presentations.
    """
    classes: Dict[Tuple[int, ...], float] = {}
    for word, m in _reduced_words(group, max_letters):
        if not word or (len(word) > 1 and word[0] == group.inverse_index(word[-1])):
            continue
        canon = _least_rotation(word)
        if canon in classes or _is_proper_power(canon):
            continue
        ell = _translation_length(m)
        if 1e-9 < ell <= max_length:
            classes[canon] = ell
    return sorted(classes.values())


def cyclic_words(group: GroupPresentation, max_length: float, max_letters: int,
                 census_lengths: Optional[List[float]] = None) -> OracleReport:
    """Compare a census of primitive lengths against the brute-force cyclic-word count."""
    reference = cyclic_word_lengths(group, max_length, max_letters)
    if census_lengths is None:
        census_lengths = [g.length for g in enumerate_primitive_geodesics(group, max_length, method="words")]
    census = sorted(census_lengths)
    passed = len(census) == len(reference) and np.allclose(census, reference, atol=1e-9)
    summary = f"census {len(census)} classes, brute force {len(reference)} classes up to length {max_length:g}"
    logger.info("cyclic-words oracle for %s: %s", group.name, summary)
    return OracleReport("cyclic-words", bool(passed), summary,
                        {"census": len(census), "reference": len(reference)})


def klein_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hyperbolic distance between rows of Klein-model points, via the Poincare ball."""
    def to_poincare(p: np.ndarray) -> np.ndarray:
        return p / (1.0 + np.sqrt(1.0 - np.einsum("ij,ij->i", p, p)))[:, None]

    a, b = to_poincare(np.atleast_2d(x)), to_poincare(np.atleast_2d(y))
    gap = np.linalg.norm(a - b, axis=1)
    scale = np.sqrt((1.0 - np.einsum("ij,ij->i", a, a)) * (1.0 - np.einsum("ij,ij->i", b, b)))
    return 2.0 * np.arcsinh(gap / scale)


def klein(pairs: int = 1000, seed: int = 0, dimension: int = 2, max_radius: float = 0.95) -> OracleReport:
    """Hilbert distance on the unit ball against the closed-form hyperbolic distance."""
    rng = np.random.default_rng(seed)
    domain = Ellipsoid.unit_ball(dimension)

    def sample(count: int) -> np.ndarray:
        v = rng.normal(size=(count, dimension))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return v * (max_radius * rng.random(count) ** (1.0 / dimension))[:, None]

    xs, ys = sample(pairs), sample(pairs)
    err = np.abs(hilbert_distance_many(domain, xs, ys) - klein_distance(xs, ys))
    worst = float(err.max())
    summary = f"{pairs} pairs, largest deviation {worst:.3g}"
    logger.info("Klein oracle: %s", summary)
    return OracleReport("klein", worst <= KLEIN_TOLERANCE, summary, {"pairs": pairs, "max_error": worst})
