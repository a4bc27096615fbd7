"""Finitely generated groups of domain automorphisms.

Orbit balls are enumerated breadth-first over freely reduced words, pruned by
displacement from the basepoint and deduplicated by hashed canonical matrices.
Closed geodesics are found either from cyclically reduced words (free
presentations) or by walking axes through a Dirichlet domain.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .boundary import closest_line_points, line_distance_many
from .domains import ConvexDomain, Ellipsoid, PointLike, preservation_diagnostic, spread_directions
from .errors import ArgumentError, DomainError, ElementaryGroupError, NumericalError, ResourceError
from .metric import chord_times, footpoint_coords, ray_points
from .projective import (HomogeneousPoint, IsometryType, ProjectiveTransform, SpectralData, classify,
                         spectral_batch)
from .settings import thread_count

logger = logging.getLogger(__name__)

DEFAULT_CAP = 20_000_000
DEDUP_QUANTUM = 1e-9
PRESERVATION_TOLERANCE = 1e-9
CHUNK_SIZE = 20_000
MAX_WORD_LENGTH = 24
NONCOMPACT_FRACTION = 0.8
CORE_LIMIT_BUDGET = 400

_HASH_RNG = np.random.default_rng(0x5EED)
_HASH_MULTIPLIERS = (_HASH_RNG.integers(1, 2 ** 62, size=64, dtype=np.int64) * 2 + 1).astype(np.uint64)
_SIGN_WEIGHTS = _HASH_RNG.random(64) + 0.5


# ---------------------------------------------------------------------------
# Presentations and elements
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GroupElement:
    """A group element: a word in the generators and its normalized matrix."""

    word: Tuple[int, ...]
    matrix: ProjectiveTransform
    displacement: Optional[float] = None

    @cached_property
    def spectral(self) -> SpectralData:
        return classify(self.matrix)

    @property
    def kind(self) -> IsometryType:
        return self.spectral.kind

    @property
    def translation_length(self) -> float:
        return self.spectral.translation_length

    @property
    def attracting(self) -> Optional[HomogeneousPoint]:
        return self.spectral.attracting

    @property
    def repelling(self) -> Optional[HomogeneousPoint]:
        return self.spectral.repelling

    @property
    def lambda_one(self) -> float:
        return self.spectral.lambda_one

    @property
    def is_identity(self) -> bool:
        return len(self.word) == 0


class GroupPresentation:
    """Generators of a group acting on a convex domain, closed under inverses.

    Generator i has inverse i + rank. Labels are single letters; the inverse of
    a generator is labelled by the swapped-case letter.

    Args:
        generators: Matrices or ProjectiveTransforms, without inverses.
        domain: The preserved domain.
        labels: One letter per generator (default a, b, c, ...).
        parabolics: Words (over the labels) marking parabolic subgroups.
        free: True when reduced words are known to be distinct elements.
        name: Display name.

    Raises:
        DomainError: If a generator fails the sampled preservation check.
    """

    def __init__(self, generators: Sequence, domain: ConvexDomain, labels: Optional[Sequence[str]] = None,
                 parabolics: Sequence[str] = (), free: bool = False, name: str = "group"):
        gens = [g if isinstance(g, ProjectiveTransform) else ProjectiveTransform(g) for g in generators]
        if not gens:
            raise ArgumentError("a presentation needs at least one generator")
        size = domain.dimension + 1
        for g in gens:
            if g.size != size:
                raise ArgumentError(f"generator has size {g.size}, domain needs {size}")
        labels = list(labels) if labels is not None else [chr(ord("a") + i) for i in range(len(gens))]
        if len(labels) != len(gens):
            raise ArgumentError("one label per generator is required")
        for label in labels:
            if len(label) != 1 or not label.isalpha() or label.swapcase() in labels:
                raise ArgumentError(f"invalid generator label {label!r}")
        self.domain = domain
        self.name = name
        self.free = free
        self.rank = len(gens)
        for label, g in zip(labels, gens):
            self._check_preserves(label, g)
        self.generators: List[ProjectiveTransform] = gens + [g.inverse() for g in gens]
        self.labels: List[str] = labels + [label.swapcase() for label in labels]
        self.matrices = np.stack([g.matrix for g in self.generators])
        self.parabolics = list(parabolics)
        for word in self.parabolics:
            self.parse(word)

    def _check_preserves(self, label: str, g: ProjectiveTransform) -> None:
        if self.domain.approximate:
            logger.warning("skipping preservation check of %s on an approximate domain", label)
            return
        report = preservation_diagnostic(g, self.domain, samples=64)
        if not report.passed(PRESERVATION_TOLERANCE):
            raise DomainError(f"generator {label} does not preserve the domain "
                              f"(boundary residual {report.boundary_residual:.3g}, "
                              f"{report.interior_failures} interior failures)")

    @property
    def expects_parabolics(self) -> bool:
        return bool(self.parabolics)

    def inverse_index(self, i: int) -> int:
        return (i + self.rank) % (2 * self.rank)

    def parse(self, text: str) -> Tuple[int, ...]:
        """Generator indices of a word written in the labels."""
        lookup = {label: i for i, label in enumerate(self.labels)}
        try:
            return tuple(lookup[ch] for ch in text.strip())
        except KeyError as exc:
            raise ArgumentError(f"unknown generator {exc.args[0]!r} in word {text!r}") from exc

    def format_word(self, word: Sequence[int]) -> str:
        return "".join(self.labels[i] for i in word) or "1"

    def reduce_word(self, word: Sequence[int]) -> Tuple[int, ...]:
        """Freely reduce a word by cancelling adjacent inverse letters."""
        stack: List[int] = []
        for i in word:
            if stack and stack[-1] == self.inverse_index(i):
                stack.pop()
            else:
                stack.append(i)
        return tuple(stack)

    def element(self, word: Sequence[int]) -> GroupElement:
        m = np.eye(self.domain.dimension + 1)
        for i in word:
            m = m @ self.matrices[i]
        return GroupElement(tuple(word), ProjectiveTransform._trusted(m))

    def word(self, text: str) -> GroupElement:
        return self.element(self.parse(text))

    def identity(self) -> GroupElement:
        return self.element(())

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return GroupElement(self.reduce_word(g.word + h.word), g.matrix @ h.matrix)

    def inverse(self, g: GroupElement) -> GroupElement:
        word = tuple(self.inverse_index(i) for i in reversed(g.word))
        return GroupElement(word, g.matrix.inverse())

    def generator_displacements(self, basepoint: Optional[PointLike] = None) -> np.ndarray:
        o = self.domain.center if basepoint is None else self.domain.require_interior(basepoint, "basepoint")
        return self.domain.orbit_displacements(o, self.matrices)

    def subgroup(self, words: Sequence[str], name: Optional[str] = None) -> "GroupPresentation":
        """Presentation of the subgroup generated by the given words."""
        if not words:
            raise ArgumentError("a subgroup needs at least one generating word")
        mats = [self.word(w).matrix for w in words]
        return GroupPresentation(mats, self.domain, free=len(words) == 1,
                                 name=name or f"<{', '.join(words)}>")

    def __repr__(self) -> str:
        return f"GroupPresentation({self.name!r}, rank={self.rank}, domain={self.domain!r})"


# ---------------------------------------------------------------------------
# Dedup keys
# ---------------------------------------------------------------------------

def canonical_matrices(matrices: np.ndarray) -> np.ndarray:
    """Scale each matrix to unit Frobenius norm with a fixed sign convention."""
    m = np.asarray(matrices, dtype=float)
    flat = m.reshape(len(m), -1)
    flat = flat / np.linalg.norm(flat, axis=1, keepdims=True)
    sign = np.sign(flat @ _SIGN_WEIGHTS[:flat.shape[1]])
    sign[sign == 0] = 1.0
    return flat * sign[:, None]


def dedup_keys(matrices: np.ndarray, offset: float = 0.0) -> np.ndarray:
    """64-bit hashes of canonical matrices quantized at 1e-9.

    A second call with offset 0.5 gives the half-shifted grid; matching on
    either grid catches pairs split by a rounding boundary.
    """
    canon = canonical_matrices(matrices)
    q = np.floor(canon / DEDUP_QUANTUM + 0.5 + offset).astype(np.int64).astype(np.uint64)
    h = (q * _HASH_MULTIPLIERS[:q.shape[1]]).sum(axis=1, dtype=np.uint64)
    return h ^ (h >> np.uint64(29))


class _KeySet:
    """Sorted arrays of seen keys on the two quantization grids."""

    def __init__(self):
        self.a = np.zeros(0, dtype=np.uint64)
        self.b = np.zeros(0, dtype=np.uint64)

    def filter_new(self, mats: np.ndarray) -> np.ndarray:
        """Indices of matrices not yet seen, first occurrence kept; registers them."""
        if len(mats) == 0:
            return np.zeros(0, dtype=int)
        ka = dedup_keys(mats)
        kb = dedup_keys(mats, 0.5)
        fresh = ~(_sorted_contains(self.a, ka) | _sorted_contains(self.b, kb))
        idx = np.flatnonzero(fresh)
        _, first = np.unique(ka[idx], return_index=True)
        idx = idx[np.sort(first)]
        _, first = np.unique(kb[idx], return_index=True)
        idx = idx[np.sort(first)]
        self.a = np.sort(np.concatenate([self.a, ka[idx]]), kind="stable")
        self.b = np.sort(np.concatenate([self.b, kb[idx]]), kind="stable")
        return idx

    def contains(self, mats: np.ndarray) -> np.ndarray:
        return (_sorted_contains(self.a, dedup_keys(mats))
                | _sorted_contains(self.b, dedup_keys(mats, 0.5)))


def _sorted_contains(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, len(sorted_keys) - 1)
    return sorted_keys[pos] == keys


# ---------------------------------------------------------------------------
# Orbit balls
# ---------------------------------------------------------------------------

class OrbitBall:
    """Array-backed result of a breadth-first orbit enumeration.

    Elements are stored in discovery order with parent pointers; `order` sorts
    them by displacement d(basepoint, g.target).
    """

    def __init__(self, group: GroupPresentation, basepoint: np.ndarray, target: np.ndarray, radius: float,
                 parents: np.ndarray, letters: np.ndarray, displacements: np.ndarray,
                 matrices: Optional[np.ndarray]):
        self.group = group
        self.basepoint = basepoint
        self.target = target
        self.radius = radius
        self.parents = parents
        self.letters = letters
        self.displacements = displacements
        self.matrices = matrices
        self.order = np.argsort(displacements, kind="stable")
        self.sorted_displacements = displacements[self.order]

    def __len__(self) -> int:
        return self.count_within(self.radius)

    def count_within(self, t: float) -> int:
        return int(np.searchsorted(self.sorted_displacements, t, side="right"))

    def counts(self, ts: Sequence[float]) -> np.ndarray:
        return np.searchsorted(self.sorted_displacements, np.asarray(ts, dtype=float), side="right")

    def within(self, t: Optional[float] = None) -> np.ndarray:
        """Element indices with displacement <= t, sorted by displacement."""
        t = self.radius if t is None else t
        return self.order[:self.count_within(t)]

    def word(self, i: int) -> Tuple[int, ...]:
        out = []
        while self.parents[i] >= 0:
            out.append(int(self.letters[i]))
            i = int(self.parents[i])
        return tuple(reversed(out))

    def matrix(self, i: int) -> np.ndarray:
        if self.matrices is not None:
            return self.matrices[i]
        return self.group.element(self.word(i)).matrix.matrix

    def matrices_of(self, indices: np.ndarray) -> np.ndarray:
        if self.matrices is not None:
            return self.matrices[indices]
        return np.stack([self.matrix(int(i)) for i in indices])

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.word(i), ProjectiveTransform._trusted(self.matrix(i)),
                            float(self.displacements[i]))

    def elements(self, t: Optional[float] = None) -> List[GroupElement]:
        return [self.element(int(i)) for i in self.within(t)]


def _expand(group: GroupPresentation, mats: np.ndarray, last: np.ndarray, base: np.ndarray,
            target: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    r2 = 2 * group.rank
    prods = mats[:, None, :, :] @ group.matrices[None, :, :, :]
    parent = np.repeat(np.arange(len(mats)), r2)
    letter = np.tile(np.arange(r2), len(mats))
    back = np.where(last >= 0, (last + group.rank) % r2, -1)
    allowed = letter != np.repeat(back, r2)
    prods = prods.reshape(-1, *mats.shape[1:])[allowed]
    disp = group.domain.orbit_displacements(base, prods, target)
    return parent[allowed], letter[allowed], prods, disp


def enumerate_orbit_ball(group: GroupPresentation, basepoint: Optional[PointLike] = None, radius: float = 0.0,
                         target: Optional[PointLike] = None, margin: Optional[float] = None,
                         cap: int = DEFAULT_CAP, keep_matrices: bool = True, dedup: Optional[bool] = None,
                         max_word_length: Optional[int] = None, budget: Optional[int] = None) -> OrbitBall:
    """Breadth-first enumeration of group elements g with d(basepoint, g.target) <= radius.

    Words are extended letter by letter and pruned once their displacement
    exceeds radius + margin, so completeness rests on the margin (default twice
    the largest generator displacement).

    Args:
        group: The presentation.
        basepoint: Interior point o (default: domain center).
        radius: Ball radius t >= 0; may be infinite when a word length or budget bound is set.
        target: Orbit point y (default: o).
        margin: Pruning slack above the radius.
        cap: Maximum number of stored elements.
        keep_matrices: Store every matrix (otherwise only words are kept).
        dedup: Deduplicate by hashed matrices; defaults to True unless the group is free.
        max_word_length: Stop after this many BFS levels.
        budget: Stop once this many elements are stored (BFS order).

    Raises:
        ArgumentError: If radius < 0.
        ResourceError: If more than `cap` elements are found.
    """
    if radius < 0:
        raise ArgumentError("radius must be nonnegative")
    domain = group.domain
    o = domain.center if basepoint is None else domain.require_interior(basepoint, "basepoint")
    y = o if target is None else domain.require_interior(target, "target")
    if np.isinf(radius) and max_word_length is None and budget is None:
        raise ArgumentError("an infinite radius needs a word length or element budget")
    if margin is None:
        margin = 2.0 * float(np.max(group.generator_displacements(o)))
    offset = float(domain.distance_many(o[None, :], y[None, :])[0])
    limit = radius + margin + offset
    dedup = (not group.free) if dedup is None else dedup
    k = domain.dimension + 1

    ident = np.eye(k)[None, :, :]
    parents = [np.array([-1])]
    letters = [np.array([-1])]
    disps = [np.array([offset])]
    stored = [ident] if keep_matrices else []
    seen = _KeySet()
    if dedup:
        seen.filter_new(ident)
    frontier = ident
    frontier_idx = np.array([0])
    frontier_last = np.array([-1])
    total = 1
    level = 0
    workers = thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while len(frontier) and (max_word_length is None or level < max_word_length):
            if budget is not None and total >= budget:
                break
            level += 1
            starts = range(0, len(frontier), CHUNK_SIZE)
            parts = list(pool.map(
                lambda s: _expand(group, frontier[s:s + CHUNK_SIZE], frontier_last[s:s + CHUNK_SIZE], o, y),
                starts))
            parent = np.concatenate([p[0] + s for p, s in zip(parts, starts)])
            letter = np.concatenate([p[1] for p in parts])
            mats = np.concatenate([p[2] for p in parts])
            disp = np.concatenate([p[3] for p in parts])
            keep = np.flatnonzero(disp <= limit)
            if dedup:
                keep = keep[seen.filter_new(mats[keep])]
            if budget is not None:
                keep = keep[:max(0, budget - total)]
            new_idx = np.arange(total, total + len(keep))
            parents.append(frontier_idx[parent[keep]])
            letters.append(letter[keep])
            disps.append(disp[keep])
            if keep_matrices:
                stored.append(mats[keep])
            total += len(keep)
            logger.debug("level %d: %d new elements, %d total", level, len(keep), total)
            if total > cap:
                raise ResourceError(f"orbit enumeration exceeded the cap of {cap} elements", cap=cap)
            frontier = mats[keep]
            frontier_idx = new_idx
            frontier_last = letter[keep]
    logger.info("enumerated %d elements of %s within %.3g (+%.3g margin)", total, group.name, radius, margin)
    return OrbitBall(group, o, y, radius, np.concatenate(parents), np.concatenate(letters).astype(np.int16),
                     np.concatenate(disps), np.concatenate(stored) if keep_matrices else None)


def enumerate_metric_ball(group: GroupPresentation, basepoint: Optional[PointLike] = None, radius: float = 0.0,
                          **kwargs) -> List[GroupElement]:
    """All distinct elements g with d(o, g o) <= radius, sorted by displacement."""
    ball = enumerate_orbit_ball(group, basepoint, radius, **kwargs)
    return ball.elements(radius)


# ---------------------------------------------------------------------------
# Limit sets
# ---------------------------------------------------------------------------

def dedup_points(points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Drop later points within `tol` (max norm) of an earlier one."""
    pts = np.atleast_2d(points)
    if len(pts) < 2:
        return pts
    pairs = cKDTree(pts).query_pairs(tol, p=np.inf, output_type="ndarray")
    drop = np.zeros(len(pts), dtype=bool)
    drop[pairs.max(axis=1)] = True
    return pts[~drop]


def limit_set_sample(group: GroupPresentation, budget: int) -> List[HomogeneousPoint]:
    """Attracting fixed points of hyperbolic elements among the first `budget` words.

    Raises:
        ElementaryGroupError: If no hyperbolic element is found.
    """
    if budget < 2:
        raise ArgumentError("budget must be at least 2")
    ball = enumerate_orbit_ball(group, radius=np.inf, budget=budget, margin=0.0)
    mats = ball.matrices
    batch = spectral_batch(mats)
    hyp = batch.hyperbolic
    if not np.any(hyp):
        raise ElementaryGroupError(f"no hyperbolic element among the first {budget} elements of {group.name}")
    pts = dedup_points(group.domain.chart.project(batch.attracting[hyp]))
    if len(pts) <= 2:
        logger.warning("%s looks elementary: %d limit points found", group.name, len(pts))
    return [group.domain.point(p) for p in pts]


def limit_set_affine(group: GroupPresentation, budget: int) -> np.ndarray:
    return np.array([group.domain.affine(p) for p in limit_set_sample(group, budget)])


# ---------------------------------------------------------------------------
# Dirichlet reduction
# ---------------------------------------------------------------------------

class DirichletReducer:
    """Moves points into the Dirichlet domain of a basepoint.

    The reduction set is the enumerated ball of radius twice the current
    diameter estimate (initially the largest generator displacement).
    """

    def __init__(self, group: GroupPresentation, basepoint: Optional[PointLike] = None,
                 diameter: Optional[float] = None, cap: int = DEFAULT_CAP, max_iterations: int = 1000):
        self.group = group
        self.domain = group.domain
        self.basepoint = self.domain.center if basepoint is None else self.domain.require_interior(basepoint)
        self.cap = cap
        self.max_iterations = max_iterations
        if diameter is None:
            diameter = float(np.max(group.generator_displacements(self.basepoint)))
        self.diameter_estimate = diameter
        self.enlarged = False
        self.support = "domain"
        self._build(2.0 * diameter)

    def _build(self, radius: float) -> None:
        ball = enumerate_orbit_ball(self.group, self.basepoint, radius, cap=self.cap)
        idx = [int(i) for i in ball.within(radius) if ball.parents[i] >= 0]
        self.radius = radius
        self.elements = [ball.element(i) for i in idx]
        self.matrices = np.stack([e.matrix.matrix for e in self.elements])
        inverses = np.linalg.inv(self.matrices)
        o_h = self.domain.lift(self.basepoint)
        self._o_h = o_h
        self._centers_h = inverses @ o_h
        self._centers = self.domain.chart.project(self._centers_h)
        logger.info("Dirichlet reduction set: %d elements within %.3g", len(self.elements), radius)

    def set_distances(self, points: np.ndarray) -> np.ndarray:
        """d(o, s x) for every point x (rows) and reduction element s (columns)."""
        pts = np.atleast_2d(points)
        if isinstance(self.domain, Ellipsoid):
            xh = self.domain.lift(pts)
            jx = xh @ self.domain.form
            q_o = -self.domain.quadratic(self._o_h)[0]
            q_x = -np.einsum("ij,ij->i", jx, xh)
            cosh = np.abs(jx @ self._centers_h.T) / np.sqrt(q_o * q_x)[:, None]
            out = np.arccosh(np.maximum(cosh, 1.0))
            near = cosh < 2.0
            if np.any(near):
                rows, cols = np.nonzero(near)
                out[rows, cols] = self.domain.distance_many(pts[rows], self._centers[cols])
            return out
        out = np.empty((len(pts), len(self._centers)))
        for j, c in enumerate(self._centers):
            out[:, j] = self.domain.distance_many(np.broadcast_to(c, pts.shape), pts)
        return out

    def base_distances(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return self.domain.distance_many(np.broadcast_to(self.basepoint, pts.shape), pts)

    def reduce_many(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Reduce rows of affine points; returns (reduced points, applied matrices)."""
        x = np.array(np.atleast_2d(points), dtype=float)
        k = self.domain.dimension + 1
        applied = np.broadcast_to(np.eye(k), (len(x), k, k)).copy()
        active = np.arange(len(x))
        for _ in range(self.max_iterations):
            if len(active) == 0:
                return x, applied
            d0 = self.base_distances(x[active])
            dist = self.set_distances(x[active])
            best = np.argmin(dist, axis=1)
            better = dist[np.arange(len(active)), best] < d0 - 1e-12
            if not np.any(better):
                return x, applied
            rows = active[better]
            mats = self.matrices[best[better]]
            xh = self.domain.lift(x[rows])
            x[rows] = self.domain.chart.project(np.einsum("ijk,ik->ij", mats, xh))
            applied[rows] = mats @ applied[rows]
            active = rows
        raise ResourceError(f"Dirichlet reduction did not settle after {self.max_iterations} steps "
                            f"(reduction radius {self.radius:.3g})", cap=self.max_iterations)

    def reduce(self, x: PointLike) -> Tuple[np.ndarray, GroupElement]:
        """Reduce one point; returns (x', gamma) with x' = gamma x."""
        pt = self.domain.require_interior(x, "x").copy()
        word: Tuple[int, ...] = ()
        matrix = np.eye(self.domain.dimension + 1)
        for _ in range(self.max_iterations):
            d0 = self.base_distances(pt)[0]
            dist = self.set_distances(pt)[0]
            j = int(np.argmin(dist))
            if not dist[j] < d0 - 1e-12:
                break
            s = self.elements[j]
            pt = self.domain.chart.project(s.matrix.matrix @ self.domain.lift(pt))
            word = s.word + word
            matrix = s.matrix.matrix @ matrix
        else:
            raise ResourceError(f"Dirichlet reduction did not settle after {self.max_iterations} steps",
                                cap=self.max_iterations)
        return pt, GroupElement(self.group.reduce_word(word), ProjectiveTransform._trusted(matrix))

    def is_reduced_many(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(points)
        return self.base_distances(pts) <= self.set_distances(pts).min(axis=1) + tol

    def _domain_samples(self, count: int, depth: float, rng: np.random.Generator) -> np.ndarray:
        dirs = spread_directions(self.domain.dimension, count)
        o = self.basepoint
        exits = self.domain.exit_points(np.broadcast_to(o, dirs.shape).copy(), dirs)
        radii = rng.uniform(0.0, depth, size=len(dirs))
        return np.concatenate([ray_points(self.domain, o, e, np.array([r])) for e, r in zip(exits, radii)])

    def _core_samples(self, count: int, depth: float, rng: np.random.Generator) -> np.ndarray:
        """Points on geodesics joining sampled limit points, within `depth` of their closest approach to o."""
        limit = limit_set_affine(self.group, CORE_LIMIT_BUDGET)
        if len(limit) < 2:
            raise ResourceError("the convex core needs at least two limit points", cap=CORE_LIMIT_BUDGET)
        i = rng.integers(0, len(limit), size=count)
        j = (i + rng.integers(1, len(limit), size=count)) % len(limit)
        starts, ends = limit[i], limit[j]
        near = closest_line_points(self.domain, starts, ends, self.basepoint)
        times = chord_times(starts, ends, near) + rng.uniform(-depth, depth, size=count)
        return footpoint_coords(starts, ends, times)

    def measure_diameter(self, samples: int = 2000, depth: Optional[float] = None, seed: int = 0,
                         support: str = "auto") -> float:
        """Largest d(o, x') over reduced sample points.

        With support "domain", samples lie at uniform Hilbert radius up to
        `depth` along spread directions. With support "core", they lie on
        geodesics between limit points, so only the part of the Dirichlet
        domain meeting the convex core is measured. "auto" starts with the
        domain and switches to the core when reduced samples still reach the
        sampling depth (funnels or cusps). If the measurement exceeds the
        estimate, the reduction set is rebuilt once at twice the measured
        value and the measurement repeated.

        Raises:
            ResourceError: With support "domain" when the domain looks non-compact.
            ArgumentError: On an unknown support.
        """
        if support not in ("auto", "domain", "core"):
            raise ArgumentError(f"unknown diameter support {support!r}")
        rng = np.random.default_rng(seed)
        depth = 4.0 * self.diameter_estimate + 2.0 if depth is None else depth
        if support != "core":
            pts = self._domain_samples(samples, depth, rng)
            measured = float(np.max(self.base_distances(self.reduce_many(pts)[0])))
            if measured >= NONCOMPACT_FRACTION * depth:
                if support == "domain":
                    raise ResourceError(f"reduced samples reach {measured:.3g} of the sampling depth {depth:.3g}; "
                                        "the Dirichlet domain looks non-compact")
                logger.info("%s: Dirichlet domain looks non-compact (%.3g of depth %.3g); measuring over the "
                            "convex core", self.group.name, measured, depth)
                support = "core"
        if support == "core":
            pts = self._core_samples(samples, depth, rng)
            measured = float(np.max(self.base_distances(self.reduce_many(pts)[0])))
        self.support = support
        if measured > self.diameter_estimate and not self.enlarged:
            logger.info("Dirichlet diameter %.4g exceeds estimate %.4g; enlarging reduction set",
                        measured, self.diameter_estimate)
            self.enlarged = True
            self._build(2.0 * measured)
            measured = float(np.max(self.base_distances(self.reduce_many(pts)[0])))
        self.diameter_estimate = max(self.diameter_estimate, measured)
        return measured


def dirichlet_reduce(group: GroupPresentation, o: PointLike, x: PointLike,
                     reducer: Optional[DirichletReducer] = None) -> Tuple[HomogeneousPoint, GroupElement]:
    """(x', gamma) with x' = gamma x in the Dirichlet domain of o."""
    reducer = reducer or DirichletReducer(group, o)
    pt, gamma = reducer.reduce(x)
    return group.domain.point(pt), gamma


# ---------------------------------------------------------------------------
# Closed geodesics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedGeodesic:
    """A primitive oriented closed geodesic, given by a hyperbolic representative."""

    representative: GroupElement
    length: float
    repelling: HomogeneousPoint
    attracting: HomogeneousPoint
    label: str = ""


def _cyclic_canonical(word: Tuple[int, ...]) -> bool:
    """True if word is its least rotation and not a proper power."""
    n = len(word)
    for r in range(1, n):
        rot = word[r:] + word[:r]
        if rot < word:
            return False
        if rot == word and n % r == 0:
            return False
    return True


def _free_primitive_geodesics(group: GroupPresentation, max_length: float) -> List[ClosedGeodesic]:
    r2 = 2 * group.rank
    domain = group.domain
    words = [(i,) for i in range(r2)]
    mats = group.matrices.copy()
    found: List[ClosedGeodesic] = []
    misses = 0
    for n in range(1, MAX_WORD_LENGTH + 1):
        arr = np.array(words)
        cyc = arr[:, 0] != (arr[:, -1] + group.rank) % r2 if n > 1 else np.ones(len(arr), dtype=bool)
        idx = np.flatnonzero(cyc)
        batch = spectral_batch(mats[idx]) if len(idx) else None
        best = np.inf
        if batch is not None:
            hyp = batch.hyperbolic
            if np.any(hyp):
                best = float(batch.translation_lengths[hyp].min())
            for j in np.flatnonzero(hyp & (batch.translation_lengths <= max_length)):
                w = words[idx[j]]
                if not _cyclic_canonical(w):
                    continue
                elem = GroupElement(w, ProjectiveTransform._trusted(mats[idx[j]]))
                found.append(ClosedGeodesic(elem, float(batch.translation_lengths[j]),
                                            domain.point(domain.chart.project(batch.repelling[j])),
                                            domain.point(domain.chart.project(batch.attracting[j])),
                                            group.format_word(w)))
        misses = misses + 1 if best > max_length else 0
        if misses >= 2:
            break
        # extend by one letter, keeping words freely reduced
        last = arr[:, -1]
        ext_words = []
        ext_parent = []
        ext_letter = []
        for i, w in enumerate(words):
            back = (last[i] + group.rank) % r2
            for j in range(r2):
                if j != back:
                    ext_words.append(w + (j,))
                    ext_parent.append(i)
                    ext_letter.append(j)
        if len(ext_words) > DEFAULT_CAP:
            raise ResourceError(f"cyclic word census exceeded the cap of {DEFAULT_CAP} words", cap=DEFAULT_CAP)
        mats = mats[np.array(ext_parent)] @ group.matrices[np.array(ext_letter)]
        words = ext_words
    else:
        logger.warning("cyclic word census stopped at word length %d", MAX_WORD_LENGTH)
    if group.expects_parabolics:
        logger.warning("word-length stopping rule is heuristic for groups with cusps")
    return found


class _AxisWalker:
    """Follows an axis through copies of the Dirichlet domain."""

    STEP = 0.02

    def __init__(self, reducer: DirichletReducer):
        self.reducer = reducer
        self.domain = reducer.domain
        if isinstance(self.domain, Ellipsoid):
            self._w0 = self.domain.form @ reducer._o_h
            self._faces = reducer._centers_h @ self.domain.form

    def _exit_linear(self, x: np.ndarray, end: np.ndarray) -> Tuple[np.ndarray, int]:
        x0 = self.domain.lift(x)
        step = self.domain.lift(end) - x0
        a0 = np.sign(self._w0 @ x0)
        aj = np.sign(self._faces @ x0)
        alpha = a0 * (self._w0 @ x0) - aj * (self._faces @ x0)
        beta = a0 * (self._w0 @ step) - aj * (self._faces @ step)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(beta > 0, np.maximum(-alpha / beta, 0.0), np.inf)
        j = int(np.argmin(lam))
        if not lam[j] < 1.0:
            raise NumericalError("axis leaves the Dirichlet domain through the boundary",
                                 {"point": x.tolist()})
        return self.domain.chart.project(x0 + lam[j] * step), j

    def _exit_search(self, x: np.ndarray, start: np.ndarray, end: np.ndarray, remaining: float
                     ) -> Tuple[np.ndarray, int]:
        chord = end - start
        lam = float(np.clip((x - start) @ chord / (chord @ chord), 1e-12, 1 - 1e-12))
        t0 = 0.5 * np.log(lam / (1.0 - lam))
        centers = self.reducer._centers
        o = self.reducer.basepoint

        def excess(t: float) -> np.ndarray:
            p = footpoint_coords(start, end, np.array([t]))
            return (self.domain.distance_many(o[None, :], p)[0]
                    - self.domain.distance_many(centers, np.broadcast_to(p[0], centers.shape)))

        prev = t0
        stop = min(t0 + remaining + 1.0, 12.0)
        t = t0
        while t < stop:
            t = min(t + self.STEP, stop)
            values = excess(t)
            j = int(np.argmax(values))
            if values[j] > 0:
                root = brentq(lambda s: float(excess(s)[j]), prev, t, xtol=1e-13)
                return footpoint_coords(start, end, np.array([root]))[0], j
            prev = t
        raise NumericalError("axis leaves the Dirichlet domain through the boundary", {"point": x.tolist()})

    def walk(self, matrix: np.ndarray, word: Tuple[int, ...], length: float
             ) -> List[Tuple[np.ndarray, Tuple[int, ...], np.ndarray, np.ndarray]]:
        """Conjugates (matrix, word, repelling, attracting) whose axes cross the domain."""
        group = self.reducer.group
        chart = self.domain.chart
        batch = spectral_batch(matrix[None, :, :])
        rep_h, att_h = batch.repelling[0], batch.attracting[0]
        rep, att = chart.project(rep_h), chart.project(att_h)
        p = closest_line_points(self.domain, rep, att, self.reducer.basepoint)[0]
        x, sigma = self.reducer.reduce(p)
        s_mat = sigma.matrix.matrix
        s_word = sigma.word
        out = []
        travelled = 0.0
        for _ in range(10_000):
            conj = s_mat @ matrix @ np.linalg.inv(s_mat)
            inv_word = tuple(group.inverse_index(i) for i in reversed(s_word))
            e_minus = chart.project(s_mat @ rep_h)
            e_plus = chart.project(s_mat @ att_h)
            out.append((conj, group.reduce_word(s_word + word + inv_word), e_minus, e_plus))
            if isinstance(self.domain, Ellipsoid):
                y, j = self._exit_linear(x, e_plus)
            else:
                y, j = self._exit_search(x, e_minus, e_plus, length - travelled)
            travelled += float(self.domain.distance_many(x[None, :], y[None, :])[0])
            if travelled >= length - 1e-9:
                return out
            s = self.reducer.elements[j]
            x = chart.project(s.matrix.matrix @ self.domain.lift(y))
            s_mat = s.matrix.matrix @ s_mat
            s_word = s.word + s_word
        raise NumericalError("axis walk did not close up", {"length": length, "travelled": travelled})


def _endpoint_key(rep: np.ndarray, att: np.ndarray, quantum: float = 1e-6) -> Tuple[int, ...]:
    return tuple(int(v) for v in np.rint(np.concatenate([rep, att]) / quantum))


def _axis_primitive_geodesics(group: GroupPresentation, max_length: float, basepoint: Optional[PointLike],
                              reducer: Optional[DirichletReducer], cap: int) -> List[ClosedGeodesic]:
    domain = group.domain
    reducer = reducer or DirichletReducer(group, basepoint, cap=cap)
    o = reducer.basepoint
    rad = reducer.measure_diameter() + 0.1
    radius = max_length + 2.0 * rad
    ball = enumerate_orbit_ball(group, o, radius, cap=cap)
    idx = ball.within(radius)
    mats = ball.matrices_of(idx)
    batch = spectral_batch(mats)
    hyp = np.flatnonzero(batch.hyperbolic & (batch.translation_lengths <= max_length))
    reps = domain.chart.project(batch.repelling[hyp])
    atts = domain.chart.project(batch.attracting[hyp])
    lengths = batch.translation_lengths[hyp]

    # a proper root shares the oriented axis with a length dividing ours
    axis_lengths: Dict[Tuple[int, ...], List[float]] = {}
    for r, a, ell in zip(reps, atts, lengths):
        axis_lengths.setdefault(_endpoint_key(r, a), []).append(float(ell))

    def primitive(r, a, ell) -> bool:
        for other in axis_lengths[_endpoint_key(r, a)]:
            ratio = ell / other
            if ratio > 1.5 and abs(ratio - round(ratio)) < 1e-6:
                return False
        return True

    near = line_distance_many(domain, reps, atts, o) <= rad
    walker = _AxisWalker(reducer)
    visited = _KeySet()
    classes: Dict[Tuple[int, ...], ClosedGeodesic] = {}
    for j in np.argsort(lengths, kind="stable"):
        if not near[j] or not primitive(reps[j], atts[j], lengths[j]):
            continue
        m = mats[hyp[j]]
        if visited.contains(m[None, :, :])[0]:
            continue
        conjugates = walker.walk(m, ball.word(int(idx[hyp[j]])), float(lengths[j]))
        visited.filter_new(np.stack([c[0] for c in conjugates]))
        starts = np.array([c[2] for c in conjugates])
        ends = np.array([c[3] for c in conjugates])
        gaps = line_distance_many(domain, starts, ends, o)
        closest = np.flatnonzero(gaps <= gaps.min() + 1e-7)
        keys = [_endpoint_key(starts[i], ends[i]) for i in closest]
        pick = closest[min(range(len(keys)), key=keys.__getitem__)]
        key = _endpoint_key(starts[pick], ends[pick])
        if key in classes:
            continue
        conj, word, e_minus, e_plus = conjugates[pick]
        elem = GroupElement(word, ProjectiveTransform._trusted(conj))
        classes[key] = ClosedGeodesic(elem, float(lengths[j]), domain.point(e_minus), domain.point(e_plus),
                                      group.format_word(word))
    logger.info("found %d primitive classes of length <= %.3g", len(classes), max_length)
    return list(classes.values())


def enumerate_primitive_geodesics(group: GroupPresentation, max_length: float,
                                  basepoint: Optional[PointLike] = None,
                                  reducer: Optional[DirichletReducer] = None,
                                  cap: int = DEFAULT_CAP, method: Optional[str] = None) -> List[ClosedGeodesic]:
    """One ClosedGeodesic per oriented primitive hyperbolic conjugacy class with length <= max_length.

    Free presentations use the cyclically-reduced-word census; other groups
    walk axes through a Dirichlet domain and key each class by the crossing
    whose axis passes closest to the basepoint.

    Args:
        method: "words" or "axes" to force a path.

    Raises:
        ArgumentError: If max_length <= 0.
    """
    if max_length <= 0:
        raise ArgumentError("max_length must be positive")
    method = method or ("words" if group.free else "axes")
    if method == "words":
        if not group.free:
            raise ArgumentError("the word census needs a free presentation")
        found = _free_primitive_geodesics(group, max_length)
    elif method == "axes":
        found = _axis_primitive_geodesics(group, max_length, basepoint, reducer, cap)
    else:
        raise ArgumentError(f"unknown census method {method!r}")
    return sorted(found, key=lambda g: g.length)


def first_hyperbolic_pair(group: GroupPresentation, budget: int = 200) -> Tuple[GroupElement, GroupElement]:
    """Two non-commuting hyperbolic elements among the first `budget` words."""
    ball = enumerate_orbit_ball(group, radius=np.inf, budget=budget, margin=0.0)
    batch = spectral_batch(ball.matrices)
    hyp = np.flatnonzero(batch.hyperbolic)[:64]
    for i in hyp:
        for j in hyp:
            a, b = ball.matrices[i], ball.matrices[j]
            comm = a @ b - b @ a
            if np.linalg.norm(comm) > 1e-6 * np.linalg.norm(a) * np.linalg.norm(b):
                return ball.element(int(i)), ball.element(int(j))
    raise ElementaryGroupError(f"{group.name} has no pair of non-commuting hyperbolic elements "
                               f"among its first {budget} elements")
