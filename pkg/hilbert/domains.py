"""Convex domains in an affine chart and their line-boundary intersection oracles."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import ArgumentError, ChartError, DomainError
from .projective import AffineChart, HomogeneousPoint, ProjectiveTransform

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4
INTERIOR_MARGIN = 1e-12
BOUNDARY_TOLERANCE = 1e-7

PointLike = Union[HomogeneousPoint, Sequence[float], np.ndarray]


class ConvexDomain(ABC):
    """A bounded convex open set in an affine chart of projective space.

    Subclasses implement `gauge` (< 1 inside, = 1 on the boundary) and
    `chord_params_many`; everything else is shared.
    """

    approximate = False
    smooth = True

    def __init__(self, dimension: int, chart: AffineChart = AffineChart()):
        if not 1 <= dimension <= MAX_DIMENSION:
            raise ArgumentError(f"dimension must be between 1 and {MAX_DIMENSION}, got {dimension}")
        self.dimension = dimension
        self.chart = chart

    @property
    @abstractmethod
    def center(self) -> np.ndarray:
        """An interior point used as default basepoint."""

    @abstractmethod
    def gauge(self, points: np.ndarray) -> np.ndarray:
        """Gauge values of affine points of shape (m, n)."""

    @abstractmethod
    def chord_params_many(self, starts: np.ndarray, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Parameters (t_minus, t_plus) where start + t*direction meets the boundary.

        Starts must be interior; t_minus < 0 < t_plus.
        """

    @abstractmethod
    def normals(self, boundary_points: np.ndarray) -> np.ndarray:
        """Outward supporting normals at affine boundary points of shape (m, n)."""

    def affine(self, point: PointLike) -> np.ndarray:
        """Affine coordinates of a HomogeneousPoint or of an affine coordinate sequence."""
        if isinstance(point, HomogeneousPoint):
            if point.dimension != self.dimension:
                raise ArgumentError(f"point has dimension {point.dimension}, domain has {self.dimension}")
            return self.chart.to_affine(point)
        arr = np.asarray(point, dtype=float).ravel()
        if arr.size != self.dimension:
            raise ArgumentError(f"expected {self.dimension} affine coordinates, got {arr.size}")
        return arr

    def point(self, x: Sequence[float]) -> HomogeneousPoint:
        return self.chart.from_affine(np.asarray(x, dtype=float))

    def lift(self, points: np.ndarray) -> np.ndarray:
        return self.chart.lift(points)

    def inside_many(self, points: np.ndarray) -> np.ndarray:
        return self.gauge(np.atleast_2d(points)) < 1.0 - INTERIOR_MARGIN

    def contains(self, x: PointLike) -> bool:
        """True iff x lies strictly inside, with a 1e-12 margin in the gauge."""
        return bool(self.inside_many(self.affine(x)[None, :])[0])

    def boundary_residual(self, xi: np.ndarray) -> float:
        return float(abs(self.gauge(np.asarray(xi, dtype=float)[None, :])[0] - 1.0))

    def require_interior(self, x: PointLike, name: str = "point") -> np.ndarray:
        a = self.affine(x)
        if not self.contains(a):
            raise DomainError(f"{name} {a.tolist()} is not inside the domain")
        return a

    def require_boundary(self, xi: PointLike, name: str = "boundary point") -> np.ndarray:
        e = self.affine(xi)
        tol = 1e-3 if self.approximate else BOUNDARY_TOLERANCE
        if self.boundary_residual(e) > tol:
            raise DomainError(f"{name} {e.tolist()} is not on the boundary")
        return e

    def chord_params(self, start: np.ndarray, direction: np.ndarray) -> Tuple[float, float]:
        lo, hi = self.chord_params_many(np.asarray(start, float)[None, :],
                                        np.asarray(direction, float)[None, :])
        return float(lo[0]), float(hi[0])

    def boundary_hits(self, x: PointLike, direction: Sequence[float]) -> Tuple[HomogeneousPoint, HomogeneousPoint]:
        """Endpoints of the chord through x along direction, (v_minus, v_plus).

        Raises:
            DomainError: If x is not inside the domain.
            ArgumentError: If direction is zero.
        """
        a = self.require_interior(x)
        d = np.asarray(direction, dtype=float).ravel()
        if d.size != self.dimension or not np.any(d):
            raise ArgumentError("direction must be a nonzero chart vector")
        lo, hi = self.chord_params(a, d)
        return self.point(a + lo * d), self.point(a + hi * d)

    def exit_points(self, starts: np.ndarray, directions: np.ndarray) -> np.ndarray:
        """Forward boundary hits of rays start + t*direction, t > 0."""
        _, hi = self.chord_params_many(starts, directions)
        return starts + hi[:, None] * directions

    def distance_many(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Hilbert distances between rows of xs and ys (affine, interior).

        Each pair is ordered lexicographically before evaluation so the result is
        exactly symmetric. Coincident pairs (chart distance <= 1e-12) give 0.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        xs, ys = np.broadcast_arrays(xs, ys)
        swap = _lexicographic_greater(xs, ys)
        a = np.where(swap[:, None], ys, xs)
        b = np.where(swap[:, None], xs, ys)
        diff = b - a
        same = np.linalg.norm(diff, axis=1) <= 1e-12
        out = np.zeros(len(a))
        live = ~same
        if np.any(live):
            d = diff[live]
            t_minus, _ = self.chord_params_many(a[live], d)
            _, s_plus = self.chord_params_many(b[live], d)
            out[live] = 0.5 * (np.log1p(1.0 / -t_minus) + np.log1p(1.0 / s_plus))
        return out

    def orbit_distances(self, x: np.ndarray, images: np.ndarray, base: np.ndarray) -> np.ndarray:
        """Distances from affine x to points given as homogeneous images M @ base.

        Args:
            x: Affine interior point.
            images: Homogeneous vectors of shape (m, n+1), images of `base` under
                determinant-normalized transforms preserving the domain.
            base: Homogeneous vector the images were computed from.
        """
        pts = self.chart.project(images)
        return self.distance_many(np.broadcast_to(x, pts.shape), pts)

    def orbit_displacements(self, base: np.ndarray, matrices: np.ndarray,
                            target: Optional[np.ndarray] = None) -> np.ndarray:
        """Distances d(base, M @ target) for a stack of domain-preserving matrices."""
        target = base if target is None else target
        target_h = self.lift(target)
        images = np.asarray(matrices) @ target_h
        return self.orbit_distances(base, images, target_h)

    def sample_boundary(self, count: int) -> np.ndarray:
        """Deterministic boundary points seen from the center along spread directions."""
        dirs = spread_directions(self.dimension, count)
        return self.exit_points(np.broadcast_to(self.center, dirs.shape).copy(), dirs)


class Ellipsoid(ConvexDomain):
    """Region (x - c)^T Q (x - c) < 1 with Q symmetric positive definite."""

    def __init__(self, Q: Sequence[Sequence[float]], center: Optional[Sequence[float]] = None,
                 chart: AffineChart = AffineChart()):
        q = np.array(Q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ArgumentError(f"ellipsoid matrix must be square, got shape {q.shape}")
        super().__init__(q.shape[0], chart)
        q = 0.5 * (q + q.T)
        try:
            np.linalg.cholesky(q)
        except np.linalg.LinAlgError as exc:
            raise ArgumentError("ellipsoid matrix must be positive definite") from exc
        c = np.zeros(self.dimension) if center is None else np.asarray(center, dtype=float).ravel()
        if c.size != self.dimension:
            raise ArgumentError("ellipsoid center has the wrong dimension")
        self.Q = q
        self._center = c
        n = self.dimension
        qc = q @ c
        form0 = np.empty((n + 1, n + 1))
        form0[0, 0] = c @ qc - 1.0
        form0[0, 1:] = -qc
        form0[1:, 0] = -qc
        form0[1:, 1:] = q
        perm = self._perm()
        form = np.empty_like(form0)
        form[np.ix_(perm, perm)] = form0
        self.form = form

    @classmethod
    def unit_ball(cls, dimension: int = 2) -> "Ellipsoid":
        return cls(np.eye(dimension))

    def _perm(self) -> np.ndarray:
        idx = self.chart.index
        return np.array([idx] + [i for i in range(self.dimension + 1) if i != idx])

    @property
    def center(self) -> np.ndarray:
        return self._center

    def gauge(self, points: np.ndarray) -> np.ndarray:
        e = np.atleast_2d(points) - self._center
        return np.sqrt(np.einsum("ij,jk,ik->i", e, self.Q, e))

    def chord_params_many(self, starts, directions):
        e = np.asarray(starts, float) - self._center
        d = np.asarray(directions, float)
        qd = d @ self.Q
        a = np.einsum("ij,ij->i", qd, d)
        b = 2.0 * np.einsum("ij,ij->i", qd, e)
        c = np.einsum("ij,jk,ik->i", e, self.Q, e) - 1.0
        disc = np.sqrt(np.maximum(b * b - 4.0 * a * c, 0.0))
        q = -0.5 * (b + np.where(b >= 0, disc, -disc))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / a
            r2 = c / q
        return np.minimum(r1, r2), np.maximum(r1, r2)

    def normals(self, boundary_points):
        n = (np.atleast_2d(boundary_points) - self._center) @ self.Q
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def quadratic(self, vectors: np.ndarray) -> np.ndarray:
        """v^T J v for homogeneous vectors; negative inside."""
        v = np.atleast_2d(vectors)
        return np.einsum("ij,jk,ik->i", v, self.form, v)

    def bilinear(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Row-wise u^T J v."""
        return np.einsum("ij,jk,ik->i", np.atleast_2d(u), self.form, np.atleast_2d(v))

    def orbit_distances(self, x, images, base):
        # |x^T J w| / sqrt(q(x) q(w)) with q(w) = q(base) by invariance of J
        x = np.asarray(x, dtype=float)
        xh = self.lift(x)
        images = np.atleast_2d(images)
        qx = -self.quadratic(xh)[0]
        qb = -self.quadratic(base)[0]
        cosh = np.abs(images @ (self.form @ xh)) / np.sqrt(qx * qb)
        out = np.arccosh(np.maximum(cosh, 1.0))
        near = cosh < 2.0
        if np.any(near):
            pts = self.chart.project(images[near])
            out[near] = self.distance_many(np.broadcast_to(x, pts.shape), pts)
        return out

    def transformed(self, transform: ProjectiveTransform) -> "Ellipsoid":
        """The image T(Omega) as an Ellipsoid in the same chart.

        Raises:
            DomainError: If the image is not bounded in the chart.
        """
        tinv = np.linalg.inv(transform.matrix)
        form = tinv.T @ self.form @ tinv
        perm = self._perm()
        form0 = form[np.ix_(perm, perm)]
        j00 = form0[0, 0]
        b = form0[1:, 0]
        m = form0[1:, 1:]
        m = 0.5 * (m + m.T)
        if np.trace(m) < 0:
            m, b, j00 = -m, -b, -j00
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError as exc:
            raise DomainError("image of the ellipsoid is not bounded in this chart") from exc
        c = -np.linalg.solve(m, b)
        k = b @ np.linalg.solve(m, b) - j00
        if k <= 0:
            raise DomainError("image of the ellipsoid is empty in this chart")
        return Ellipsoid(m / k, center=c, chart=self.chart)

    def __repr__(self) -> str:
        return f"Ellipsoid(Q={self.Q.tolist()}, center={self._center.tolist()})"


class PNormBall(ConvexDomain):
    """Ball of the p-norm, ||x||_p < radius, for 1 < p < infinity.

    Chords are found by a doubling bracket, vectorized bisection and one
    Newton step clipped to the final bracket.
    """

    BISECTION_STEPS = 64

    def __init__(self, exponent: float, radius: float = 1.0, dimension: int = 2,
                 chart: AffineChart = AffineChart()):
        if not 1.0 < exponent < np.inf:
            raise ArgumentError(f"exponent must lie in (1, inf), got {exponent}")
        if radius <= 0:
            raise ArgumentError("radius must be positive")
        super().__init__(dimension, chart)
        self.exponent = float(exponent)
        self.radius = float(radius)

    @property
    def center(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def _norm(self, x: np.ndarray) -> np.ndarray:
        ax = np.abs(np.atleast_2d(x))
        top = ax.max(axis=1)
        safe = np.where(top > 0, top, 1.0)
        return top * np.sum((ax / safe[:, None]) ** self.exponent, axis=1) ** (1.0 / self.exponent)

    def gauge(self, points):
        return self._norm(points) / self.radius

    def _ray_hits(self, starts: np.ndarray, directions: np.ndarray) -> np.ndarray:
        def f(t):
            return self._norm(starts + t[:, None] * directions) - self.radius

        scale = self.radius / np.linalg.norm(directions, axis=1)
        hi = scale.copy()
        for _ in range(200):
            grow = f(hi) <= 0
            if not np.any(grow):
                break
            hi = np.where(grow, 2.0 * hi, hi)
        lo = np.zeros_like(hi)
        for _ in range(self.BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            inside = f(mid) <= 0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        t = 0.5 * (lo + hi)
        u = starts + t[:, None] * directions
        norm = self._norm(u)
        grad = np.sign(u) * (np.abs(u) / norm[:, None]) ** (self.exponent - 1.0)
        slope = np.einsum("ij,ij->i", grad, directions)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t - (norm - self.radius) / slope
        ok = np.isfinite(newton) & (newton >= lo) & (newton <= hi)
        return np.where(ok, newton, t)

    def chord_params_many(self, starts, directions):
        starts = np.asarray(starts, float)
        directions = np.asarray(directions, float)
        plus = self._ray_hits(starts, directions)
        minus = -self._ray_hits(starts, -directions)
        return minus, plus

    def normals(self, boundary_points):
        x = np.atleast_2d(boundary_points)
        n = np.sign(x) * np.abs(x) ** (self.exponent - 1.0)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def __repr__(self) -> str:
        return f"PNormBall(p={self.exponent}, r={self.radius}, n={self.dimension})"


class OrbitHull(ConvexDomain):
    """Convex hull of a finite point cloud; a polytopal approximation.

    Results computed on it are approximations: the hull is not strictly convex.
    """

    approximate = True
    smooth = False

    def __init__(self, points: Sequence[Sequence[float]], chart: AffineChart = AffineChart()):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        super().__init__(pts.shape[1], chart)
        if self.dimension < 2:
            raise ArgumentError("orbit hulls need dimension >= 2")
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise DomainError(f"cannot build hull of {len(pts)} points: {exc}") from exc
        self.points = pts[hull.vertices]
        self._normals = hull.equations[:, :-1]
        self._offsets = hull.equations[:, -1]
        self._center = self.points.mean(axis=0)
        self._heights = -(self._normals @ self._center + self._offsets)
        if np.any(self._heights <= 0):
            raise DomainError("orbit hull has empty interior")
        logger.warning("OrbitHull with %d vertices is a polytopal approximation; results are approximate",
                       len(self.points))

    @classmethod
    def from_orbit(cls, transforms: Iterable[ProjectiveTransform], seeds: Sequence[Sequence[float]],
                   depth: int, chart: AffineChart = AffineChart()) -> "OrbitHull":
        """Hull of the images of seed points under all words of length <= depth."""
        mats = [t.matrix for t in transforms]
        seeds_h = chart.lift(np.atleast_2d(np.asarray(seeds, dtype=float)))
        images = [seeds_h]
        frontier = seeds_h
        for _ in range(depth):
            frontier = np.concatenate([frontier @ m.T for m in mats])
            frontier = frontier / np.linalg.norm(frontier, axis=1, keepdims=True)
            images.append(frontier)
        cloud = np.concatenate(images)
        try:
            pts = chart.project(cloud)
        except ChartError as exc:
            raise DomainError("orbit leaves the affine chart") from exc
        return cls(pts, chart=chart)

    @property
    def center(self) -> np.ndarray:
        return self._center

    def gauge(self, points):
        e = np.atleast_2d(points) - self._center
        return np.max((e @ self._normals.T) / self._heights, axis=1)

    def chord_params_many(self, starts, directions):
        starts = np.asarray(starts, float)
        directions = np.asarray(directions, float)
        slopes = directions @ self._normals.T
        heights = -(starts @ self._normals.T + self._offsets)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = heights / slopes
        plus = np.where(slopes > 0, ratios, np.inf).min(axis=1)
        minus = np.where(slopes < 0, ratios, -np.inf).max(axis=1)
        return minus, plus

    def normals(self, boundary_points):
        e = np.atleast_2d(boundary_points) - self._center
        facet = np.argmax((e @ self._normals.T) / self._heights, axis=1)
        return self._normals[facet]

    def __repr__(self) -> str:
        return f"OrbitHull({len(self.points)} vertices, n={self.dimension})"


@dataclass(frozen=True)
class PreservationReport:
    """Sampled check that a transform maps a domain to itself."""

    boundary_residual: float
    interior_failures: int
    samples: int

    def passed(self, tolerance: float = 1e-9) -> bool:
        return self.boundary_residual <= tolerance and self.interior_failures == 0


def preservation_diagnostic(transform: ProjectiveTransform, domain: ConvexDomain,
                            samples: int = 64) -> PreservationReport:
    """Map sampled boundary and interior points and measure how far they stray.

    This is a diagnostic, not a certificate.
    """
    boundary = domain.sample_boundary(samples)
    interior = domain.center + 0.5 * (boundary - domain.center)
    try:
        bimg = transform.apply_affine(boundary, domain.chart)
        iimg = transform.apply_affine(interior, domain.chart)
    except ChartError:
        return PreservationReport(np.inf, samples, samples)
    residual = float(np.max(np.abs(domain.gauge(bimg) - 1.0)))
    failures = int(np.count_nonzero(~domain.inside_many(iimg)))
    return PreservationReport(residual, failures, samples)


def spread_directions(dimension: int, count: int) -> np.ndarray:
    """Deterministic unit vectors spread over the sphere S^{n-1}."""
    if dimension == 1:
        return np.array([[1.0], [-1.0]])
    if dimension == 2:
        angles = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    from scipy.stats import norm, qmc

    halton = qmc.Halton(d=dimension, scramble=False)
    pts = halton.random(count + 1)[1:]
    gauss = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    axes = np.concatenate([np.eye(dimension), -np.eye(dimension)])
    dirs = np.concatenate([axes, gauss])[:max(count, 2 * dimension)]
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _lexicographic_greater(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise tuple(a) > tuple(b)."""
    out = np.zeros(len(a), dtype=bool)
    decided = np.zeros(len(a), dtype=bool)
    for j in range(a.shape[1]):
        gt = (a[:, j] > b[:, j]) & ~decided
        lt = (a[:, j] < b[:, j]) & ~decided
        out |= gt
        decided |= gt | lt
    return out
