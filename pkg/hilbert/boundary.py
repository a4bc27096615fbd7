"""Busemann functions, Gromov products, horoballs, shadows, cones and cross-ratios."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .domains import ConvexDomain, Ellipsoid, PointLike, spread_directions
from .errors import ArgumentError, DomainError, NumericalError
from .metric import _ray_point, footpoint_coords, ray_points
from .projective import HomogeneousPoint

logger = logging.getLogger(__name__)

CAUCHY_TOLERANCE = 1e-9
MAX_TRUNCATION = 64
TIME_LIMIT = 12.0
NEAR_THRESHOLD = 0.02


# ---------------------------------------------------------------------------
# Busemann functions
# ---------------------------------------------------------------------------

def _positive_pairing(domain: Ellipsoid, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """B(u, v) = -u^T J v on chart-normalized lifts; positive on the closed domain."""
    return np.abs(domain.bilinear(domain.lift(u), domain.lift(v)))


def _ellipsoid_busemann(domain: Ellipsoid, e: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    e, a, b = np.broadcast_arrays(np.atleast_2d(e), np.atleast_2d(a), np.atleast_2d(b))
    return (np.log(_positive_pairing(domain, a, e)) + 0.5 * np.log(_positive_pairing(domain, b, b))
            - np.log(_positive_pairing(domain, b, e)) - 0.5 * np.log(_positive_pairing(domain, a, a)))


def _smooth_busemann(domain: ConvexDomain, e: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact limit using the supporting hyperplane at xi; needs a C^1 boundary
    e, a, b = np.broadcast_arrays(np.atleast_2d(e), np.atleast_2d(a), np.atleast_2d(b))
    ta_minus, ta_plus = domain.chord_params_many(a, e - a)
    tb_minus, tb_plus = domain.chord_params_many(b, e - b)
    chord = 0.5 * (np.log1p(ta_plus / -ta_minus) - np.log1p(tb_plus / -tb_minus))
    n = domain.normals(e)
    support = 0.5 * np.log(np.einsum("ij,ij->i", n, e - a) / np.einsum("ij,ij->i", n, e - b))
    return chord + support


def busemann_truncated(domain: ConvexDomain, xi: PointLike, x: PointLike, y: PointLike, T: float) -> float:
    """d(x, c(T)) - d(y, c(T)) for c the geodesic ray from x to xi."""
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    e = domain.affine(xi)
    c = _ray_point(domain, a, e, T)
    if not domain.contains(c):
        raise DomainError(f"ray point at T={T} is within the boundary margin")
    dist = domain.distance_many(np.vstack([a, b]), np.vstack([c, c]))
    return float(dist[0] - dist[1])


def _adaptive_busemann(domain: ConvexDomain, xi: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    # T doubles; once a ray point falls inside the boundary margin the step is halved instead
    history: List[float] = []
    previous = None
    last, step = 0.0, 1.0
    doubling = True
    while last + step <= MAX_TRUNCATION:
        T = last + step
        try:
            value = busemann_truncated(domain, xi, x, y, T)
        except DomainError as exc:
            if step <= 1.0:
                raise NumericalError("Busemann truncation reached the boundary margin before converging",
                                     {"T": T, "history": history}) from exc
            doubling = False
            step *= 0.5
            continue
        history.append(value)
        if previous is not None and abs(value - previous) < CAUCHY_TOLERANCE:
            return value
        previous, last = value, T
        if doubling:
            step = T
    raise NumericalError("Busemann truncation did not converge", {"T": MAX_TRUNCATION, "history": history})


def busemann(domain: ConvexDomain, xi: PointLike, x: PointLike, y: PointLike) -> float:
    """Busemann function beta_xi(x, y) = lim d(x, z) - d(y, z) as z -> xi.

    Ellipsoids use the quadratic-form closed form, other smooth domains the
    supporting-hyperplane limit, and polytopal hulls an adaptive truncation.

    Raises:
        DomainError: If x or y is outside or xi is off the boundary.
        NumericalError: If the truncation does not converge.
    """
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    e = domain.require_boundary(xi, "xi")
    if np.linalg.norm(a - b) <= 1e-12:
        return 0.0
    if isinstance(domain, Ellipsoid):
        return float(_ellipsoid_busemann(domain, e, a, b)[0])
    if domain.smooth:
        return float(_smooth_busemann(domain, e, a, b)[0])
    return _adaptive_busemann(domain, e, a, b)


def busemann_many(domain: ConvexDomain, xi: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise Busemann values for affine arrays of boundary and interior points."""
    xi, xs, ys = np.broadcast_arrays(np.atleast_2d(xi), np.atleast_2d(xs), np.atleast_2d(ys))
    if isinstance(domain, Ellipsoid):
        out = _ellipsoid_busemann(domain, xi, xs, ys)
    elif domain.smooth:
        out = _smooth_busemann(domain, xi, xs, ys)
    else:
        out = np.array([_adaptive_busemann(domain, e, a, b) for e, a, b in zip(xi, xs, ys)])
    same = np.linalg.norm(xs - ys, axis=1) <= 1e-12
    return np.where(same, 0.0, out)


# ---------------------------------------------------------------------------
# Gromov products
# ---------------------------------------------------------------------------

def _raw_gromov(domain: ConvexDomain, a: np.ndarray, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    a, e1, e2 = np.broadcast_arrays(np.atleast_2d(a), np.atleast_2d(e1), np.atleast_2d(e2))
    if isinstance(domain, Ellipsoid):
        delta = e1 - e2
        half_gap = 0.25 * np.einsum("ij,jk,ik->i", delta, domain.Q, delta)
        value = (half_gap * _positive_pairing(domain, a, a)
                 / (_positive_pairing(domain, a, e1) * _positive_pairing(domain, a, e2)))
        return -0.5 * np.log(value)
    mid = 0.5 * (e1 + e2)
    return 0.5 * (busemann_many(domain, e1, a, mid) + busemann_many(domain, e2, a, mid))


def gromov_product(domain: ConvexDomain, x: PointLike, xi: PointLike, eta: PointLike) -> float:
    """Gromov product of two boundary points seen from x.

    Evaluated as 1/2 (beta_xi(x, u) + beta_eta(x, u)) for u on the chord (xi eta);
    clipped at 0.

    Raises:
        ArgumentError: If xi and eta coincide.
    """
    a = domain.require_interior(x, "x")
    e1 = domain.require_boundary(xi, "xi")
    e2 = domain.require_boundary(eta, "eta")
    if np.linalg.norm(e1 - e2) <= 1e-12:
        raise ArgumentError("xi and eta must be distinct")
    return max(0.0, float(_raw_gromov(domain, a, e1, e2)[0]))


def gromov_product_many(domain: ConvexDomain, x: np.ndarray, xis: np.ndarray, etas: np.ndarray) -> np.ndarray:
    """Vectorized boundary Gromov products, clipped at 0."""
    return np.maximum(_raw_gromov(domain, x, xis, etas), 0.0)


def gromov_product_interior(domain: ConvexDomain, x: PointLike, y: PointLike, z: PointLike) -> float:
    """<y, z>_x = 1/2 (d(x,y) + d(x,z) - d(y,z))."""
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    c = domain.require_interior(z, "z")
    d = domain.distance_many(np.vstack([a, a, b]), np.vstack([b, c, c]))
    return 0.5 * float(d[0] + d[1] - d[2])


def gromov_product_mixed(domain: ConvexDomain, x: PointLike, y: PointLike, xi: PointLike) -> float:
    """<y, xi>_x for an interior y and boundary xi: 1/2 (d(x,y) + beta_xi(x,y))."""
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    dist = float(domain.distance_many(a[None, :], b[None, :])[0])
    return 0.5 * (dist + busemann(domain, xi, a, b))


def visual_distance(domain: ConvexDomain, x: PointLike, xi: PointLike, eta: PointLike) -> float:
    """exp(-<xi, eta>_x); no metric axioms are claimed for it."""
    e1 = domain.affine(xi)
    e2 = domain.affine(eta)
    if np.linalg.norm(e1 - e2) <= 1e-12:
        return 0.0
    return float(np.exp(-gromov_product(domain, x, e1, e2)))


# ---------------------------------------------------------------------------
# Distances to rays and geodesic lines
# ---------------------------------------------------------------------------

def _ellipsoid_line_distance(domain: Ellipsoid, e1, e2, y) -> np.ndarray:
    cosh_sq = (2.0 * _positive_pairing(domain, y, e1) * _positive_pairing(domain, y, e2)
               / (_positive_pairing(domain, e1, e2) * _positive_pairing(domain, y, y)))
    return np.arccosh(np.sqrt(np.maximum(cosh_sq, 1.0)))


def ray_distance_many(domain: ConvexDomain, xs: np.ndarray, xis: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hilbert distance from y to each ray ]x xi), row-wise over xs and xis."""
    xs, xis = np.broadcast_arrays(np.atleast_2d(xs), np.atleast_2d(xis))
    y = np.asarray(y, dtype=float)
    ys = np.broadcast_to(y, xs.shape)
    if isinstance(domain, Ellipsoid):
        backs = domain.exit_points(xs, xs - xis)
        line = _ellipsoid_line_distance(domain, xis, backs, ys)
        to_start = domain.distance_many(xs, ys)
        ahead = (_positive_pairing(domain, ys, backs) * _positive_pairing(domain, xs, xis)
                 >= _positive_pairing(domain, xs, backs) * _positive_pairing(domain, ys, xis))
        return np.where(ahead, np.minimum(line, to_start), to_start)
    return np.array([_ray_distance_search(domain, a, e, y) for a, e in zip(xs, xis)])


def _ray_distance_search(domain: ConvexDomain, a: np.ndarray, e: np.ndarray, y: np.ndarray) -> float:
    start = float(domain.distance_many(a[None, :], y[None, :])[0])
    if start == 0.0:
        return 0.0
    upper = 2.0 * start + 1.0

    def objective(t: float) -> float:
        p = _ray_point(domain, a, e, t)
        return float(domain.distance_many(p[None, :], y[None, :])[0])

    res = minimize_scalar(objective, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-10})
    return min(start, float(res.fun))


def ray_distance(domain: ConvexDomain, x: PointLike, xi: PointLike, y: PointLike) -> float:
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    e = domain.require_boundary(xi, "xi")
    return float(ray_distance_many(domain, a, e, b)[0])


def line_distance_many(domain: ConvexDomain, starts: np.ndarray, ends: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hilbert distance from y to each bi-infinite geodesic (start end)."""
    starts, ends = np.broadcast_arrays(np.atleast_2d(starts), np.atleast_2d(ends))
    y = np.asarray(y, dtype=float)
    if isinstance(domain, Ellipsoid):
        return _ellipsoid_line_distance(domain, starts, ends, np.broadcast_to(y, starts.shape))
    return np.array([_line_distance_search(domain, s, e, y) for s, e in zip(starts, ends)])


def _line_distance_search(domain: ConvexDomain, s: np.ndarray, e: np.ndarray, y: np.ndarray) -> float:
    chord = e - s
    lam = float(np.clip((y - s) @ chord / (chord @ chord), 1e-6, 1.0 - 1e-6))
    t0 = 0.5 * np.log(lam / (1.0 - lam))

    def objective(t: float) -> float:
        p = footpoint_coords(s, e, np.array([t]))
        return float(domain.distance_many(p, y[None, :])[0])

    d0 = objective(t0)
    lo = max(-TIME_LIMIT, t0 - 2.0 * d0)
    hi = min(TIME_LIMIT, t0 + 2.0 * d0)
    if hi - lo < 1e-12:
        return d0
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return min(d0, float(res.fun))


def closest_line_points(domain: ConvexDomain, starts: np.ndarray, ends: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Affine points on each geodesic (start end) nearest to y."""
    starts, ends = np.broadcast_arrays(np.atleast_2d(starts), np.atleast_2d(ends))
    y = np.asarray(y, dtype=float)
    if isinstance(domain, Ellipsoid):
        # J-orthogonal projection of y onto the plane spanned by the null lifts
        a = domain.lift(starts)
        b = domain.lift(ends)
        yh = np.broadcast_to(domain.lift(y), a.shape)
        ab = domain.bilinear(a, b)
        p = (domain.bilinear(yh, b) / ab)[:, None] * a + (domain.bilinear(yh, a) / ab)[:, None] * b
        return domain.chart.project(p)
    out = np.empty_like(starts)
    for i, (s, e) in enumerate(zip(starts, ends)):
        chord = e - s
        lam = float(np.clip((y - s) @ chord / (chord @ chord), 1e-6, 1.0 - 1e-6))
        t0 = 0.5 * np.log(lam / (1.0 - lam))

        def objective(t: float) -> float:
            p = footpoint_coords(s, e, np.array([t]))
            return float(domain.distance_many(p, y[None, :])[0])

        d0 = objective(t0)
        lo = max(-TIME_LIMIT, t0 - 2.0 * d0)
        hi = min(TIME_LIMIT, t0 + 2.0 * d0)
        best = t0
        if hi - lo > 1e-12:
            res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            if res.fun < d0:
                best = float(res.x)
        out[i] = footpoint_coords(s, e, np.array([best]))[0]
    return out


def line_distance(domain: ConvexDomain, xi: PointLike, eta: PointLike, y: PointLike) -> float:
    b = domain.require_interior(y, "y")
    e1 = domain.require_boundary(xi, "xi")
    e2 = domain.require_boundary(eta, "eta")
    if np.linalg.norm(e1 - e2) <= 1e-12:
        raise ArgumentError("geodesic endpoints must be distinct")
    return float(line_distance_many(domain, e1, e2, b)[0])


# ---------------------------------------------------------------------------
# Horoballs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Horoball:
    """Horoball based at a boundary point whose horosphere passes through anchor."""

    domain: ConvexDomain
    base: HomogeneousPoint
    anchor: HomogeneousPoint

    def __post_init__(self):
        self.domain.require_boundary(self.base, "horoball base")
        self.domain.require_interior(self.anchor, "horoball anchor")

    def level(self, y: PointLike) -> float:
        """beta_base(anchor, y); positive inside the horoball."""
        return busemann(self.domain, self.base, self.anchor, y)


def in_horoball(h: Horoball, y: PointLike) -> bool:
    return h.level(y) > 0.0


def horoball_entry(h: Horoball, xi_minus: PointLike, xi_plus: PointLike) -> Optional[HomogeneousPoint]:
    """Point where the oriented geodesic (xi_minus xi_plus) enters the horoball.

    Returns:
        The entry point on the horosphere, or None if the geodesic does not enter
        within footpoint times [-12, 12] or starts inside.
    """
    domain = h.domain
    s = domain.require_boundary(xi_minus, "xi_minus")
    e = domain.require_boundary(xi_plus, "xi_plus")
    anchor = domain.affine(h.anchor)
    base = domain.affine(h.base)

    def level(times: np.ndarray) -> np.ndarray:
        pts = footpoint_coords(s, e, times)
        return busemann_many(domain, base, anchor, pts)

    grid = np.arange(-TIME_LIMIT, TIME_LIMIT + 1e-9, 0.25)
    values = level(grid)
    positive = np.flatnonzero(values > 0)
    if positive.size == 0 or positive[0] == 0:
        return None
    i = positive[0]
    root = brentq(lambda t: float(level(np.array([t]))[0]), grid[i - 1], grid[i], xtol=1e-13)
    return domain.point(footpoint_coords(s, e, np.array([root]))[0])


# ---------------------------------------------------------------------------
# Boundary sets
# ---------------------------------------------------------------------------

class BoundarySet(ABC):
    """A subset of the boundary given by a membership predicate."""

    @property
    def empty(self) -> bool:
        return False

    @abstractmethod
    def contains_many(self, domain: ConvexDomain, points: np.ndarray) -> np.ndarray:
        """Membership of affine points of shape (m, n)."""

    def contains(self, domain: ConvexDomain, xi: PointLike) -> bool:
        return bool(self.contains_many(domain, domain.affine(xi)[None, :])[0])


class FullBoundary(BoundarySet):
    def contains_many(self, domain, points):
        return np.ones(len(np.atleast_2d(points)), dtype=bool)


@dataclass(frozen=True)
class Cap(BoundarySet):
    """Spherical cap: directions from the domain center within `angle` of `axis`.

    Interior points are classified by the same radial direction.
    """

    axis: tuple
    angle: float

    def __post_init__(self):
        if not np.any(np.asarray(self.axis, dtype=float)):
            raise ArgumentError("cap axis must be nonzero")
        if not 0.0 <= self.angle <= np.pi:
            raise ArgumentError("cap angle must lie in [0, pi]")

    def contains_many(self, domain, points):
        axis = np.asarray(self.axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        v = np.atleast_2d(points) - domain.center
        norms = np.linalg.norm(v, axis=1)
        cosines = (v @ axis) / np.where(norms > 0, norms, 1.0)
        return (norms > 0) & (cosines >= np.cos(self.angle) - 1e-15)


class FiniteSet(BoundarySet):
    """A finite set of boundary points, matched within a chart tolerance."""

    def __init__(self, points: Sequence[PointLike], tol: float = 1e-8):
        self.points = list(points)
        self.tol = tol

    @property
    def empty(self) -> bool:
        return not self.points

    def contains_many(self, domain, points):
        pts = np.atleast_2d(points)
        if not self.points:
            return np.zeros(len(pts), dtype=bool)
        ref = np.array([domain.affine(p) for p in self.points])
        gaps = np.linalg.norm(pts[:, None, :] - ref[None, :, :], axis=2)
        return np.any(gaps <= self.tol, axis=1)


class CallbackSet(BoundarySet):
    """Boundary set defined by a predicate on HomogeneousPoints."""

    def __init__(self, predicate: Callable[[HomogeneousPoint], bool]):
        self.predicate = predicate

    def contains_many(self, domain, points):
        return np.array([bool(self.predicate(domain.point(p))) for p in np.atleast_2d(points)], dtype=bool)


# ---------------------------------------------------------------------------
# Shadows and cones
# ---------------------------------------------------------------------------

class ShadowVariant(Enum):
    PLAIN = "plain"
    ENLARGED = "enlarged"
    CONTRACTED = "contracted"


def ball_mesh(domain: ConvexDomain, center: np.ndarray, radius: float,
              density: int = 32, rings: int = 3) -> np.ndarray:
    """Deterministic mesh of the closed Hilbert ball B(center, radius).

    The center plus `rings` concentric rings at radii radius*j/rings, each with
    `density` directions (Halton directions in dimension >= 3).
    """
    center = np.asarray(center, dtype=float)
    dirs = spread_directions(domain.dimension, density)
    exits = domain.exit_points(np.broadcast_to(center, dirs.shape).copy(), dirs)
    radii = radius * np.arange(1, rings + 1) / rings
    pts = [center[None, :]]
    for e in exits:
        pts.append(ray_points(domain, center, e, radii))
    return np.concatenate(pts)


@dataclass(frozen=True)
class Shadow:
    """Shadow of the ball B(target, radius) lit from `source`.

    A boundary source casts along full geodesics. Enlarged and contracted
    variants quantify over a deterministic mesh of B(source, radius) that is
    refined up to `refinements` times when a decision falls near the threshold.
    """

    domain: ConvexDomain
    source: HomogeneousPoint
    target: HomogeneousPoint
    radius: float
    variant: ShadowVariant = ShadowVariant.PLAIN
    density: int = 32
    rings: int = 3
    refinements: int = 2
    source_interior: bool = field(init=False, default=True)

    def __post_init__(self):
        if self.radius <= 0:
            raise ArgumentError("shadow radius must be positive")
        self.domain.require_interior(self.target, "shadow target")
        interior = self.domain.contains(self.source)
        if not interior:
            self.domain.require_boundary(self.source, "shadow source")
        object.__setattr__(self, "source_interior", interior)
        if self.variant is not ShadowVariant.PLAIN:
            if not interior:
                raise ArgumentError("enlarged and contracted shadows need an interior source")
            d = self.domain.distance_many(self.domain.affine(self.source)[None, :],
                                          self.domain.affine(self.target)[None, :])[0]
            if d <= 2.0 * self.radius:
                raise ArgumentError("enlarged and contracted shadows need d(source, target) > 2r")

    def _plain_margins(self, xis: np.ndarray) -> np.ndarray:
        src = self.domain.affine(self.source)
        y = self.domain.affine(self.target)
        if self.source_interior:
            return ray_distance_many(self.domain, src, xis, y) - self.radius
        return line_distance_many(self.domain, src, xis, y) - self.radius

    def members(self, xis: np.ndarray) -> np.ndarray:
        """Membership of affine boundary points of shape (m, n)."""
        xis = np.atleast_2d(np.asarray(xis, dtype=float))
        plain = self._plain_margins(xis) < 0
        if self.variant is ShadowVariant.PLAIN:
            return plain
        src = self.domain.affine(self.source)
        y = self.domain.affine(self.target)
        out = np.empty(len(xis), dtype=bool)
        for i, e in enumerate(xis):
            out[i] = self._mesh_decision(src, y, e)
        if self.variant is ShadowVariant.ENLARGED:
            return plain | out
        return plain & out

    def _mesh_decision(self, src: np.ndarray, y: np.ndarray, e: np.ndarray) -> bool:
        decision = False
        for level in range(self.refinements + 1):
            mesh = ball_mesh(self.domain, src, self.radius, self.density * 2 ** level, self.rings + level)
            margins = ray_distance_many(self.domain, mesh, e, y) - self.radius
            if self.variant is ShadowVariant.ENLARGED:
                decision = bool(np.any(margins < 0))
                critical = np.min(margins)
            else:
                decision = bool(np.all(margins < 0))
                critical = np.max(margins)
            if abs(critical) > NEAR_THRESHOLD * self.radius:
                break
        return decision


def in_shadow(shadow: Shadow, xi: PointLike) -> bool:
    """Whether the boundary point xi lies in the shadow.

    Raises:
        ArgumentError: If the source is a boundary point equal to xi.
    """
    e = shadow.domain.require_boundary(xi, "xi")
    if not shadow.source_interior and np.linalg.norm(e - shadow.domain.affine(shadow.source)) <= 1e-12:
        raise ArgumentError("xi coincides with the boundary light source")
    return bool(shadow.members(e[None, :])[0])


class ConeVariant(Enum):
    EXPANDED = "+"
    CONTRACTED = "-"


def in_cone(domain: ConvexDomain, variant: ConeVariant, x: PointLike, boundary_set: BoundarySet,
            r: float, y: PointLike, density: int = 32, rings: int = 3, refinements: int = 2) -> bool:
    """Cone membership of y over the boundary set, decided on ball meshes.

    The expanded cone asks for some pair (x', y') from the meshes of B(x, r) and
    B(y, r) whose ray x' -> y' exits in the set; the contracted cone asks this for
    every pair. Meshes are refined while the answer has no witness.
    """
    if r <= 0:
        raise ArgumentError("cone radius must be positive")
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    if boundary_set.empty:
        return False
    expanded = variant is ConeVariant.EXPANDED
    result = not expanded
    for level in range(refinements + 1):
        mx = ball_mesh(domain, a, r, density * 2 ** level, rings + level)
        my = ball_mesh(domain, b, r, density * 2 ** level, rings + level)
        starts = np.repeat(mx, len(my), axis=0)
        dirs = np.tile(my, (len(mx), 1)) - starts
        coincide = np.linalg.norm(dirs, axis=1) <= 1e-12
        hits = np.zeros(len(starts), dtype=bool)
        live = ~coincide
        if np.any(live):
            exits = domain.exit_points(starts[live], dirs[live])
            hits[live] = boundary_set.contains_many(domain, exits)
        if expanded:
            result = bool(np.any(hits))
            if result:
                break
        else:
            result = bool(np.all(hits))
            if not result:
                break
    return result


# ---------------------------------------------------------------------------
# Cross-ratio
# ---------------------------------------------------------------------------

def cross_ratio(domain: ConvexDomain, xi: PointLike, xi_prime: PointLike, eta: PointLike,
                eta_prime: PointLike, x: Optional[PointLike] = None) -> float:
    """B(xi, xi', eta, eta') = b(xi,eta) + b(xi',eta') - b(xi,eta') - b(xi',eta).

    Each b(p, q) = -2 <p, q>_x; the sum does not depend on x (default: center).

    Raises:
        ArgumentError: If two of the four points coincide.
    """
    pts = [domain.require_boundary(p, "boundary point") for p in (xi, xi_prime, eta, eta_prime)]
    for i in range(4):
        for j in range(i + 1, 4):
            if np.linalg.norm(pts[i] - pts[j]) <= 1e-12:
                raise ArgumentError("cross-ratio arguments must be pairwise distinct")
    base = domain.center if x is None else domain.require_interior(x, "x")
    e1, e2, f1, f2 = pts
    g = _raw_gromov(domain, base, np.vstack([e1, e2, e1, e2]), np.vstack([f2, f1, f1, f2]))
    return float(2.0 * (g[0] + g[1] - g[2] - g[3]))
