"""Hilbert metric, Finsler norm, geodesics and the geodesic flow."""

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.special import expit

from .domains import ConvexDomain, PointLike
from .errors import ArgumentError, DomainError
from .projective import HomogeneousPoint

ENDPOINT_TOLERANCE = 1e-7


def hilbert_distance(domain: ConvexDomain, x: PointLike, y: PointLike) -> float:
    """Hilbert distance 1/2 log of the cross-ratio of x, y with the chord endpoints.

    Args:
        domain: The convex domain.
        x: Interior point (HomogeneousPoint or affine coordinates).
        y: Interior point.

    Returns:
        The distance; 0 when x and y coincide within 1e-12 in the chart.

    Raises:
        DomainError: If either point is not strictly inside.
    """
    a = domain.require_interior(x, "x")
    b = domain.require_interior(y, "y")
    return float(domain.distance_many(a[None, :], b[None, :])[0])


def hilbert_distance_many(domain: ConvexDomain, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized distances between rows of affine arrays xs and ys."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if not (np.all(domain.inside_many(xs)) and np.all(domain.inside_many(ys))):
        raise DomainError("some points are not inside the domain")
    return domain.distance_many(xs, ys)


def finsler_norm(domain: ConvexDomain, x: PointLike, v: Sequence[float]) -> float:
    """Finsler norm 1/2 (1/|x v+| + 1/|x v-|) |v| of a chart vector v at x."""
    a = domain.require_interior(x, "x")
    vec = np.asarray(v, dtype=float).ravel()
    if not np.any(vec):
        return 0.0
    t_minus, t_plus = domain.chord_params(a, vec)
    return 0.5 * (1.0 / t_plus + 1.0 / -t_minus)


def geodesic_point(domain: ConvexDomain, x: PointLike, xi: PointLike, t: float) -> HomogeneousPoint:
    """Point at Hilbert distance t from x on the ray towards the boundary point xi.

    Raises:
        ArgumentError: If t < 0.
        DomainError: If x is outside, or xi is not on the boundary.
    """
    if t < 0:
        raise ArgumentError("t must be nonnegative; use the opposite endpoint instead")
    a = domain.require_interior(x, "x")
    if t == 0:
        return domain.point(a)
    return domain.point(_ray_point(domain, a, domain.affine(xi), t))


def _ray_point(domain: ConvexDomain, a: np.ndarray, e: np.ndarray, t: float) -> np.ndarray:
    d = e - a
    if not np.any(d):
        raise ArgumentError("xi coincides with x")
    t_minus, t_plus = domain.chord_params(a, d)
    if not domain.approximate and abs(t_plus - 1.0) > ENDPOINT_TOLERANCE:
        raise DomainError(f"xi {e.tolist()} is not on the boundary")
    end = a + t_plus * d
    m = -t_minus / t_plus
    grow = np.exp(2.0 * t)
    remaining = (1.0 + m) / (1.0 + grow * m)
    return end + remaining * (a - end)


def ray_points(domain: ConvexDomain, x: np.ndarray, xi: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Affine points on the ray from x towards xi at each Hilbert time in `times`."""
    times = np.asarray(times, dtype=float)
    d = xi - x
    t_minus, t_plus = domain.chord_params(x, d)
    end = x + t_plus * d
    m = -t_minus / t_plus
    remaining = (1.0 + m) / (1.0 + np.exp(2.0 * times) * m)
    return end + remaining[:, None] * (x - end)


@dataclass(frozen=True)
class UnitTangent:
    """A flow state: oriented boundary endpoints plus a time along the geodesic.

    Time 0 is the chord's Hilbert midpoint, where the two boundary factors agree.
    """

    xi_minus: HomogeneousPoint
    xi_plus: HomogeneousPoint
    time: float = 0.0

    def __post_init__(self):
        if self.xi_minus == self.xi_plus:
            raise ArgumentError("xi_minus and xi_plus must differ")

    @classmethod
    def from_footpoint(cls, domain: ConvexDomain, x: PointLike, direction: Sequence[float]) -> "UnitTangent":
        """Tangent vector at x pointing along direction."""
        a = domain.require_interior(x, "x")
        d = np.asarray(direction, dtype=float).ravel()
        if not np.any(d):
            raise ArgumentError("direction must be nonzero")
        t_minus, t_plus = domain.chord_params(a, d)
        time = 0.5 * np.log(-t_minus / t_plus)
        return cls(domain.point(a + t_minus * d), domain.point(a + t_plus * d), float(time))


def footpoint_coords(start: np.ndarray, end: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Affine footpoints on chords start->end at Hilbert times from the chord midpoint."""
    times = np.asarray(times, dtype=float)
    start = np.atleast_2d(start)
    end = np.atleast_2d(end)
    lam = expit(2.0 * times)[..., None]
    rest = expit(-2.0 * times)[..., None]
    forward = times[..., None] > 0
    return np.where(forward, end + rest * (start - end), start + lam * (end - start))


def chord_times(starts: np.ndarray, ends: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Hilbert times of affine points along chords start->end, measured from the chord midpoint."""
    chord = ends - starts
    lam = np.einsum("ij,ij->i", points - starts, chord) / np.einsum("ij,ij->i", chord, chord)
    lam = np.clip(lam, 1e-15, 1.0 - 1e-15)
    return 0.5 * np.log(lam / (1.0 - lam))


def footpoint(domain: ConvexDomain, v: UnitTangent) -> HomogeneousPoint:
    """Base point of v on the open chord (xi_minus, xi_plus)."""
    start = domain.affine(v.xi_minus)
    end = domain.affine(v.xi_plus)
    return domain.point(footpoint_coords(start, end, np.array([v.time]))[0])


def flow(domain: ConvexDomain, v: UnitTangent, t: float) -> UnitTangent:
    """Geodesic flow on the unit tangent bundle of `domain` for time t; the endpoint pair is untouched.

    Raises:
        DomainError: If an endpoint of v is not on the boundary of `domain`.
    """
    domain.require_boundary(v.xi_minus, "xi_minus")
    domain.require_boundary(v.xi_plus, "xi_plus")
    return replace(v, time=v.time + t)


def flip(v: UnitTangent) -> UnitTangent:
    """Reverse orientation, keeping the footpoint."""
    return UnitTangent(v.xi_plus, v.xi_minus, -v.time)
