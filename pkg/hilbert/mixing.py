"""Correlations of the geodesic flow on the quotient, estimated by Monte Carlo.

Test functions live on the Dirichlet domain of the basepoint: a footpoint is
reduced into the domain before a function is evaluated on it.
"""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .boundary import closest_line_points
from .domains import ConvexDomain
from .errors import ArgumentError, ConfigError
from .groups import ClosedGeodesic, DirichletReducer
from .measures import FlowSample
from .metric import chord_times, footpoint_coords
from .settings import thread_count

logger = logging.getLogger(__name__)

REDUCTION_CHUNK = 4096


class Observable(ABC):
    """Bounded function of a footpoint in the Dirichlet domain."""

    constant = False

    @abstractmethod
    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Values at affine points of shape (m, n)."""


class ConstantFunction(Observable):
    constant = True

    def __init__(self, value: float = 1.0):
        self.value = float(value)

    def __call__(self, points):
        return np.full(len(np.atleast_2d(points)), self.value)

    def __repr__(self) -> str:
        return f"ConstantFunction({self.value:g})"


class BallIndicator(Observable):
    """Indicator of the closed Hilbert ball B(center, radius)."""

    def __init__(self, domain: ConvexDomain, center: np.ndarray, radius: float):
        if radius <= 0:
            raise ArgumentError("ball radius must be positive")
        self.domain = domain
        self.center = domain.require_interior(center, "ball center")
        self.radius = float(radius)

    def __call__(self, points):
        pts = np.atleast_2d(points)
        d = self.domain.distance_many(np.broadcast_to(self.center, pts.shape), pts)
        return (d <= self.radius).astype(float)

    def __repr__(self) -> str:
        return f"BallIndicator(center={self.center.tolist()}, radius={self.radius:g})"


def parse_observable(text: str, domain: ConvexDomain, basepoint: np.ndarray) -> Observable:
    """Parse `one`, `const <c>` or `ball <r> [<center coords>]`.

    Raises:
        ConfigError: On an unknown form or bad numbers.
    """
    tokens = text.split()
    if not tokens:
        raise ConfigError("empty test function", key="phi")
    kind = tokens[0].lower()
    try:
        if kind in ("one", "1"):
            return ConstantFunction(1.0)
        if kind == "const" and len(tokens) == 2:
            return ConstantFunction(float(tokens[1]))
        if kind == "ball" and len(tokens) >= 2:
            center = np.array([float(v) for v in tokens[2:]]) if len(tokens) > 2 else basepoint
            return BallIndicator(domain, center, float(tokens[1]))
    except ValueError as exc:
        raise ConfigError(f"cannot parse test function {text!r}", key="phi") from exc
    raise ConfigError(f"unknown test function {text!r}", key="phi")


@dataclass(frozen=True)
class CorrelationEstimate:
    """Weighted correlation of phi after flowing for time t against psi."""

    t: float
    correlation: float
    product: float
    stderr: float

    @property
    def difference(self) -> float:
        return self.correlation - self.product


def reduce_points(reducer: DirichletReducer, points: np.ndarray) -> np.ndarray:
    """Dirichlet-reduce rows of affine points in chunks on the worker pool."""
    pts = np.atleast_2d(points)
    if len(pts) == 0:
        return pts
    starts = range(0, len(pts), REDUCTION_CHUNK)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        parts = list(pool.map(lambda s: reducer.reduce_many(pts[s:s + REDUCTION_CHUNK])[0], starts))
    return np.concatenate(parts)


class MixingEstimator:
    """Weighted Monte-Carlo correlations over a fixed flow sample.

    Only samples with positive weight (footpoint inside the Dirichlet domain)
    are kept; reduced footpoints are cached per flow time.
    """

    def __init__(self, sample: FlowSample, reducer: DirichletReducer, bootstrap: int = 200, seed: int = 0):
        live = sample.weights > 0
        if not np.any(live):
            raise ArgumentError("the flow sample has no vector in the Dirichlet domain")
        self.reducer = reducer
        self.starts = sample.starts[live]
        self.ends = sample.ends[live]
        self.times = sample.times[live]
        self.weights = sample.weights[live]
        self.total = float(np.sum(self.weights))
        self.bootstrap = bootstrap
        self.seed = seed
        self._reduced: Dict[float, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.weights)

    def reduced_footpoints(self, t: float) -> np.ndarray:
        if t not in self._reduced:
            feet = footpoint_coords(self.starts, self.ends, self.times + t)
            self._reduced[t] = reduce_points(self.reducer, feet)
            logger.debug("reduced %d footpoints at t=%g", len(feet), t)
        return self._reduced[t]

    def mean(self, f: Observable) -> float:
        return float(np.sum(self.weights * f(self.reduced_footpoints(0.0))) / self.total)

    def correlation(self, phi: Observable, psi: Observable, t: float) -> CorrelationEstimate:
        """Estimate of the integral of (phi o g^t) psi against the normalized surrogate measure."""
        w = self.weights
        phi_t = phi(self.reduced_footpoints(t))
        phi_0 = phi(self.reduced_footpoints(0.0))
        psi_0 = psi(self.reduced_footpoints(0.0))
        corr = float(np.sum(w * phi_t * psi_0) / self.total)
        product = float(np.sum(w * phi_0) / self.total) * float(np.sum(w * psi_0) / self.total)
        stderr = self._bootstrap(phi_t, phi_0, psi_0)
        logger.info("correlation at t=%g: %.6g vs product %.6g (stderr %.3g)", t, corr, product, stderr)
        return CorrelationEstimate(float(t), corr, product, stderr)

    def _bootstrap(self, phi_t: np.ndarray, phi_0: np.ndarray, psi_0: np.ndarray) -> float:
        if self.bootstrap < 2:
            return math.nan
        rng = np.random.default_rng(self.seed)
        n = len(self.weights)
        diffs = np.empty(self.bootstrap)
        for b in range(self.bootstrap):
            idx = rng.integers(0, n, size=n)
            w = self.weights[idx]
            total = np.sum(w)
            corr = np.sum(w * phi_t[idx] * psi_0[idx]) / total
            diffs[b] = corr - (np.sum(w * phi_0[idx]) / total) * (np.sum(w * psi_0[idx]) / total)
        return float(np.std(diffs, ddof=1))


def closed_orbit_average(domain: ConvexDomain, geodesic: ClosedGeodesic, f: Observable,
                         reducer: DirichletReducer, samples: int = 16) -> float:
    """Average of f over evenly spaced footpoints along one period of a closed geodesic."""
    start = domain.affine(geodesic.repelling)[None, :]
    end = domain.affine(geodesic.attracting)[None, :]
    near = closest_line_points(domain, start, end, reducer.basepoint)
    t0 = float(chord_times(start, end, near)[0])
    times = t0 + geodesic.length * (np.arange(samples) + 0.5) / samples
    feet = footpoint_coords(np.repeat(start, samples, axis=0), np.repeat(end, samples, axis=0), times)
    return float(np.mean(f(reducer.reduce_many(feet)[0])))


def closed_orbit_integral(domain: ConvexDomain, geodesics: Sequence[ClosedGeodesic], f: Observable,
                          reducer: DirichletReducer, delta: float, length: float,
                          samples: int = 16) -> Optional[float]:
    """delta L exp(-delta L) times the sum of orbit averages over geodesics of length <= L."""
    chosen = [g for g in geodesics if g.length <= length]
    if not chosen:
        return None
    total = math.fsum(closed_orbit_average(domain, g, f, reducer, samples) for g in chosen)
    return delta * length * math.exp(-delta * length) * total
