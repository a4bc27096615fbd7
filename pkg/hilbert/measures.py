"""Poincaré series, critical exponents and atomic Patterson-Sullivan measures."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .boundary import (BoundarySet, Shadow, closest_line_points, gromov_product, gromov_product_many,
                       ray_distance_many)
from .domains import ConvexDomain, PointLike
from .errors import ArgumentError, ResourceError
from .groups import DEFAULT_CAP, DirichletReducer, GroupPresentation, OrbitBall, enumerate_orbit_ball
from .metric import chord_times, footpoint_coords
from .projective import IsometryType, classify
from .settings import thread_count

logger = logging.getLogger(__name__)

MIN_FIT_ELEMENTS = 200
TAIL_FRACTION = 1e-6
ATOM_QUANTUM = 1e-9
SCHEDULE_OFFSETS = (0.1, 0.05, 0.02)


# ---------------------------------------------------------------------------
# Poincaré series and critical exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalExponentEstimate:
    """Growth-rate estimate of an orbit.

    Attributes:
        delta_hat: Estimated critical exponent (>= 0).
        window: Fit window (t_min, t_max).
        stderr: Standard error of the regression slope.
        method: "slope" or "series-bracket".
        bracket: Interval from the shell-sum bisection containing the exponent.
        count: Orbit points within the truncation radius.
    """

    delta_hat: float
    window: Tuple[float, float]
    stderr: float
    method: str = "slope"
    bracket: Tuple[float, float] = (0.0, 0.0)
    count: int = 0


def _ball(group: GroupPresentation, x: Optional[PointLike], R: float, ball: Optional[OrbitBall],
          cap: int, keep_matrices: bool = False) -> OrbitBall:
    if ball is not None:
        if ball.radius < R:
            raise ArgumentError(f"supplied orbit ball has radius {ball.radius:.3g} < {R:.3g}")
        return ball
    return enumerate_orbit_ball(group, x, R, cap=cap, keep_matrices=keep_matrices)


def _shell_sums(displacements: np.ndarray, weights: np.ndarray, lo: float, hi: float,
                width: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    edges = np.arange(lo, hi + 1e-12, width)
    if len(edges) < 2:
        edges = np.array([lo, hi])
    which = np.searchsorted(edges, displacements, side="left") - 1
    inside = (which >= 0) & (which < len(edges) - 1) & (displacements > lo)
    sums = np.bincount(which[inside], weights=weights[inside], minlength=len(edges) - 1)
    return edges[1:], sums


def _decay_slope(edges: np.ndarray, sums: np.ndarray) -> float:
    live = sums > 0
    if np.count_nonzero(live) < 2:
        return math.nan
    return float(stats.linregress(edges[live], np.log(sums[live])).slope)


def poincare_series(group: GroupPresentation, s: float, x: Optional[PointLike] = None, R: float = 12.0,
                    ball: Optional[OrbitBall] = None, cap: int = DEFAULT_CAP) -> Tuple[float, bool]:
    """Truncated Poincaré series sum of exp(-s d(x, g x)) over d(x, g x) <= R.

    Returns:
        (value, tail_small): tail_small is True when the last dyadic shell
        (R/2, R] contributes less than 1e-6 of the total.

    Raises:
        ArgumentError: If s < 0 or R <= 0.
    """
    if s < 0:
        raise ArgumentError("s must be nonnegative")
    if R <= 0:
        raise ArgumentError("truncation radius must be positive")
    ball = _ball(group, x, R, ball, cap)
    d = ball.sorted_displacements[:ball.count_within(R)]
    terms = np.exp(-s * d)
    value = math.fsum(terms)
    shell = math.fsum(terms[d > 0.5 * R])
    logger.debug("Poincare series s=%.4g R=%.4g: %.10g (%d terms, last shell %.3g)", s, R, value, len(d), shell)
    return value, shell < TAIL_FRACTION * value


def _series_bracket(d: np.ndarray, lo: float, hi: float, iterations: int = 40) -> Tuple[float, float]:
    """Bisect for the smallest s whose unit-shell sums over (lo, hi] stop growing."""
    a, b = 0.0, 1.0
    ones = np.ones_like(d)
    edges, counts = _shell_sums(d, ones, lo, hi)
    if np.count_nonzero(counts) < 2:
        return (0.0, math.inf)
    while _decay_slope(edges, _shell_sums(d, np.exp(-b * d), lo, hi)[1]) > 0:
        b *= 2.0
        if b > 1e3:
            return (b / 2.0, math.inf)
    for _ in range(iterations):
        mid = 0.5 * (a + b)
        if _decay_slope(edges, _shell_sums(d, np.exp(-mid * d), lo, hi)[1]) > 0:
            a = mid
        else:
            b = mid
    return (a, b)


def estimate_critical_exponent(group: GroupPresentation, x: Optional[PointLike] = None, R: float = 12.0,
                               ball: Optional[OrbitBall] = None, method: str = "slope",
                               cap: int = DEFAULT_CAP) -> CriticalExponentEstimate:
    """Estimate the critical exponent from orbit growth over the window [R/2, R].

    The slope method regresses log N(t) on t; the series-bracket method bisects
    for the smallest s at which the unit-shell sums of exp(-s d) decay. Both are
    computed; `method` selects which one is reported as delta_hat.

    Raises:
        ResourceError: If fewer than 200 orbit points lie within R.
        ArgumentError: On an unknown method.
    """
    if method not in ("slope", "series-bracket"):
        raise ArgumentError(f"unknown estimation method {method!r}")
    ball = _ball(group, x, R, ball, cap)
    count = ball.count_within(R)
    if count < MIN_FIT_ELEMENTS:
        raise ResourceError(f"only {count} orbit points within {R:.3g}; at least {MIN_FIT_ELEMENTS} are needed",
                            cap=MIN_FIT_ELEMENTS)
    lo, hi = 0.5 * R, R
    ts = np.linspace(lo, hi, 41)
    fit = stats.linregress(ts, np.log(ball.counts(ts)))
    d = ball.sorted_displacements[:count]
    bracket = _series_bracket(d, lo, hi)
    if method == "slope":
        delta = max(0.0, float(fit.slope))
    else:
        delta = 0.5 * (bracket[0] + bracket[1]) if math.isfinite(bracket[1]) else bracket[0]
    logger.info("critical exponent of %s over [%.3g, %.3g]: slope %.4f +- %.4f, bracket [%.4f, %.4f]",
                group.name, lo, hi, fit.slope, fit.stderr, bracket[0], bracket[1])
    return CriticalExponentEstimate(delta, (lo, hi), float(fit.stderr), method, bracket, count)


# ---------------------------------------------------------------------------
# Atomic measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicMeasure:
    """Finite weighted sum of Dirac masses at interior orbit points.

    Atoms stand for boundary mass through their projections: the exits of the
    rays from the basepoint through them.
    """

    domain: ConvexDomain = field(compare=False, repr=False)
    points: np.ndarray = field(compare=False)
    weights: np.ndarray = field(compare=False)
    distances: np.ndarray = field(compare=False)
    basepoint: np.ndarray = field(compare=False)
    s: float = 0.0
    R: float = 0.0
    normalization: str = "basepoint"
    origin: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if np.any(self.weights < 0):
            raise ArgumentError("atom weights must be nonnegative")
        if len(self.points) != len(self.weights) or len(self.points) != len(self.distances):
            raise ArgumentError("points, weights and distances must have the same length")

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def projections(self) -> np.ndarray:
        """Boundary projections of the atoms from the basepoint; NaN rows for atoms at the basepoint."""
        dirs = self.points - self.basepoint
        at_base = np.linalg.norm(dirs, axis=1) <= 1e-12
        out = np.full(self.points.shape, np.nan)
        if np.any(~at_base):
            live = np.flatnonzero(~at_base)
            out[live] = self.domain.exit_points(np.broadcast_to(self.basepoint, dirs[live].shape).copy(),
                                                dirs[live])
        return out

    def restrict(self, boundary_set: BoundarySet) -> "AtomicMeasure":
        """Atoms whose boundary projection lies in the set."""
        keep = boundary_set.contains_many(self.domain, self.projections())
        return replace(self, points=self.points[keep], weights=self.weights[keep],
                       distances=self.distances[keep])

    def mass(self, boundary_set: BoundarySet) -> float:
        return self.restrict(boundary_set).total_mass

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], on_boundary: bool = True) -> float:
        """Sum of weight * f over atoms; f takes an (m, n) array of boundary projections or atom points."""
        pts = self.projections() if on_boundary else self.points
        values = np.asarray(f(pts), dtype=float)
        return math.fsum(self.weights * values)

    def rebased(self, x: PointLike) -> "AtomicMeasure":
        """The measure with the same atoms and normalization seen from another basepoint."""
        a = self.domain.require_interior(x, "basepoint")
        d = self.domain.distance_many(np.broadcast_to(a, self.points.shape), self.points)
        factor = np.exp(-self.s * (d - self.distances))
        return replace(self, weights=self.weights * factor, distances=d, basepoint=a)


def _merge_atoms(points: np.ndarray, weights: np.ndarray, distances: np.ndarray
                 ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    keys = np.rint(points / ATOM_QUANTUM).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    if len(first) == len(points):
        return points, weights, distances
    logger.debug("merged %d coincident atoms", len(points) - len(first))
    merged = np.bincount(inverse.ravel(), weights=weights, minlength=len(first))
    order = np.argsort(first)
    return points[first][order], merged[order], distances[first][order]


def patterson_sullivan(group: GroupPresentation, x: Optional[PointLike] = None, s: float = 1.0, R: float = 12.0,
                       o: Optional[PointLike] = None, delta_hat: Optional[float] = None,
                       ball: Optional[OrbitBall] = None, cap: int = DEFAULT_CAP) -> AtomicMeasure:
    """Atomic approximation of the Patterson-Sullivan density at x.

    Atoms sit at the orbit points g o with d(o, g o) <= R and carry weight
    exp(-s d(g o, x)) / sum exp(-s d(g o, o)).

    Args:
        group: The group.
        x: Basepoint of the measure (default: o).
        s: Exponent, strictly above the critical exponent.
        R: Truncation radius.
        o: Orbit basepoint (default: domain center).
        delta_hat: Critical exponent estimate; estimated from the ball when omitted.
        ball: Pre-enumerated orbit ball around o with radius >= R.

    Raises:
        ArgumentError: If s <= delta_hat or R is not finite and positive.
    """
    domain = group.domain
    if not (0 < R < math.inf):
        raise ArgumentError("truncation radius must be finite and positive")
    o_aff = domain.center if o is None else domain.require_interior(o, "o")
    x_aff = o_aff if x is None else domain.require_interior(x, "x")
    ball = _ball(group, o_aff, R, ball, cap, keep_matrices=True)
    if delta_hat is None:
        try:
            delta_hat = estimate_critical_exponent(group, o_aff, R, ball=ball).delta_hat
        except ResourceError:
            logger.warning("too few orbit points to estimate the critical exponent; divergence check skipped")
    if delta_hat is not None and s <= delta_hat:
        raise ArgumentError(f"s = {s:.4g} must exceed the critical exponent estimate {delta_hat:.4g}")
    idx = ball.within(R)
    base_h = domain.lift(o_aff)
    points = domain.chart.project(ball.matrices_of(idx) @ base_h)
    to_origin = ball.displacements[idx]
    to_x = domain.distance_many(np.broadcast_to(x_aff, points.shape), points)
    normalizer = math.fsum(np.exp(-s * to_origin))
    weights = np.exp(-s * to_x) / normalizer
    points, weights, to_x = _merge_atoms(points, weights, to_x)
    logger.info("Patterson-Sullivan measure of %s: %d atoms, s=%.4g, R=%.4g", group.name, len(weights), s, R)
    return AtomicMeasure(domain, points, weights, to_x, x_aff, float(s), float(R), "basepoint", o_aff)


@dataclass
class ScheduleReport:
    """Measures along a decreasing exponent schedule and their cap-mass differences."""

    s_values: List[float]
    measures: List[AtomicMeasure]
    cap_masses: np.ndarray
    differences: np.ndarray

    @property
    def shrinking(self) -> bool:
        """True when every cap's successive differences are nonincreasing."""
        if self.differences.shape[0] < 2:
            return True
        return bool(np.all(np.diff(self.differences, axis=0) <= 1e-12))


def patterson_sullivan_schedule(group: GroupPresentation, delta_hat: float, caps: Sequence[BoundarySet],
                                x: Optional[PointLike] = None, R: float = 12.0,
                                offsets: Sequence[float] = SCHEDULE_OFFSETS,
                                ball: Optional[OrbitBall] = None, cap: int = DEFAULT_CAP) -> ScheduleReport:
    """Measures at s = delta_hat + offset with Cauchy differences of the cap masses."""
    if not offsets:
        raise ArgumentError("the exponent schedule is empty")
    ball = _ball(group, x, R, ball, cap, keep_matrices=True)
    s_values = [delta_hat + off for off in sorted(offsets, reverse=True)]
    measures = [patterson_sullivan(group, x, s, R, o=x, delta_hat=delta_hat, ball=ball) for s in s_values]
    masses = np.array([[mu.mass(c) for c in caps] for mu in measures])
    diffs = np.abs(np.diff(masses, axis=0))
    for s, row in zip(s_values[1:], diffs):
        logger.info("schedule s=%.4f: cap differences %s", s, np.array2string(row, precision=4))
    return ScheduleReport(s_values, measures, masses, diffs)


# ---------------------------------------------------------------------------
# Shadows
# ---------------------------------------------------------------------------

def shadow_mass(mu: AtomicMeasure, shadow: Shadow) -> float:
    """Weight of the atoms whose direction from the light source falls in the shadow.

    An atom coinciding with an interior source counts when the source itself is
    within the shadow radius of the target.
    """
    domain = mu.domain
    src = domain.affine(shadow.source)
    if len(mu) == 0:
        return 0.0
    dirs = mu.points - src
    at_source = np.linalg.norm(dirs, axis=1) <= 1e-12
    inside = np.zeros(len(mu), dtype=bool)
    live = np.flatnonzero(~at_source)
    if len(live):
        xis = domain.exit_points(mu.points[live], dirs[live])
        inside[live] = shadow.members(xis)
    if np.any(at_source) and shadow.source_interior:
        y = domain.affine(shadow.target)
        inside[at_source] = domain.distance_many(src[None, :], y[None, :])[0] < shadow.radius
    return math.fsum(mu.weights[inside])


@dataclass
class ShadowLemmaReport:
    """Ratios rho(g) = mu(shadow of B(g x, r)) exp(delta d(x, g x)) over a displacement window."""

    displacements: np.ndarray
    ratios: np.ndarray
    constant: float
    spread: float
    kendall_tau: float
    p_value: float
    empty_shadows: int

    @property
    def drift(self) -> bool:
        return bool(self.p_value < 0.05)


def _shadow_memberships(domain: ConvexDomain, x: np.ndarray, xis: np.ndarray, targets: np.ndarray,
                        r: float) -> np.ndarray:
    """Boolean matrix (targets x boundary points) of plain shadow membership from x."""
    def one(y: np.ndarray) -> np.ndarray:
        return ray_distance_many(domain, x, xis, y) < r

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(one, targets))
    return np.array(rows, dtype=bool).reshape(len(targets), len(xis))


def shadow_lemma_ratios(group: GroupPresentation, mu: AtomicMeasure, delta: float, r: float,
                        window: Tuple[float, float] = (4.0, 10.0), cap: int = DEFAULT_CAP) -> ShadowLemmaReport:
    """Shadow-lemma ratios for every orbit point g x with d(x, g x) in the window.

    The light source is the measure's basepoint x. The reported constant C is
    the smallest value with every positive ratio in [1/C, C].

    Raises:
        ResourceError: If no orbit point falls in the window.
    """
    domain = group.domain
    x = mu.basepoint
    lo, hi = window
    ball = enumerate_orbit_ball(group, x, hi, cap=cap)
    idx = ball.within(hi)
    idx = idx[ball.displacements[idx] >= lo]
    if len(idx) == 0:
        raise ResourceError(f"no orbit points with displacement in [{lo}, {hi}]")
    targets = domain.chart.project(ball.matrices_of(idx) @ domain.lift(x))
    disp = ball.displacements[idx]
    dirs = mu.points - x
    live = np.linalg.norm(dirs, axis=1) > 1e-12
    xis = domain.exit_points(mu.points[live], dirs[live])
    member = _shadow_memberships(domain, x, xis, targets, r)
    masses = member.astype(float) @ mu.weights[live]
    ratios = masses * np.exp(delta * disp)
    positive = ratios > 0
    empty = int(np.count_nonzero(~positive))
    if empty:
        logger.warning("%d of %d shadows hold no atoms; truncation radius %.3g may be too small",
                       empty, len(ratios), mu.R)
    if not np.any(positive):
        raise ResourceError("every shadow in the window is empty")
    rp = ratios[positive]
    constant = float(max(rp.max(), 1.0 / rp.min()))
    tau = stats.kendalltau(disp[positive], rp)
    logger.info("shadow lemma over [%g, %g], r=%g: %d ratios in [%.4g, %.4g], C=%.4g, tau=%.3f",
                lo, hi, r, len(rp), rp.min(), rp.max(), constant, tau.statistic)
    return ShadowLemmaReport(disp, ratios, constant, float(rp.max() / rp.min()), float(tau.statistic),
                             float(tau.pvalue), empty)


def shadow_multiplicity(group: GroupPresentation, r: float, shells: Sequence[float], x: Optional[PointLike] = None,
                        samples: int = 512, cap: int = DEFAULT_CAP) -> Dict[float, int]:
    """Largest number of shadows of B(g x, r), t - 1 < d(x, g x) <= t, over a boundary sample.

    Returns:
        Mapping from each shell's outer radius t to the observed multiplicity.
    """
    domain = group.domain
    a = domain.center if x is None else domain.require_interior(x, "x")
    top = max(shells)
    ball = enumerate_orbit_ball(group, a, top, cap=cap)
    xis = domain.sample_boundary(samples)
    out: Dict[float, int] = {}
    for t in shells:
        idx = ball.within(t)
        idx = idx[ball.displacements[idx] > t - 1.0]
        if len(idx) == 0:
            out[float(t)] = 0
            continue
        targets = domain.chart.project(ball.matrices_of(idx) @ domain.lift(a))
        member = _shadow_memberships(domain, a, xis, targets, r)
        out[float(t)] = int(member.sum(axis=0).max())
        logger.debug("shell %.3g: %d shadows, multiplicity %d", t, len(idx), out[float(t)])
    return out


# ---------------------------------------------------------------------------
# Sullivan measure
# ---------------------------------------------------------------------------

def sullivan_density(domain: ConvexDomain, mu_x: AtomicMeasure, xi: PointLike, eta: PointLike,
                     delta: float) -> float:
    """exp(2 delta <xi, eta>_x) at the measure's basepoint x.

    Raises:
        ArgumentError: If xi and eta coincide.
    """
    return math.exp(2.0 * delta * gromov_product(domain, mu_x.basepoint, xi, eta))


def sullivan_density_many(domain: ConvexDomain, x: np.ndarray, xis: np.ndarray, etas: np.ndarray,
                          delta: float) -> np.ndarray:
    return np.exp(2.0 * delta * gromov_product_many(domain, x, xis, etas))


@dataclass
class FlowSample:
    """Weighted unit tangent vectors drawn from the atomic Sullivan surrogate.

    Each sample is a chord (starts[i], ends[i]) and a time; weights hold the
    density times the slab width, zero outside the Dirichlet domain.
    """

    starts: np.ndarray
    ends: np.ndarray
    times: np.ndarray
    weights: np.ndarray
    slab: float

    def footpoints(self, shift: float = 0.0) -> np.ndarray:
        return footpoint_coords(self.starts, self.ends, self.times + shift)


def sample_flow(mu: AtomicMeasure, delta: float, reducer: DirichletReducer, samples: int,
                seed: int = 0, radius: Optional[float] = None) -> FlowSample:
    """Draw tangent vectors with boundary pairs from mu x mu and times in a slab around the basepoint.

    Times are uniform in [t0 - W, t0 + W] where t0 is the time of the chord point
    closest to the basepoint and W the Dirichlet radius plus 0.5.
    """
    if samples < 1:
        raise ArgumentError("sample count must be positive")
    domain = mu.domain
    rng = np.random.default_rng(seed)
    proj = mu.projections()
    usable = np.flatnonzero(np.all(np.isfinite(proj), axis=1) & (mu.weights > 0))
    if len(usable) < 2:
        raise ResourceError("the measure needs at least two atoms off the basepoint")
    p = mu.weights[usable] / mu.weights[usable].sum()
    i = usable[rng.choice(len(usable), size=samples, p=p)]
    j = usable[rng.choice(len(usable), size=samples, p=p)]
    starts, ends = proj[i], proj[j]
    distinct = np.linalg.norm(starts - ends, axis=1) > 1e-9
    W = (reducer.diameter_estimate if radius is None else radius) + 0.5
    o = reducer.basepoint
    times = np.zeros(samples)
    weights = np.zeros(samples)
    u = rng.uniform(-W, W, size=samples)
    live = np.flatnonzero(distinct)
    if len(live):
        near = closest_line_points(domain, starts[live], ends[live], o)
        t0 = chord_times(starts[live], ends[live], near)
        times[live] = t0 + u[live]
        feet = footpoint_coords(starts[live], ends[live], times[live])
        in_domain = reducer.is_reduced_many(feet)
        density = sullivan_density_many(domain, mu.basepoint, starts[live], ends[live], delta)
        weights[live] = np.where(in_domain, density * 2.0 * W, 0.0)
    logger.debug("flow sample: %d vectors, %d in the Dirichlet domain", samples, int(np.count_nonzero(weights)))
    return FlowSample(starts, ends, times, weights, 2.0 * W)


@dataclass(frozen=True)
class MassEstimate:
    value: float
    stderr: float
    samples: int


def estimate_sullivan_mass(mu: AtomicMeasure, delta: float, reducer: DirichletReducer, samples: int = 20_000,
                           seed: int = 0) -> MassEstimate:
    """Monte-Carlo total mass of the Sullivan surrogate over the Dirichlet domain."""
    flow = sample_flow(mu, delta, reducer, samples, seed)
    scale = mu.total_mass ** 2
    values = scale * flow.weights
    value = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    logger.info("Sullivan mass estimate %.5g +- %.2g from %d samples", value, stderr, samples)
    return MassEstimate(value, stderr, samples)


# ---------------------------------------------------------------------------
# Cusps
# ---------------------------------------------------------------------------

@dataclass
class CuspSeriesBound:
    """Partial sum of (d(x, p x) + 2r) exp(-delta d(x, p x)) over a parabolic subgroup."""

    value: float
    shell_edges: np.ndarray
    shell_sums: np.ndarray
    decays: bool
    slope: float = math.nan


def marker_words(marker: str) -> List[str]:
    return [w for w in marker.replace(",", " ").split() if w and w != "1"]


def cusp_series_bound(group: GroupPresentation, marker: str, x: Optional[PointLike] = None, delta: float = 1.0,
                      r: float = 1.0, R: float = 12.0, cap: int = DEFAULT_CAP) -> CuspSeriesBound:
    """Sum (d + 2r) exp(-delta d) over the ball of radius R in the subgroup generated by `marker`.

    Shell sums use unit shells; `decays` is True when their log-linear slope
    over the top half of the range is negative. An empty or trivial marker
    leaves the identity term 2r.

    Raises:
        ArgumentError: If a marker word is not parabolic.
    """
    words = marker_words(marker)
    if not words:
        return CuspSeriesBound(2.0 * r, np.zeros(0), np.zeros(0), False)
    for w in words:
        kind = classify(group.word(w).matrix, group.domain).kind
        if kind is not IsometryType.PARABOLIC:
            raise ArgumentError(f"marker word {w!r} is {kind.value}, not parabolic")
    sub = group.subgroup(words, name=f"{group.name}<{','.join(words)}>")
    ball = enumerate_orbit_ball(sub, x, R, cap=cap, keep_matrices=False)
    d = ball.sorted_displacements[:ball.count_within(R)]
    terms = (d + 2.0 * r) * np.exp(-delta * d)
    edges, sums = _shell_sums(d, terms, 0.0, R)
    top = edges > 0.5 * R
    slope = _decay_slope(edges[top], sums[top])
    decays = bool(math.isfinite(slope) and slope < 0)
    logger.info("cusp series for %s at delta=%.4g: %.6g over %d elements, shell slope %.4f",
                sub.name, delta, math.fsum(terms), len(d), slope)
    return CuspSeriesBound(math.fsum(terms), edges, sums, decays, slope)
