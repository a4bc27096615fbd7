"""Desk-scale experiments on orbit growth, closed geodesics and mixing.

`ExperimentRunner.run(name)` dispatches to one `_run_*` method per experiment.
Each returns an ExperimentResult with tables, fitted parameters and verdicts
against the tolerances of the run configuration.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from .boundary import Cap, FullBoundary
from .catalog import group_from_config
from .config import RunConfig, serialize_config
from .errors import ArgumentError, ResourceError
from .groups import (ClosedGeodesic, DirichletReducer, GroupPresentation, OrbitBall, enumerate_orbit_ball,
                     enumerate_primitive_geodesics)
from .measures import (AtomicMeasure, CriticalExponentEstimate, cusp_series_bound, estimate_critical_exponent,
                       estimate_sullivan_mass, marker_words, patterson_sullivan, patterson_sullivan_schedule,
                       sample_flow, shadow_lemma_ratios, shadow_multiplicity)
from .metric import ray_points
from .mixing import ConstantFunction, MixingEstimator, closed_orbit_average, parse_observable
from .oracles import cyclic_words, letter_bound
from .storage import Table

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "orbit-counting",
    "orbit-equidistribution",
    "geodesic-counting",
    "mixing",
    "length-spectrum",
    "critical-gap",
    "shadow-lemma",
    "ps-schedule",
)


@dataclass
class Verdict:
    """Outcome of one acceptance criterion."""

    criterion: str
    passed: bool
    observed: Any
    threshold: Any
    detail: str = ""


@dataclass
class ExperimentResult:
    """Tables, fits and verdicts of one experiment run."""

    experiment: str
    config: RunConfig
    tables: Dict[str, Table]
    fits: Dict[str, Any] = field(default_factory=dict)
    verdicts: List[Verdict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def table(self) -> Table:
        return self.tables["main"]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def verdict(self, criterion: str) -> Verdict:
        for v in self.verdicts:
            if v.criterion == criterion:
                return v
        raise KeyError(criterion)

    def to_manifest(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "config_hash": self.config.digest(),
            "seed": self.config.seed,
            "passed": self.passed,
            "fits": self.fits,
            "verdicts": [
                {"criterion": v.criterion, "passed": bool(v.passed), "observed": v.observed,
                 "threshold": v.threshold, "detail": v.detail}
                for v in self.verdicts
            ],
            "seconds": round(self.seconds, 3),
        }

    def config_text(self) -> str:
        return serialize_config(self.config)


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    return np.arange(lo, hi + 0.5 * step, step)


def _mod_one_mesh(lengths: np.ndarray, max_coefficient: int = 3) -> float:
    """Largest gap of {a l_i + b l_j mod 1 : |a|, |b| <= max_coefficient} on the circle."""
    ls = np.unique(np.round(lengths, 12))
    coeffs = np.arange(-max_coefficient, max_coefficient + 1)
    values = [np.outer(coeffs, ls).ravel()]
    i, j = np.triu_indices(len(ls), k=1)
    if len(i):
        a, b = np.meshgrid(coeffs, coeffs, indexing="ij")
        values.append((a.ravel()[:, None] * ls[i][None, :] + b.ravel()[:, None] * ls[j][None, :]).ravel())
    points = np.unique(np.mod(np.concatenate(values), 1.0))
    if len(points) == 1:
        return 1.0
    gaps = np.diff(points)
    return float(max(gaps.max(), 1.0 - points[-1] + points[0]))


def _trend_toward_one(ratios: np.ndarray, slack: float = 0.05) -> bool:
    return bool(abs(ratios[-1] - 1.0) <= abs(ratios[0] - 1.0) + slack)


class ExperimentRunner:
    """Runs named experiments for one configuration.

    Orbit balls, the exponent estimate, the Dirichlet reducer and the
    Patterson-Sullivan measure are built on first use and shared between
    experiments of the same runner.
    """

    def __init__(self, config: RunConfig, group: Optional[GroupPresentation] = None):
        self.config = config
        self.group = group or group_from_config(config)
        self.domain = self.group.domain
        bp = config.basepoints
        self.x = self.domain.require_interior(bp.x, "x") if bp.x else self.domain.center
        self.y = self.domain.require_interior(bp.y, "y") if bp.y else self.x
        self._balls: Dict[Tuple[float, bool, bool], OrbitBall] = {}
        self._estimate: Optional[CriticalExponentEstimate] = None
        self._dirichlet: Optional[DirichletReducer] = None
        self._measure: Optional[AtomicMeasure] = None
        self._census: Optional[List[ClosedGeodesic]] = None

    def run(self, name: str) -> ExperimentResult:
        """Run one experiment by id.

        Raises:
            ArgumentError: On an unknown experiment id.
        """
        handlers: Dict[str, Callable[[], ExperimentResult]] = {
            "orbit-counting": self._run_orbit_counting,
            "orbit-equidistribution": self._run_orbit_equidistribution,
            "geodesic-counting": self._run_geodesic_counting,
            "mixing": self._run_mixing,
            "length-spectrum": self._run_length_spectrum,
            "critical-gap": self._run_critical_gap,
            "shadow-lemma": self._run_shadow_lemma,
            "ps-schedule": self._run_ps_schedule,
        }
        if name not in handlers:
            raise ArgumentError(f"unknown experiment {name!r}; known: {', '.join(EXPERIMENTS)}")
        logger.info("running %s on %s (seed %d)", name, self.group.name, self.config.seed)
        start = time.perf_counter()
        result = handlers[name]()
        result.seconds = time.perf_counter() - start
        for v in result.verdicts:
            logger.info("%s: %s %s (observed %s, threshold %s)", name, v.criterion,
                        "pass" if v.passed else "FAIL", v.observed, v.threshold)
        return result

    # -- shared state -------------------------------------------------------

    def _orbit_ball(self, radius: float, to_y: bool = False, keep_matrices: bool = False) -> OrbitBall:
        for (r, y, keep), ball in self._balls.items():
            if r >= radius and y == to_y and (keep or not keep_matrices):
                return ball
        ball = enumerate_orbit_ball(self.group, self.x, radius, target=self.y if to_y else None,
                                    margin=self.config.group.margin, cap=self.config.group.cap,
                                    keep_matrices=keep_matrices)
        self._balls[(radius, to_y, keep_matrices)] = ball
        return ball

    def _exponent(self) -> CriticalExponentEstimate:
        if self._estimate is None:
            R = self.config.sweep.R
            self._estimate = estimate_critical_exponent(self.group, self.x, R, ball=self._orbit_ball(R))
        return self._estimate

    def _reducer(self) -> DirichletReducer:
        if self._dirichlet is None:
            self._dirichlet = DirichletReducer(self.group, self.x, cap=self.config.group.cap)
            self._dirichlet.measure_diameter(seed=self.config.seed)
        return self._dirichlet

    def _ps_measure(self, R: Optional[float] = None) -> AtomicMeasure:
        R = self.config.sweep.ps_radius if R is None else R
        if self._measure is None or self._measure.R != R:
            delta = self._exponent().delta_hat
            s = delta + min(self.config.sweep.schedule)
            self._measure = patterson_sullivan(self.group, self.x, s, R, o=self.x, delta_hat=delta,
                                               ball=self._orbit_ball(R, keep_matrices=True))
        return self._measure

    def _caps(self) -> List[Cap]:
        caps = [Cap(tuple(row[:-1]), float(row[-1])) for row in self.config.sweep.caps]
        if not caps:
            raise ArgumentError("the experiment needs at least one boundary cap")
        return caps

    def _primitive_geodesics(self) -> List[ClosedGeodesic]:
        if self._census is None:
            reducer = None if self.group.free else self._reducer()
            self._census = enumerate_primitive_geodesics(self.group, self.config.sweep.l_max, basepoint=self.x,
                                                         reducer=reducer, cap=self.config.group.cap)
        return self._census

    def _other_basepoint(self) -> np.ndarray:
        if np.linalg.norm(self.y - self.x) > 1e-12:
            return self.y
        xi = self.domain.sample_boundary(1)[0]
        return ray_points(self.domain, self.x, xi, np.array([0.5]))[0]

    # -- experiments --------------------------------------------------------

    def _run_orbit_counting(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        R = sweep.R
        ball = self._orbit_ball(R, to_y=True)
        ts = _grid(sweep.t_min, R, sweep.t_step)
        counts = ball.counts(ts)
        window = (ts >= 0.5 * R) & (counts > 0)
        if np.count_nonzero(window) < 2:
            raise ResourceError("too few nonempty counts in the fit window")
        fit = stats.linregress(ts[window], np.log(counts[window]))
        delta = max(0.0, float(fit.slope))
        normalized = counts * np.exp(-delta * ts)
        top = normalized[window]
        spread = float((top.max() - top.min()) / top.mean())

        main = Table(["t", "N", "stderr", "normalized"])
        for t, n, v in zip(ts, counts, normalized):
            main.add(float(t), int(n), 0.0, float(v))
        verdicts = []
        monotone = bool(np.all(np.diff(counts) >= 0))
        same = np.linalg.norm(self.x - self.y) <= 1e-12
        if same and ts[0] == 0.0:
            monotone = monotone and int(counts[0]) == 1
        verdicts.append(Verdict("monotone-counts", monotone, monotone, True, "N nondecreasing, N(0) = 1"))
        expected = self.config.tests.expected_delta
        if expected is not None:
            verdicts.append(Verdict("exponent", abs(delta - expected) <= tol.slope, round(delta, 6),
                                    f"{expected} +- {tol.slope}", "slope of log N over the top half"))
        verdicts.append(Verdict("ratio-spread", spread < tol.spread, round(spread, 6), tol.spread,
                                "relative spread of N(t) exp(-delta t) over the top half"))
        fits = {"delta_hat": delta, "stderr": float(fit.stderr), "intercept": float(fit.intercept),
                "window": [float(ts[window][0]), float(ts[window][-1])], "spread": spread}
        return ExperimentResult("orbit-counting", self.config, {"main": main}, fits, verdicts)

    @staticmethod
    def _nu(delta: float, mass: float, t: float, count: int) -> float:
        return delta * mass * math.exp(-delta * t) * count

    def _run_orbit_equidistribution(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        caps = self._caps()
        R = sweep.R
        estimate = self._exponent()
        delta = estimate.delta_hat
        mu_x = self._ps_measure()
        mu_y = mu_x.rebased(self.y)
        for cap in caps:
            if mu_x.mass(cap) <= 0 or mu_y.mass(cap) <= 0:
                raise ArgumentError(f"cap {cap} carries no sampled mass")
        mass = estimate_sullivan_mass(mu_x, delta, self._reducer(), min(sweep.samples, 50_000), self.config.seed)

        ball = self._orbit_ball(R, to_y=True, keep_matrices=True)
        idx = ball.within(R)
        mats = ball.matrices_of(idx)
        disp = ball.displacements[idx]
        chart = self.domain.chart
        gy = chart.project(mats @ self.domain.lift(self.y))
        ginv_x = chart.project(np.linalg.inv(mats) @ self.domain.lift(self.x))

        labelled = [("full", FullBoundary())] + [(f"cap{i}", c) for i, c in enumerate(caps)]
        ts = _grid(0.5 * R, R, 1.0)
        main = Table(["t", "A", "B", "nu", "cauchy", "product", "ratio"])
        shrink_ok = True
        for name_a, a in labelled:
            in_a = a.contains_many(self.domain, gy)
            for name_b, b in labelled:
                if (name_a == "full") != (name_b == "full"):
                    continue
                in_b = b.contains_many(self.domain, ginv_x)
                product = mu_x.mass(a) * mu_y.mass(b)
                values = []
                for t in ts:
                    count = int(np.count_nonzero(in_a & in_b & (disp <= t)))
                    values.append(self._nu(delta, mass.value, float(t), count))
                diffs = np.abs(np.diff(values))
                for k, (t, nu) in enumerate(zip(ts, values)):
                    cauchy = float(diffs[k - 1]) if k else math.nan
                    main.add(float(t), name_a, name_b, nu, cauchy, product,
                             nu / product if product > 0 else math.nan)
                live = diffs > 0
                if name_a != "full" and np.count_nonzero(live) >= 2:
                    slope = stats.linregress(ts[1:][live], np.log(diffs[live])).slope
                    shrink_ok = shrink_ok and slope <= math.log(1.0 - tol.cauchy_shrink)

        full_counts = ball.counts(ts)
        full_rows = [row for row in main.rows if row[1] == "full"]
        consistent = all(row[3] == self._nu(delta, mass.value, float(t), int(n))
                         for row, t, n in zip(full_rows, ts, full_counts))
        verdicts = [
            Verdict("full-boundary-consistency", consistent, consistent, True,
                    "nu_t of the full boundary equals the scaled orbit count"),
            Verdict("cauchy-shrink", shrink_ok, shrink_ok, tol.cauchy_shrink,
                    "Cauchy differences shrink by the given fraction per unit t"),
        ]
        fits = {"delta_hat": delta, "sullivan_mass": mass.value, "sullivan_mass_stderr": mass.stderr,
                "cap_masses_x": [mu_x.mass(c) for c in caps], "cap_masses_y": [mu_y.mass(c) for c in caps]}
        return ExperimentResult("orbit-equidistribution", self.config, {"main": main}, fits, verdicts)

    def _run_geodesic_counting(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        L = sweep.l_max
        geodesics = self._primitive_geodesics()
        lengths = np.array([g.length for g in geodesics])
        delta = self._exponent().delta_hat
        ls = _grid(sweep.l_step, L, sweep.l_step)
        counts = np.searchsorted(np.sort(lengths), ls, side="right")
        ratios = counts * delta * ls * np.exp(-delta * ls)

        main = Table(["length", "count", "stderr", "ratio"])
        for ell, n, q in zip(ls, counts, ratios):
            main.add(float(ell), int(n), 0.0, float(q))
        window = ls >= 0.5 * L
        top = ratios[window]
        verdicts = [
            Verdict("ratio-window", bool(np.all((top >= tol.ratio_low) & (top <= tol.ratio_high))),
                    [round(float(top.min()), 6), round(float(top.max()), 6)], [tol.ratio_low, tol.ratio_high],
                    "count * delta l exp(-delta l) over the top half"),
            Verdict("ratio-trend", _trend_toward_one(top), round(float(top[-1]), 6), 1.0,
                    "final ratio no farther from 1 than the window start"),
        ]
        if self.group.free:
            max_letters = letter_bound(self.group, L)
            report = cyclic_words(self.group, L, max_letters, census_lengths=list(lengths))
            verdicts.append(Verdict("cyclic-word-oracle", report.passed, report.details["census"],
                                    report.details["reference"], report.summary))

        tables = {"main": main}
        fits: Dict[str, Any] = {"delta_hat": delta, "classes": len(geodesics)}
        if self.config.tests.phi and geodesics:
            tables["equidistribution"], fits["equidistribution"] = self._closed_orbit_equidistribution(
                geodesics, delta, ls)
        return ExperimentResult("geodesic-counting", self.config, tables, fits, verdicts)

    def _closed_orbit_equidistribution(self, geodesics: List[ClosedGeodesic], delta: float,
                                       ls: np.ndarray) -> Tuple[Table, Dict[str, float]]:
        reducer = self._reducer()
        phi = parse_observable(self.config.tests.phi, self.domain, self.x)
        order = np.argsort([g.length for g in geodesics], kind="stable")
        ordered = [geodesics[i] for i in order]
        averages = np.array([closed_orbit_average(self.domain, g, phi, reducer) for g in ordered])
        cumulative = np.cumsum(averages)
        sorted_lengths = np.array([g.length for g in ordered])
        table = Table(["length", "closed_orbit_integral"])
        for ell in ls:
            n = int(np.searchsorted(sorted_lengths, ell, side="right"))
            value = delta * ell * math.exp(-delta * ell) * (cumulative[n - 1] if n else 0.0)
            table.add(float(ell), float(value))
        sample = sample_flow(self._ps_measure(), delta, reducer, min(self.config.sweep.samples, 20_000),
                             self.config.seed)
        reference = MixingEstimator(sample, reducer, bootstrap=0).mean(phi)
        final = table.rows[-1][1]
        logger.info("closed-orbit integral %.5g vs Sullivan mean %.5g", final, reference)
        return table, {"closed_orbit_integral": final, "sullivan_mean": reference}

    def _run_mixing(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        delta = self._exponent().delta_hat
        reducer = self._reducer()
        sample = sample_flow(self._ps_measure(), delta, reducer, sweep.samples, self.config.seed)
        estimator = MixingEstimator(sample, reducer, sweep.bootstrap, self.config.seed)
        phi = parse_observable(self.config.tests.phi, self.domain, self.x)
        psi = parse_observable(self.config.tests.psi, self.domain, self.x)

        main = Table(["t", "difference", "stderr", "correlation", "product"])
        estimates = [estimator.correlation(phi, psi, float(t)) for t in sorted(sweep.t_grid)]
        for e in estimates:
            main.add(e.t, e.difference, e.stderr, e.correlation, e.product)
        last = estimates[-1]
        verdicts = [Verdict("decorrelation", abs(last.difference) <= max(tol.sigma * last.stderr, 1e-12),
                            round(abs(last.difference), 8), f"{tol.sigma} * {last.stderr:.3g}",
                            f"|correlation - product| at t = {last.t:g}")]
        if isinstance(phi, ConstantFunction):
            worst = max(abs(e.difference) for e in estimates)
            verdicts.append(Verdict("constant-observable", worst <= 1e-12, worst, 0.0,
                                    "a constant phi decorrelates exactly"))
        fits = {"delta_hat": delta, "samples": sweep.samples, "effective_samples": len(estimator),
                "phi": repr(phi), "psi": repr(psi)}
        return ExperimentResult("mixing", self.config, {"main": main}, fits, verdicts)

    def _run_length_spectrum(self) -> ExperimentResult:
        sweep = self.config.sweep
        lengths = np.sort([g.length for g in self._primitive_geodesics()])
        if len(lengths) < 2:
            raise ResourceError(f"only {len(lengths)} primitive lengths up to {sweep.l_max:g}")
        main = Table(["length", "mesh", "stderr", "lengths"])
        for ell in _grid(sweep.l_step, sweep.l_max, sweep.l_step):
            chosen = lengths[lengths <= ell]
            mesh = _mod_one_mesh(chosen) if len(chosen) else 1.0
            main.add(float(ell), mesh, 0.0, len(chosen))
        final = main.rows[-1][1]
        verdicts = [Verdict("dense-mod-one", final < sweep.epsilon, round(final, 8), sweep.epsilon,
                            "largest gap of integer combinations of lengths modulo 1")]
        fits = {"mesh": final, "distinct_lengths": int(len(np.unique(np.round(lengths, 12))))}
        return ExperimentResult("length-spectrum", self.config, {"main": main}, fits, verdicts)

    def _run_critical_gap(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        marker = self.config.group.parabolic or " ".join(self.group.parabolics)
        words = marker_words(marker)
        if not words:
            raise ArgumentError("the critical-gap experiment needs a nontrivial parabolic marker")
        whole = self._exponent()
        sub = self.group.subgroup(words)
        cusp_ball = enumerate_orbit_ball(sub, self.x, sweep.R, cap=self.config.group.cap, keep_matrices=False)
        parabolic = estimate_critical_exponent(sub, self.x, sweep.R, ball=cusp_ball)
        gap = whole.delta_hat - parabolic.delta_hat
        noise = tol.sigma * (whole.stderr + parabolic.stderr)
        cusp = cusp_series_bound(self.group, marker, self.x, whole.delta_hat, sweep.shadow_radius, sweep.R,
                                 cap=self.config.group.cap)

        main = Table(["quantity", "delta_hat", "stderr"])
        main.add("group", whole.delta_hat, whole.stderr)
        main.add("parabolic", parabolic.delta_hat, parabolic.stderr)
        main.add("gap", gap, whole.stderr + parabolic.stderr)
        shells = Table(["shell", "sum"])
        for edge, total in zip(cusp.shell_edges, cusp.shell_sums):
            shells.add(float(edge), float(total))
        verdicts = [
            Verdict("critical-gap", gap > max(tol.gap, noise), round(gap, 6), round(max(tol.gap, noise), 6),
                    "group exponent exceeds the parabolic exponent"),
            Verdict("cusp-series-decay", cusp.decays, round(cusp.slope, 6), 0.0,
                    "shell sums of the cusp series decay at the group exponent"),
        ]
        fits = {"delta_group": whole.delta_hat, "delta_parabolic": parabolic.delta_hat, "gap": gap,
                "cusp_series": cusp.value, "marker": words}
        return ExperimentResult("critical-gap", self.config, {"main": main, "cusp_shells": shells}, fits, verdicts)

    def _run_shadow_lemma(self) -> ExperimentResult:
        sweep, tol = self.config.sweep, self.config.tolerances
        delta = self._exponent().delta_hat
        mu = self._ps_measure(sweep.R)
        lo, hi = sweep.window
        report = shadow_lemma_ratios(self.group, mu, delta, sweep.shadow_radius, (lo, hi),
                                     cap=self.config.group.cap)
        shells = [float(t) for t in np.arange(math.floor(lo) + 1, math.floor(hi) + 1)]
        multiplicity = shadow_multiplicity(self.group, sweep.shadow_radius, shells, self.x,
                                           cap=self.config.group.cap)

        main = Table(["displacement", "ratio", "stderr"])
        order = np.argsort(report.displacements, kind="stable")
        for d, q in zip(report.displacements[order], report.ratios[order]):
            main.add(float(d), float(q), 0.0)
        cover = Table(["shell", "multiplicity"])
        for t, m in multiplicity.items():
            cover.add(t, m)
        verdicts = [
            Verdict("shadow-constant", report.spread < tol.shadow_ratio, round(report.spread, 6),
                    tol.shadow_ratio, "max/min of the shadow-lemma ratios"),
            Verdict("no-drift", not report.drift, round(report.p_value, 6), 0.05,
                    "Kendall tau of ratio against displacement"),
        ]
        fits = {"delta_hat": delta, "constant": report.constant, "kendall_tau": report.kendall_tau,
                "empty_shadows": report.empty_shadows, "multiplicity": max(multiplicity.values(), default=0)}
        return ExperimentResult("shadow-lemma", self.config, {"main": main, "multiplicity": cover}, fits, verdicts)

    def _run_ps_schedule(self) -> ExperimentResult:
        sweep = self.config.sweep
        caps = self._caps()
        delta = self._exponent().delta_hat
        R = sweep.ps_radius
        ball = self._orbit_ball(R, keep_matrices=True)
        report = patterson_sullivan_schedule(self.group, delta, caps, self.x, R, sweep.schedule, ball=ball)

        main = Table(["s", "cap", "mass", "cauchy"])
        for k, s in enumerate(report.s_values):
            for c in range(len(caps)):
                cauchy = float(report.differences[k - 1, c]) if k else math.nan
                main.add(s, f"cap{c}", float(report.cap_masses[k, c]), cauchy)

        mu = report.measures[-1]
        other = self._other_basepoint()
        direct = patterson_sullivan(self.group, other, mu.s, R, o=self.x, delta_hat=delta, ball=ball)
        rebased = mu.rebased(other)
        conformal = bool(np.allclose(direct.weights, rebased.weights, rtol=1e-10, atol=0.0))
        g = self.group.matrices[0]
        gx = self.domain.chart.project((g @ self.domain.lift(self.x))[None, :])
        moved = self.domain.chart.project(self.domain.lift(mu.points) @ g.T)
        shifted = self.domain.distance_many(np.broadcast_to(gx, moved.shape), moved)
        equivariance = float(np.max(np.abs(shifted - mu.distances)))
        verdicts = [
            Verdict("schedule-shrinking", report.shrinking, report.differences.tolist(), "nonincreasing",
                    "Cauchy differences of cap masses along the exponent schedule"),
            Verdict("conformality", conformal, conformal, True,
                    "rebased weights equal the measure built at the other basepoint"),
            Verdict("equivariance", equivariance <= 1e-9, equivariance, 1e-9,
                    "atom distances are preserved by a generator"),
        ]
        fits = {"delta_hat": delta, "s_values": report.s_values,
                "total_masses": [m.total_mass for m in report.measures]}
        return ExperimentResult("ps-schedule", self.config, {"main": main}, fits, verdicts)
