"""Command-line front end.

Exit codes: 0 on success or passing verdicts, 1 when a verdict or oracle
fails, 2 on usage errors and on any HilbertError.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
import numpy as np

from . import oracles
from .catalog import BUILTIN_PREFIX, build_domain, group_from_config, load_group, write_generators
from .config import RunConfig, load_config
from .domains import ConvexDomain, Ellipsoid
from .errors import ConfigError, HilbertError, OutputError
from .experiments import EXPERIMENTS, ExperimentRunner
from .measures import estimate_critical_exponent, patterson_sullivan
from .metric import hilbert_distance
from .projective import classify
from .settings import configure_logging
from .storage import write_measure, write_run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _coords(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"cannot parse coordinates {text!r}", key=name) from exc


def _domain_from_file(path: Optional[str], dimension: int) -> ConvexDomain:
    """Domain from the [domain] section of a config file, or the unit ball."""
    if path is None:
        return Ellipsoid.unit_ball(dimension)
    config = load_config(path)
    if config.domain.kind == "hull":
        return group_from_config(config).domain
    return build_domain(config.domain)


def _config_or_default(path: Optional[str]) -> RunConfig:
    return load_config(path) if path else RunConfig()


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--log-level", default=None, help="Logging level (default: HILBERT_LOG_LEVEL or WARNING).")
def cli(log_level: Optional[str]) -> None:
    """Hilbert geometry, projective group orbits and Patterson-Sullivan measures."""
    configure_logging(log_level)


@cli.command()
@click.option("--domain", "domain_path", default=None, help="Config file with a [domain] section.")
@click.option("--x", "x_text", required=True, help="Coordinates of x, e.g. '0 0'.")
@click.option("--y", "y_text", required=True, help="Coordinates of y.")
def dist(domain_path: Optional[str], x_text: str, y_text: str) -> int:
    """Print the Hilbert distance between two interior points."""
    x, y = _coords(x_text, "x"), _coords(y_text, "y")
    domain = _domain_from_file(domain_path, len(x))
    click.echo(f"{hilbert_distance(domain, x, y):.10f}")
    return EXIT_OK


@cli.group()
def group() -> None:
    """Inspect or export group presentations."""


@group.command("info")
@click.option("--generators", default="builtin:schottky", help="Generator file or builtin:<name>.")
@click.option("--domain", "domain_path", default=None, help="Config file with a [domain] section.")
def group_info(generators: str, domain_path: Optional[str]) -> int:
    """Print generators with their isometry types and translation lengths."""
    seed = load_group(generators)
    domain = _domain_from_file(domain_path, seed.domain.dimension) if domain_path else None
    g = load_group(generators, domain) if domain is not None else seed
    click.echo(f"name: {g.name}")
    click.echo(f"rank: {g.rank}")
    click.echo(f"free: {'yes' if g.free else 'no'}")
    if g.parabolics:
        click.echo(f"parabolic: {' '.join(g.parabolics)}")
    displacements = g.generator_displacements()
    for label, transform, d in zip(g.labels[:g.rank], g.generators[:g.rank], displacements):
        spectral = classify(transform, g.domain)
        click.echo(f"{label}: {spectral.kind.value} length={spectral.translation_length:.10f} "
                   f"displacement={d:.10f}")
    return EXIT_OK


@group.command("export")
@click.argument("name")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Target generator file.")
def group_export(name: str, out_path: str) -> int:
    """Write a catalog group to a generator file."""
    source = name if name.startswith(BUILTIN_PREFIX) else BUILTIN_PREFIX + name
    write_generators(load_group(source), out_path)
    click.echo(f"wrote {out_path}")
    return EXIT_OK


@cli.command("ps-measure")
@click.option("--config", "config_path", default=None, help="Run configuration file.")
@click.option("--s", "s", type=float, default=None, help="Exponent (default: estimate + smallest schedule offset).")
@click.option("--radius", "radius", type=float, default=None, help="Truncation radius (default: sweep ps_radius).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Measure CSV file.")
def ps_measure(config_path: Optional[str], s: Optional[float], radius: Optional[float], out_path: str) -> int:
    """Write an atomic Patterson-Sullivan measure as CSV."""
    config = _config_or_default(config_path)
    g = group_from_config(config)
    R = radius if radius is not None else config.sweep.ps_radius
    x = g.domain.require_interior(config.basepoints.x, "x") if config.basepoints.x else g.domain.center
    delta = None
    if s is None:
        delta = estimate_critical_exponent(g, x, config.sweep.R, cap=config.group.cap).delta_hat
        s = delta + min(config.sweep.schedule)
    mu = patterson_sullivan(g, x, s, R, o=x, delta_hat=delta, cap=config.group.cap)
    if Path(out_path).exists() and Path(out_path).stat().st_size:
        logger.warning("overwriting measure file %s", out_path)
    write_measure(out_path, mu)
    click.echo(f"{len(mu)} atoms, s={s:.6g}, total mass {mu.total_mass:.10g}")
    return EXIT_OK


@cli.command()
@click.argument("name", type=click.Choice(EXPERIMENTS))
@click.option("--config", "config_path", required=True, help="Run configuration file.")
@click.option("--out", "out_path", default=None, help="Run directory (default: <run.output>/<name>).")
@click.option("--force", is_flag=True, help="Overwrite a non-empty run directory.")
def experiment(name: str, config_path: str, out_path: Optional[str], force: bool) -> int:
    """Run one experiment and write its run directory."""
    config = load_config(config_path)
    out = Path(out_path) if out_path else Path(config.run.output) / name
    if out.exists() and any(out.iterdir()) and not force:
        raise OutputError(f"run directory {out} is not empty; use --force to overwrite")
    result = ExperimentRunner(config).run(name)
    write_run(out, result.to_manifest(), result.tables, result.config_text(), force=force)
    for v in result.verdicts:
        click.echo(f"{'PASS' if v.passed else 'FAIL'} {v.criterion}: observed {v.observed}, "
                   f"threshold {v.threshold}")
    click.echo(f"{name}: {'passed' if result.passed else 'failed'} ({result.seconds:.1f} s) -> {out}")
    return EXIT_OK if result.passed else EXIT_FAILED


@cli.group()
def oracle() -> None:
    """Brute-force reference computations."""


def _report(report: oracles.OracleReport) -> int:
    click.echo(f"{'PASS' if report.passed else 'FAIL'} {report.name}: {report.summary}")
    return EXIT_OK if report.passed else EXIT_FAILED


@oracle.command("ball-words")
@click.option("--generators", default="builtin:schottky", help="Generator file or builtin:<name>.")
@click.option("--radius", type=float, default=4.0, show_default=True)
@click.option("--max-letters", type=int, default=8, show_default=True)
def oracle_ball_words(generators: str, radius: float, max_letters: int) -> int:
    """Pruned orbit ball against unpruned word enumeration."""
    return _report(oracles.ball_words(load_group(generators), radius, max_letters))


@oracle.command("cyclic-words")
@click.option("--generators", default="builtin:schottky", help="Free generator file or builtin:<name>.")
@click.option("--max-length", type=float, default=4.0, show_default=True)
@click.option("--max-letters", type=int, default=8, show_default=True)
def oracle_cyclic_words(generators: str, max_length: float, max_letters: int) -> int:
    """Primitive geodesic census against the brute-force cyclic-word count."""
    return _report(oracles.cyclic_words(load_group(generators), max_length, max_letters))


@oracle.command("klein")
@click.option("--pairs", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dimension", type=int, default=2, show_default=True)
def oracle_klein(pairs: int, seed: int, dimension: int) -> int:
    """Hilbert distance on the unit ball against the hyperbolic closed form."""
    return _report(oracles.klein(pairs, seed, dimension))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    if not args:
        click.echo(cli.get_usage(click.Context(cli, info_name="hilbert")), err=True)
        return EXIT_ERROR
    try:
        code = cli.main(args=args, prog_name="hilbert", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_ERROR
    except click.Abort:
        return EXIT_ERROR
    except HilbertError as exc:
        logger.error("%s", exc)
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return EXIT_OK if code is None else int(code)


def run() -> None:
    sys.exit(main())
