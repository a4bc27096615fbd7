"""Hilbert geometry on strictly convex domains, discrete projective groups and their measures."""

from .config import RunConfig, load_config, parse_config, serialize_config
from .domains import ConvexDomain, Ellipsoid, OrbitHull, PNormBall
from .errors import (ArgumentError, ChartError, ConfigError, DomainError, ElementaryGroupError, HilbertError,
                     NumericalError, OutputError, ResourceError)
from .experiments import EXPERIMENTS, ExperimentResult, ExperimentRunner
from .groups import GroupPresentation, enumerate_orbit_ball, enumerate_primitive_geodesics
from .metric import hilbert_distance

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "ChartError",
    "ConfigError",
    "ConvexDomain",
    "DomainError",
    "EXPERIMENTS",
    "ElementaryGroupError",
    "Ellipsoid",
    "ExperimentResult",
    "ExperimentRunner",
    "GroupPresentation",
    "HilbertError",
    "NumericalError",
    "OrbitHull",
    "OutputError",
    "PNormBall",
    "ResourceError",
    "RunConfig",
    "enumerate_orbit_ball",
    "enumerate_primitive_geodesics",
    "hilbert_distance",
    "load_config",
    "parse_config",
    "serialize_config",
]
