"""Exception hierarchy shared by every hilbert module."""

from typing import Any, Dict, Optional


class HilbertError(Exception):
    """Base class for all errors raised by the hilbert package."""


class ChartError(HilbertError):
    """A homogeneous point lies at infinity for the affine chart in use."""


class DomainError(HilbertError):
    """A point is outside the domain, off its boundary, or a domain is malformed."""


class ArgumentError(HilbertError, ValueError):
    """An argument is invalid (zero direction, coincident points, singular matrix...)."""


class NumericalError(HilbertError):
    """An iterative computation failed to converge."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResourceError(HilbertError):
    """A configured cap was exceeded or too little data was available."""

    def __init__(self, message: str, cap: Optional[int] = None):
        super().__init__(message)
        self.cap = cap


class ElementaryGroupError(HilbertError):
    """The group has no hyperbolic element within the search budget."""


class ConfigError(HilbertError):
    """Configuration text or environment is invalid."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.key = key
        self.line = line


class OutputError(HilbertError):
    """An output location cannot be written."""
