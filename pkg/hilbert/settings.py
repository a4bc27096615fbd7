"""Environment settings for the hilbert package."""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

from .errors import ConfigError

load_dotenv()

DEFAULT_LOG_LEVEL = "WARNING"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def thread_count() -> int:
    """Number of worker threads for library parallelism.

    Reads HILBERT_THREADS on every call so tests can monkeypatch it.

    Returns:
        A positive thread count (default: CPU count, at most 8).
    """
    raw = os.getenv("HILBERT_THREADS")
    if raw is None or raw.strip() == "":
        return max(1, min(8, os.cpu_count() or 1))
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HILBERT_THREADS must be an integer, got {raw!r}",
                          key="HILBERT_THREADS") from exc
    if value < 1:
        raise ConfigError("HILBERT_THREADS must be at least 1", key="HILBERT_THREADS")
    return value


def configure_logging(level: Optional[str] = None) -> None:
    """Install the root logging handler.

    Args:
        level: Level name; falls back to HILBERT_LOG_LEVEL, then WARNING.
    """
    name = (level or os.getenv("HILBERT_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level {name!r}", key="HILBERT_LOG_LEVEL")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
