"""Logging utilities for subdecode."""

import logging
import sys
from typing import TextIO

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def setup_logging(
    level: str = "WARNING",
    format_string: str | None = None,
    include_timestamp: bool = True,
    stream: TextIO | None = None,
) -> None:
    """
    Set up logging for subdecode.

    Log records go to stderr by default so tables and CSV paths printed on
    stdout stay clean. Handlers are replaced on every call, which lets
    repeated CLI invocations in one process pick up the current streams.
    RuntimeWarnings raised by numpy and scipy are routed into the log.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
        format_string: Custom format string for log messages
        include_timestamp: Whether to include timestamp in log messages
        stream: Destination stream, stderr when omitted
    """
    if format_string is None:
        if include_timestamp:
            format_string = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        else:
            format_string = "%(name)s - %(levelname)s - %(message)s"

    numeric_level = getattr(logging, level.upper())
    logging.basicConfig(
        level=numeric_level,
        format=format_string,
        stream=stream if stream is not None else sys.stderr,
        force=True,
    )
    logging.getLogger("subdecode").setLevel(numeric_level)

    logging.captureWarnings(True)
    logging.getLogger("py.warnings").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Logger for a module, typically called with ``__name__``."""
    return logging.getLogger(name)
