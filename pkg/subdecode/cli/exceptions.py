"""CLI errors: a message, an optional hint, and the process exit code."""

import sys
import traceback

from subdecode.core.config import describe_error
from subdecode.core.exceptions import SubdecodeError

EXIT_CONFIG = 1
EXIT_CHECK_FAILED = 2
EXIT_IO = 3


class CliError(Exception):
    """Base exception for CLI operations."""

    def __init__(self, message: str, suggestion: str | None = None, exit_code: int = 1):
        super().__init__(message)
        self.message = message
        self.suggestion = suggestion
        self.exit_code = exit_code


class ConfigError(CliError):
    """Missing, malformed or inconsistent configuration."""

    def __init__(self, problem: str, config_file: str | None = None):
        hint = "See presets/ for complete examples"
        if config_file:
            hint = f"Check {config_file} | {hint}"
        super().__init__(f"Configuration error: {problem}", hint, EXIT_CONFIG)

    @classmethod
    def from_library(cls, error: SubdecodeError, config_file: str | None = None) -> "ConfigError":
        return cls(describe_error(error), config_file)


class VerificationFailed(CliError):
    """At least one oracle check reported a violated bound."""

    def __init__(self, failed: list[str], report_path: str | None = None):
        super().__init__(
            f"{len(failed)} check(s) failed: {', '.join(failed)}",
            f"See the report at {report_path}" if report_path else None,
            EXIT_CHECK_FAILED,
        )
        self.failed = failed


class OutputError(CliError):
    """An input or output file could not be read or written."""

    def __init__(self, path: str, original_error: str | None = None):
        detail = f": {original_error}" if original_error else ""
        super().__init__(
            f"Cannot access {path}{detail}", "Check the path and its permissions", EXIT_IO
        )
        self.path = path


def handle_cli_error(error: Exception, verbose: bool = False) -> None:
    """
    Print ``error`` in CLI style and exit with its code.

    Library errors that reach this point are reported as configuration
    errors; anything else is unexpected and exits with 1.
    """
    from .utils import error as print_error
    from .utils import info, verbose_echo

    if isinstance(error, SubdecodeError):
        error = ConfigError.from_library(error)

    if isinstance(error, CliError):
        print_error(error.message)
        if error.suggestion:
            info(f"💡 {error.suggestion}")
        if verbose and error.__cause__:
            verbose_echo(f"Underlying error: {error.__cause__}", verbose=True)
        exit_code = error.exit_code
    else:
        print_error(f"Unexpected error: {error}")
        verbose_echo(traceback.format_exc(), verbose=verbose)
        exit_code = 1
    sys.exit(exit_code)
