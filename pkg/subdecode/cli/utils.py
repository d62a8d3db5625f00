"""CLI output helpers: styled messages, summary tables and result files."""

import csv
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import click

from subdecode.core.config import ConfigManager
from subdecode.core.exceptions import SubdecodeError

from .exceptions import ConfigError, OutputError

# (prefix, colour) per message kind
STYLES = {
    "success": ("✅ ", "green"),
    "error": ("❌ ", "red"),
    "warning": ("⚠️  ", "yellow"),
    "info": ("ℹ️  ", "blue"),
    "muted": ("", "bright_black"),
    "title": ("📋 ", "cyan"),
}


def echo_styled(kind: str, message: str, bold: bool = False, **kwargs: Any) -> None:
    prefix, colour = STYLES[kind]
    click.echo(click.style(f"{prefix}{message}", fg=colour, bold=bold), **kwargs)


def success(message: str, **kwargs: Any) -> None:
    echo_styled("success", message, **kwargs)


def error(message: str, **kwargs: Any) -> None:
    echo_styled("error", message, err=True, **kwargs)


def warning(message: str, **kwargs: Any) -> None:
    echo_styled("warning", message, err=True, **kwargs)


def info(message: str, **kwargs: Any) -> None:
    echo_styled("info", message, **kwargs)


def verbose_echo(message: str, verbose: bool = False, **kwargs: Any) -> None:
    if verbose:
        echo_styled("muted", f"[VERBOSE] {message}", **kwargs)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def format_table(
    headers: list[str], rows: list[list[str]], title: str | None = None
) -> str:
    """
    Format rows as a plain-text table.

    Columns whose cells all parse as numbers are right-aligned so that
    errors and costs line up by magnitude; other columns are left-aligned.

    Args:
        headers: Column headers
        rows: Data rows, one string per cell
        title: Optional styled title line

    Returns:
        The table, or a placeholder when there are no rows
    """
    if not rows:
        return "No data to display"

    cells = [[str(cell) for cell in row[: len(headers)]] for row in rows]
    columns = list(zip(*cells, strict=False))
    widths = [
        max([len(header)] + [len(cell) for cell in column])
        for header, column in zip(headers, columns, strict=False)
    ]
    numeric = [all(_is_number(cell) for cell in column) for column in columns]

    def render(row: Sequence[str]) -> str:
        return " | ".join(
            cell.rjust(width) if right else cell.ljust(width)
            for cell, width, right in zip(row, widths, numeric, strict=False)
        )

    lines = []
    if title:
        lines += [click.style(title, fg=STYLES["title"][1], bold=True), ""]
    lines.append(render(headers))
    lines.append("-+-".join("-" * width for width in widths))
    lines.extend(render(row) for row in cells)
    return "\n".join(lines)


def print_section(title: str, content: str = "") -> None:
    """Blank line, styled title, then the content."""
    click.echo()
    echo_styled("title", title, bold=True)
    if content:
        click.echo(content)


def ensure_directory(path: str | Path) -> Path:
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(str(directory), str(e)) from e
    return directory


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    """Write a CSV file with ``\\n`` line endings; cells are written as given."""
    target = Path(path)
    try:
        with open(target, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(str(target), str(e)) from e
    return target


def write_text(path: str | Path, text: str) -> Path:
    target = Path(path)
    try:
        target.write_text(text)
    except OSError as e:
        raise OutputError(str(target), str(e)) from e
    return target


def load_config_manager(
    config_path: str | None, preset: str | None, overrides: dict[str, Any]
) -> ConfigManager:
    """Configuration from a file or a preset, with command-line overrides on top."""
    if config_path and preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    try:
        if preset:
            return ConfigManager.from_preset(preset, overrides=overrides)
        return ConfigManager(config_path, overrides=overrides)
    except SubdecodeError as e:
        raise ConfigError.from_library(e, config_path) from e
