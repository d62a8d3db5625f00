"""The ``verify`` command: run the oracle checks."""

import logging

import click

from subdecode.core.exceptions import SubdecodeError
from subdecode.verify.checks import CHECKS, run_checks
from subdecode.verify.reports import REPORT_HEADER

from .exceptions import ConfigError, VerificationFailed
from .utils import (
    ensure_directory,
    format_table,
    load_config_manager,
    print_section,
    success,
    warning,
    write_csv,
)

logger = logging.getLogger(__name__)


@click.command()
@click.option("--config", "config_path", type=click.Path(), help="Flat key = value config file")
@click.option("--preset", help="Name of a preset shipped in presets/")
@click.option("--seed", type=int, help="Master seed")
@click.option("--out", "out_dir", default="results", show_default=True, help="Output directory")
@click.option(
    "--check",
    "checks",
    multiple=True,
    help=f"Check to run (repeatable): {', '.join(CHECKS)}",
)
@click.option("--samples", type=int, help="Monte-Carlo samples for lemma1")
@click.option("--runs", type=int, help="Independent runs for the theorem checks")
def verify(
    config_path: str | None,
    preset: str | None,
    seed: int | None,
    out_dir: str,
    checks: tuple[str, ...],
    samples: int | None,
    runs: int | None,
):
    """Run oracle checks and write verify_report.csv."""
    overrides = {
        "seed": seed,
        "checks": list(checks) or None,
        "lemma1_samples": samples,
        "theorem_runs": runs,
    }
    manager = load_config_manager(config_path, preset, overrides)
    try:
        cfg = manager.get_verify_config()
        reports = run_checks(cfg)
    except SubdecodeError as e:
        raise ConfigError.from_library(e, config_path) from e

    rows = [row for report in reports for row in report.to_rows()]
    path = write_csv(ensure_directory(out_dir) / "verify_report.csv", REPORT_HEADER, rows)

    print_section(
        f"Verification (seed {cfg.seed})",
        format_table(REPORT_HEADER, [[cell for cell in row] for row in rows]),
    )
    for report in reports:
        for message in report.warnings:
            warning(f"{report.check}: {message}")
        logger.info(report.render_text())

    failed = [report.check for report in reports if not report.passed]
    if failed:
        raise VerificationFailed(failed, str(path))
    success(f"All {len(reports)} check(s) passed; report written to {path}")
