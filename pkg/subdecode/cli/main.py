"""Main CLI entry point for subdecode."""

import click

from subdecode.utils.logging import LOG_LEVELS, setup_logging

from .exceptions import CliError, handle_cli_error
from .gen import gen
from .run import run
from .verify import verify


class SubdecodeGroup(click.Group):
    """Command group that turns CliErrors into styled messages and exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except CliError as e:
            verbose = bool(ctx.obj and ctx.obj.get("verbose"))
            handle_cli_error(e, verbose)


@click.group(cls=SubdecodeGroup)
@click.version_option(package_name="subdecode")
@click.option(
    "--log-level",
    envvar="SUBDECODE_LOG_LEVEL",
    default="WARNING",
    show_default=True,
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    help="Logging level",
)
@click.option("--verbose", "-v", is_flag=True, help="Show underlying errors")
@click.pass_context
def main(ctx: click.Context, log_level: str, verbose: bool):
    """Substitute decoding for coded distributed iterative computing."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    setup_logging(log_level, include_timestamp=False)


main.add_command(run)
main.add_command(verify)
main.add_command(gen)


if __name__ == "__main__":
    main()
