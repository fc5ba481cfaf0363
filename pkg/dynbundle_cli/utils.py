"""Utility functions for dynbundle commands."""

import functools
import sys

import click

from dynbundle_cli.calculus.errors import CalculusError, NonContractionError, SingularityError
from dynbundle_cli.errors import ConfigError, OutputError
from dynbundle_cli.formatters import output, output_error


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def handle_errors(func, *args, **kwargs):
    """Run ``func``, printing known failures and exiting with their code."""
    try:
        return func(*args, **kwargs)
    except ConfigError as e:
        details = {k: v for k, v in (("field", e.field), ("line", e.line)) if v is not None}
        output_error(f"invalid configuration: {e.message}", details or None)
        sys.exit(EXIT_CONFIG)
    except OutputError as e:
        output_error(e.message, {"path": e.path} if e.path else None)
        sys.exit(EXIT_IO)
    except SingularityError as e:
        output_error(f"singularity: {e.message}", {"step": e.step} if e.step is not None else None)
        sys.exit(EXIT_RUNTIME)
    except NonContractionError as e:
        output_error(f"no fixed point: {e.message}", e.details)
        sys.exit(EXIT_RUNTIME)
    except CalculusError as e:
        output_error(e.message, e.details)
        sys.exit(EXIT_RUNTIME)


def emit(ctx: click.Context, data, title=None) -> None:
    """Send structured results through the selected output format.

    An unwritable --output-file exits with EXIT_IO.
    """
    handle_errors(output, data, ctx.obj["output"], title=title, file_path=ctx.obj.get("output_file"))


def output_options(f):
    """Add -o/--output and --output-file to a leaf command.

    When provided, these override the global -o and --output-file set on the
    root ``dynbundle`` command.
    """
    @click.option(
        "--output-file", "cmd_output_file",
        type=click.Path(),
        default=None,
        help="Write output to file instead of stdout",
    )
    @click.option(
        "-o", "--output", "cmd_output",
        type=click.Choice(["json", "table"]),
        default=None,
        help="Output format (json, table)",
    )
    @functools.wraps(f)
    def wrapper(*args, cmd_output=None, cmd_output_file=None, **kwargs):
        ctx = click.get_current_context()
        if cmd_output is not None:
            ctx.obj["output"] = cmd_output
        if cmd_output_file is not None:
            ctx.obj["output_file"] = cmd_output_file
        return f(*args, **kwargs)
    return wrapper
