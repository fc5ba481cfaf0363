"""Main CLI entry point for dynbundle."""

import click

from dynbundle_cli import __version__
from dynbundle_cli.config import load_config
from dynbundle_cli.utils import handle_errors


@click.group()
@click.version_option(version=__version__, prog_name="dynbundle")
@click.option(
    "--config", "-c",
    help="Path to settings file",
    type=click.Path(exists=False)
)
@click.option(
    "--output", "-o",
    type=click.Choice(["json", "table"]),
    default=None,
    help="Output format (default: json)"
)
@click.option(
    "--output-file",
    type=click.Path(),
    default=None,
    help="Write structured output to file (clean JSON)"
)
@click.option(
    "--threads", "-t",
    type=int,
    default=None,
    help="Worker threads for the check battery (default: from settings)"
)
@click.pass_context
def cli(ctx: click.Context, config: str, output: str, output_file: str, threads: int) -> None:
    """dynbundle - differentiate smooth maps, integrate vector fields, run gravity scenarios."""
    ctx.ensure_object(dict)

    cfg = handle_errors(load_config, config)
    ctx.obj["config"] = cfg
    ctx.obj["config_path"] = config

    # CLI option > settings > default
    ctx.obj["output"] = output or cfg.get("default_output", "json")
    ctx.obj["output_file"] = output_file
    ctx.obj["threads"] = threads if threads is not None else int(cfg.get("threads", 4))


# Import and register command groups (must be after cli definition)
from dynbundle_cli.commands.config_cmd import config_group
from dynbundle_cli.commands.run_cmd import run
from dynbundle_cli.commands.check_cmd import check
from dynbundle_cli.commands.presets_cmd import presets

cli.add_command(config_group, name="config")
cli.add_command(run)
cli.add_command(check)
cli.add_command(presets)


if __name__ == "__main__":
    cli()
