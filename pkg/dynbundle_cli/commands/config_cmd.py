"""Settings commands for dynbundle."""

import click
import yaml

from dynbundle_cli.config import (
    CONFIG_FILE,
    DEFAULT_CONFIG,
    get_config_value,
    init_config,
    load_config,
    set_config_value,
)
from dynbundle_cli.formatters import output_info, output_success
from dynbundle_cli.validation import suggest


@click.group(name="config")
def config_group() -> None:
    """Settings management commands."""
    pass


@config_group.command()
@click.option("--threads", type=int, default=None, help="Worker threads for check")
@click.option("--seed", type=int, default=None, help="Default check seed")
@click.option(
    "--config-path",
    type=click.Path(),
    help="Custom settings file path"
)
def init(threads: int, seed: int, config_path: str) -> None:
    """Write a settings file with the defaults."""
    file_path = init_config(config_path, threads=threads, check_seed=seed)
    output_success(f"Settings saved to {file_path}")


@config_group.command()
@click.option(
    "--config-path",
    type=click.Path(exists=True),
    help="Settings file to show"
)
@click.pass_context
def show(ctx: click.Context, config_path: str) -> None:
    """Show current settings."""
    config = load_config(config_path) if config_path else ctx.obj.get("config") or load_config()
    output_info(f"Settings file: {config_path or ctx.obj.get('config_path') or CONFIG_FILE}")
    click.echo(yaml.safe_dump(config, default_flow_style=False), nl=False)


@config_group.command()
@click.argument("key")
@click.option(
    "--config-path",
    type=click.Path(),
    help="Settings file to read"
)
def get(key: str, config_path: str) -> None:
    """Print one settings value."""
    _require_known(key)
    click.echo(get_config_value(key, config_path))


def _require_known(key: str) -> None:
    if key not in DEFAULT_CONFIG:
        hint = suggest(key, DEFAULT_CONFIG)
        message = f"unknown setting '{key}'"
        if hint:
            message += f"; did you mean: {', '.join(hint)}?"
        raise click.BadParameter(message, param_hint="KEY")


@config_group.command()
@click.argument("key")
@click.argument("value")
@click.option(
    "--config-path",
    type=click.Path(),
    help="Settings file to modify"
)
def set(key: str, value: str, config_path: str) -> None:
    """Set a settings value."""
    _require_known(key)
    if key == "default_output" and value not in ("json", "table"):
        raise click.BadParameter(f"'{value}' is not one of json, table", param_hint="VALUE")
    try:
        file_path = set_config_value(key, value, config_path)
    except ValueError:
        raise click.BadParameter(f"'{value}' is not a valid integer", param_hint="VALUE")
    output_success(f"Set {key} = {value} in {file_path}")
