"""The presets command."""

import click

from dynbundle_cli.constants import COMMON_PARAMS, PRESET_NAMES, PRESETS
from dynbundle_cli.utils import emit, output_options


@click.command()
@output_options
@click.pass_context
def presets(ctx: click.Context) -> None:
    """List scenario presets with their defaults."""
    rows = []
    for name in PRESET_NAMES:
        spec = PRESETS[name]
        rows.append({
            "preset": name,
            "description": spec["description"],
            "state": spec["state"],
            "defaults": {**COMMON_PARAMS, **spec["params"]},
            "initial_state": spec["initial_state"],
        })
    emit(ctx, rows, title="Presets")
