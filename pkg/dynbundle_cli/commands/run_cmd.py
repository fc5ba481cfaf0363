"""The run command: integrate one scenario file."""

import click

from dynbundle_cli.formatters import output_info, output_success, output_warning
from dynbundle_cli.scenarios import emit_csv, load_scenario, render_csv, run_scenario
from dynbundle_cli.utils import emit, handle_errors, output_options

# Relative AD-vs-FD gap above which a run gets flagged.
FD_WARN_LEVEL = 1e-6


@click.command()
@click.argument("config_path", metavar="CONFIG", type=click.Path())
@click.option(
    "--out",
    type=click.Path(),
    default=None,
    help="Write the CSV trace to this path",
)
@click.option(
    "--summary-only",
    is_flag=True,
    default=False,
    help="Print only the summary, no CSV trace on stdout",
)
@output_options
@click.pass_context
def run(ctx: click.Context, config_path: str, out: str, summary_only: bool) -> None:
    """Integrate the scenario in CONFIG.

    Without --out the CSV trace goes to stdout. With --out or --summary-only
    the run summary is printed instead.

    Exit codes: 0 ok, 2 invalid scenario, 3 singularity or no fixed point,
    4 trace not writable.
    """
    def _run() -> None:
        cfg = load_scenario(config_path)
        output_info(f"Running scenario '{cfg.name}' ({cfg.preset}, {cfg.method})")
        artifact = run_scenario(cfg)
        deviation = artifact.summary["field_fd_deviation"]
        if deviation > FD_WARN_LEVEL:
            output_warning(f"field derivative disagrees with finite differences by {deviation:.3g}")
        if out:
            emit_csv(artifact, out)
            output_success(f"Wrote {len(artifact.trajectory)} rows to {out}")
        if out or summary_only:
            emit(ctx, artifact.summary, title=f"Scenario {cfg.name}")
        else:
            click.echo(render_csv(artifact), nl=False)

    handle_errors(_run)
