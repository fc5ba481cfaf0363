"""The check command: run the property battery."""

import sys

import click

from dynbundle_cli.checks import SUITES, CheckContext, run_battery
from dynbundle_cli.formatters import output_error, output_success
from dynbundle_cli.utils import EXIT_CHECK_FAILED, EXIT_OK, emit, handle_errors, output_options


@click.command()
@click.option("--seed", type=int, default=None, help="Seed for the randomized suites (default: from settings)")
@click.option("--samples", type=int, default=None, help="Samples per randomized suite (default: from settings)")
@click.option(
    "--suite", "-s", "suites",
    multiple=True,
    type=click.Choice(sorted(SUITES)),
    help="Run only this suite (repeatable)",
)
@click.option("--quiet", "-q", is_flag=True, default=False, help="No progress on stderr")
@output_options
@click.pass_context
def check(ctx: click.Context, seed: int, samples: int, suites: tuple, quiet: bool) -> None:
    """Run the invariant battery and print a report.

    Exits with code 1 if any suite fails.
    """
    cfg = ctx.obj["config"]
    check_ctx = CheckContext(
        seed=seed if seed is not None else int(cfg.get("check_seed", 7)),
        samples=samples if samples is not None else int(cfg.get("check_samples", 100)),
    )
    if check_ctx.samples < 1:
        raise click.BadParameter("samples must be >= 1", param_hint="--samples")

    results = handle_errors(
        run_battery,
        check_ctx,
        list(suites) or None,
        threads=ctx.obj["threads"],
        show_progress=not quiet,
    )
    emit(ctx, [r.to_dict() for r in results], title="Check battery")

    failed = [r.name for r in results if not r.passed]
    if failed:
        output_error(f"{len(failed)} suite(s) failed: {', '.join(failed)}")
        sys.exit(EXIT_CHECK_FAILED)
    output_success(f"All {len(results)} suites passed (seed {check_ctx.seed})")
    sys.exit(EXIT_OK)
