"""Run named, independent jobs on a thread pool."""

import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import click


@dataclass
class Outcome:
    """What one job returned or raised, and how long it took."""

    name: str
    value: Any = None
    error: Optional[BaseException] = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


def _timed(name: str, job: Callable[[], Any]) -> Outcome:
    start = time.perf_counter()
    try:
        value = job()
    except Exception as exc:
        return Outcome(name, error=exc, seconds=time.perf_counter() - start)
    return Outcome(name, value=value, seconds=time.perf_counter() - start)


def run_named(
    jobs: Sequence[tuple[str, Callable[[], Any]]],
    max_workers: int = 4,
    show_progress: bool = True,
) -> list[Outcome]:
    """Run every ``(name, job)`` pair and return outcomes in input order.

    A job that raises does not stop the others; its exception is kept on
    the outcome. With ``max_workers`` of 1 the jobs run one after another
    on the calling thread.

    Progress lines go to stderr as each job finishes.
    """
    if not jobs:
        return []

    total = len(jobs)
    outcomes: list[Optional[Outcome]] = [None] * total
    finished = 0
    lock = threading.Lock()

    def _report(outcome: Outcome) -> None:
        nonlocal finished
        with lock:
            finished += 1
            if show_progress:
                status = "ok" if outcome.ok else "raised"
                click.echo(
                    f"  [{finished}/{total}] {outcome.name} {status} ({outcome.seconds:.2f}s)",
                    err=True,
                )

    if max_workers <= 1:
        for i, (name, job) in enumerate(jobs):
            outcomes[i] = _timed(name, job)
            _report(outcomes[i])
        return outcomes  # type: ignore[return-value]

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        pending = {pool.submit(_timed, name, job): i for i, (name, job) in enumerate(jobs)}
        for future in as_completed(pending):
            outcome = future.result()
            outcomes[pending[future]] = outcome
            _report(outcome)

    return outcomes  # type: ignore[return-value]
