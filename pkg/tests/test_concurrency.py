"""Tests for run_named."""

import threading
import time

from dynbundle_cli.concurrency import Outcome, run_named


class TestRunNamed:
    """Tests for run_named function."""

    def test_basic(self):
        jobs = [(f"square-{i}", lambda i=i: i * i) for i in range(5)]
        outcomes = run_named(jobs, show_progress=False)
        assert [o.name for o in outcomes] == [f"square-{i}" for i in range(5)]
        assert [o.value for o in outcomes] == [0, 1, 4, 9, 16]
        assert all(o.ok for o in outcomes)

    def test_empty(self):
        assert run_named([], show_progress=False) == []

    def test_failure_is_kept_on_outcome(self):
        def boom():
            raise ValueError("bad suite")

        outcomes = run_named([("good", lambda: 1), ("bad", boom), ("also-good", lambda: 3)], show_progress=False)
        assert [o.ok for o in outcomes] == [True, False, True]
        assert isinstance(outcomes[1].error, ValueError)
        assert str(outcomes[1].error) == "bad suite"
        assert outcomes[2].value == 3

    def test_timing_recorded(self):
        outcomes = run_named([("nap", lambda: time.sleep(0.02))], show_progress=False)
        assert outcomes[0].seconds >= 0.01

    def test_respects_max_workers(self):
        active = 0
        peak = 0
        lock = threading.Lock()

        def job():
            nonlocal active, peak
            with lock:
                active += 1
                peak = max(peak, active)
            time.sleep(0.02)
            with lock:
                active -= 1

        run_named([(str(i), job) for i in range(8)], max_workers=2, show_progress=False)
        assert peak <= 2

    def test_sequential_runs_on_calling_thread(self):
        caller = threading.get_ident()
        outcomes = run_named(
            [(str(i), threading.get_ident) for i in range(3)],
            max_workers=1,
            show_progress=False,
        )
        assert {o.value for o in outcomes} == {caller}

    def test_order_independent_of_finish_time(self):
        jobs = [(str(i), lambda i=i: (time.sleep(0.01 * (4 - i)), i)[1]) for i in range(5)]
        outcomes = run_named(jobs, max_workers=5, show_progress=False)
        assert [o.value for o in outcomes] == [0, 1, 2, 3, 4]

    def test_progress_on_stderr(self, capsys):
        run_named([("alpha", lambda: 1)], show_progress=True)
        captured = capsys.readouterr()
        assert "[1/1] alpha ok" in captured.err
        assert captured.out == ""

        run_named([("alpha", lambda: 1)], show_progress=False)
        assert capsys.readouterr().err == ""


class TestOutcome:
    def test_ok(self):
        assert Outcome("x", value=1).ok
        assert not Outcome("x", error=RuntimeError()).ok
