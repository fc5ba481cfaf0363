"""Integration tests for CLI commands."""

import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from dynbundle_cli import __version__
from dynbundle_cli.constants import PRESET_NAMES
from dynbundle_cli.main import cli
from dynbundle_cli.scenarios import parse_config, render_csv, run_scenario


@pytest.fixture
def runner(isolated_settings) -> CliRunner:
    """A runner that never reads the real settings file."""
    return CliRunner()


class TestCLIRoot:
    """Tests for the root CLI command."""

    def test_help(self, runner: CliRunner):
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        for command in ("run", "check", "presets", "config"):
            assert command in result.output

    def test_version(self, runner: CliRunner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_settings_file_option(self, runner: CliRunner, temp_config_file: Path):
        """Test that -c selects the settings file, here its table output."""
        result = runner.invoke(cli, ["-c", str(temp_config_file), "presets"])
        assert result.exit_code == 0
        assert "Presets" in result.output


class TestPresets:
    """Tests for the presets command."""

    def test_json_to_file(self, runner: CliRunner, tmp_path: Path):
        target = tmp_path / "presets.json"
        result = runner.invoke(cli, ["presets", "--output-file", str(target)])
        assert result.exit_code == 0
        rows = json.loads(target.read_text())
        assert [r["preset"] for r in rows] == list(PRESET_NAMES)
        assert rows[0]["defaults"]["dt"] == 0.001

    def test_unwritable_output_file_exits_4(self, runner: CliRunner, tmp_path: Path):
        target = tmp_path / "missing" / "presets.json"
        result = runner.invoke(cli, ["presets", "--output-file", str(target)])
        assert result.exit_code == 4
        assert "cannot write output" in result.output

    def test_bad_environment_setting_exits_2(self, runner: CliRunner):
        result = runner.invoke(cli, ["presets"], env={"DYNBUNDLE_THREADS": "lots"})
        assert result.exit_code == 2
        assert "DYNBUNDLE_THREADS" in result.output


class TestRun:
    """Tests for the run command."""

    def test_csv_to_file(self, runner: CliRunner, write_scenario, clock_yaml, tmp_path: Path):
        trace = tmp_path / "trace.csv"
        summary = tmp_path / "summary.json"
        result = runner.invoke(cli, [
            "run", write_scenario(clock_yaml), "--out", str(trace), "--output-file", str(summary),
        ])
        assert result.exit_code == 0, result.output
        assert trace.read_text() == render_csv(run_scenario(parse_config(clock_yaml)))
        data = json.loads(summary.read_text())
        assert data["steps"] == 4
        assert data["preset"] == "clock"
        assert data["energy_drift"] is None

    def test_csv_on_stdout(self, runner: CliRunner, write_scenario, rotation_yaml):
        result = runner.invoke(cli, ["run", write_scenario(rotation_yaml)])
        assert result.exit_code == 0
        assert "t,state_0,state_1,energy,Lz,residual" in result.output

    def test_identical_reruns(self, runner: CliRunner, write_scenario, rotation_yaml, tmp_path: Path):
        path = write_scenario(rotation_yaml)
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        runner.invoke(cli, ["run", path, "--out", str(first)])
        runner.invoke(cli, ["run", path, "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_summary_only(self, runner: CliRunner, write_scenario, clock_yaml, tmp_path: Path):
        summary = tmp_path / "summary.json"
        result = runner.invoke(cli, [
            "run", write_scenario(clock_yaml), "--summary-only", "--output-file", str(summary),
        ])
        assert result.exit_code == 0
        assert json.loads(summary.read_text())["final_state"] == [2.0]
        assert "state_0" not in result.output

    def test_invalid_scenario_exits_2(self, runner: CliRunner, write_scenario, clock_yaml):
        result = runner.invoke(cli, ["run", write_scenario(clock_yaml.replace("dt: 0.5", "dt: 0"))])
        assert result.exit_code == 2
        assert "params.dt" in result.output

    def test_missing_file_exits_2(self, runner: CliRunner, tmp_path: Path):
        result = runner.invoke(cli, ["run", str(tmp_path / "none.yaml")])
        assert result.exit_code == 2

    def test_singularity_exits_3(self, runner: CliRunner, write_scenario):
        text = "scenario:\n  preset: clock\nparams:\n  window: 1\n  t_end: 3\n  dt: 0.1\n"
        result = runner.invoke(cli, ["run", write_scenario(text)])
        assert result.exit_code == 3
        assert "singularity" in result.output

    def test_unwritable_trace_exits_4(self, runner: CliRunner, write_scenario, clock_yaml, tmp_path: Path):
        target = tmp_path / "missing" / "trace.csv"
        result = runner.invoke(cli, ["run", write_scenario(clock_yaml), "--out", str(target)])
        assert result.exit_code == 4

    def test_unwritable_summary_exits_4(self, runner: CliRunner, write_scenario, clock_yaml, tmp_path: Path):
        target = tmp_path / "missing" / "summary.json"
        result = runner.invoke(cli, [
            "run", write_scenario(clock_yaml), "--summary-only", "--output-file", str(target),
        ])
        assert result.exit_code == 4
        assert not target.exists()


class TestCheck:
    """Tests for the check command."""

    def test_single_suite(self, runner: CliRunner, tmp_path: Path):
        report = tmp_path / "report.json"
        result = runner.invoke(cli, [
            "check", "-s", "functoriality", "--samples", "5", "-q", "--output-file", str(report),
        ])
        assert result.exit_code == 0, result.output
        rows = json.loads(report.read_text())
        assert [r["suite"] for r in rows] == ["functoriality"]
        assert rows[0]["passed"] is True

    def test_unknown_suite(self, runner: CliRunner):
        result = runner.invoke(cli, ["check", "-s", "nonsense"])
        assert result.exit_code == 2

    def test_bad_samples(self, runner: CliRunner):
        result = runner.invoke(cli, ["check", "--samples", "0"])
        assert result.exit_code == 2

    def test_failing_suite_exits_1(self, runner: CliRunner, tmp_path: Path):
        from unittest.mock import patch

        from dynbundle_cli.checks import SUITES, SuiteResult

        def failing(ctx):
            return SuiteResult("monad_laws", False, 1.0, 0.0)

        with patch.dict(SUITES, {"monad_laws": failing}):
            result = runner.invoke(cli, [
                "check", "-s", "monad_laws", "-q", "--output-file", str(tmp_path / "r.json"),
            ])
        assert result.exit_code == 1
        assert "monad_laws" in result.output


class TestConfigCommands:
    """Tests for the settings commands."""

    def test_init_show_set(self, runner: CliRunner, tmp_path: Path):
        path = tmp_path / "settings.yaml"
        result = runner.invoke(cli, ["config", "init", "--config-path", str(path), "--threads", "3"])
        assert result.exit_code == 0
        assert yaml.safe_load(path.read_text())["threads"] == 3

        result = runner.invoke(cli, ["config", "set", "check_seed", "42", "--config-path", str(path)])
        assert result.exit_code == 0
        assert yaml.safe_load(path.read_text())["check_seed"] == 42

        result = runner.invoke(cli, ["config", "show", "--config-path", str(path)])
        assert result.exit_code == 0
        assert "check_seed: 42" in result.output

    def test_get(self, runner: CliRunner, tmp_path: Path):
        path = str(tmp_path / "s.yaml")
        runner.invoke(cli, ["config", "set", "check_seed", "42", "--config-path", path])
        result = runner.invoke(cli, ["config", "get", "check_seed", "--config-path", path])
        assert result.exit_code == 0
        assert result.output.strip() == "42"

    def test_get_default(self, runner: CliRunner, tmp_path: Path):
        result = runner.invoke(cli, ["config", "get", "default_output", "--config-path", str(tmp_path / "none.yaml")])
        assert result.exit_code == 0
        assert result.output.strip() == "json"

    def test_get_unknown_key(self, runner: CliRunner, tmp_path: Path):
        result = runner.invoke(cli, ["config", "get", "check_sed", "--config-path", str(tmp_path / "s.yaml")])
        assert result.exit_code == 2
        assert "check_seed" in result.output

    def test_set_unknown_key(self, runner: CliRunner, tmp_path: Path):
        result = runner.invoke(cli, ["config", "set", "thread", "3", "--config-path", str(tmp_path / "s.yaml")])
        assert result.exit_code == 2
        assert "threads" in result.output

    def test_set_bad_value(self, runner: CliRunner, tmp_path: Path):
        path = str(tmp_path / "s.yaml")
        assert runner.invoke(cli, ["config", "set", "threads", "many", "--config-path", path]).exit_code == 2
        assert runner.invoke(cli, ["config", "set", "default_output", "xml", "--config-path", path]).exit_code == 2
