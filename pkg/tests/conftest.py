"""Pytest fixtures and configuration for dynbundle tests."""

import os
from pathlib import Path
from typing import Generator
from unittest.mock import patch

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from dynbundle_cli.config import ENV_MAPPINGS


# =============================================================================
# Settings Fixtures
# =============================================================================

@pytest.fixture
def temp_config_dir(tmp_path: Path) -> Generator[Path, None, None]:
    """Create a temporary settings directory."""
    config_dir = tmp_path / ".dynbundle"
    config_dir.mkdir(parents=True)
    yield config_dir


@pytest.fixture
def temp_config_file(temp_config_dir: Path) -> Path:
    """Create a temporary settings file with test values."""
    config_file = temp_config_dir / "config.yaml"
    config_data = {
        "default_output": "table",
        "threads": 2,
        "check_seed": 11,
        "check_samples": 20,
    }
    with open(config_file, "w") as f:
        yaml.safe_dump(config_data, f)
    return config_file


@pytest.fixture
def mock_env_vars() -> Generator[None, None, None]:
    """Set up mock environment variables."""
    env_vars = {
        "DYNBUNDLE_DEFAULT_OUTPUT": "json",
        "DYNBUNDLE_THREADS": "8",
        "DYNBUNDLE_CHECK_SEED": "99",
        "DYNBUNDLE_CHECK_SAMPLES": "5",
    }
    with patch.dict(os.environ, env_vars, clear=False):
        yield


@pytest.fixture
def clean_env() -> Generator[None, None, None]:
    """Remove dynbundle environment variables."""
    original = {k: os.environ.get(k) for k in ENV_MAPPINGS}
    for k in ENV_MAPPINGS:
        os.environ.pop(k, None)
    yield
    for k, v in original.items():
        if v is not None:
            os.environ[k] = v


# =============================================================================
# CLI Fixtures
# =============================================================================

@pytest.fixture
def cli_runner() -> CliRunner:
    """Create a Click CLI test runner."""
    return CliRunner()


@pytest.fixture
def isolated_settings(tmp_path: Path, clean_env) -> Generator[Path, None, None]:
    """Point the default settings file at an empty temp location."""
    settings_dir = tmp_path / "settings"
    with patch("dynbundle_cli.config.CONFIG_DIR", settings_dir), \
         patch("dynbundle_cli.config.CONFIG_FILE", settings_dir / "config.yaml"):
        yield settings_dir / "config.yaml"


# =============================================================================
# Scenario Fixtures
# =============================================================================

@pytest.fixture
def write_scenario(tmp_path: Path):
    """Write scenario YAML text to a temp file and return its path."""
    def _write(text: str, name: str = "scenario.yaml") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


@pytest.fixture
def clock_yaml() -> str:
    return (
        "scenario:\n"
        "  name: tick\n"
        "  preset: clock\n"
        "params:\n"
        "  dt: 0.5\n"
        "  t_end: 2.0\n"
    )


@pytest.fixture
def rotation_yaml() -> str:
    return (
        "scenario:\n"
        "  name: rotation\n"
        "  preset: custom\n"
        "params:\n"
        "  dt: 0.01\n"
        "  t_end: 0.1\n"
        "field: \"(x1, -x0)\"\n"
        "initial_state: [1.0, 0.0]\n"
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for property tests."""
    return np.random.default_rng(20240611)
