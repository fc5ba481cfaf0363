"""Tool settings for dynbundle (not scenario files; see scenarios.py)."""

import os
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv

from dynbundle_cli.errors import ConfigError


# Default settings directory and file
CONFIG_DIR = Path.home() / ".dynbundle"
CONFIG_FILE = CONFIG_DIR / "config.yaml"

# Default settings values
DEFAULT_CONFIG = {
    "default_output": "json",
    "threads": 4,
    "check_seed": 7,
    "check_samples": 100,
}

INTEGER_KEYS = {"threads", "check_seed", "check_samples"}

ENV_MAPPINGS = {
    "DYNBUNDLE_DEFAULT_OUTPUT": "default_output",
    "DYNBUNDLE_THREADS": "threads",
    "DYNBUNDLE_CHECK_SEED": "check_seed",
    "DYNBUNDLE_CHECK_SAMPLES": "check_samples",
}


def ensure_config_dir() -> Path:
    """Ensure the settings directory exists."""
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)
    return CONFIG_DIR


def coerce_value(key: str, value: Any) -> Any:
    """Convert a raw string to the type the key holds.

    Raises:
        ValueError: If an integer key gets a non-integer value.
    """
    if key in INTEGER_KEYS and not isinstance(value, int):
        return int(value)
    return value


def load_config(config_path: Optional[str] = None) -> dict[str, Any]:
    """
    Load settings from file and environment.

    Priority (highest to lowest):
    1. Environment variables (DYNBUNDLE_*)
    2. Settings file given by config_path
    3. Default settings file (~/.dynbundle/config.yaml)
    4. Default values

    Args:
        config_path: Optional path to a settings file.

    Returns:
        Settings dictionary.

    Raises:
        ConfigError: If a DYNBUNDLE_* variable does not fit its key.
    """
    load_dotenv()

    config = DEFAULT_CONFIG.copy()

    file_path = Path(config_path) if config_path else CONFIG_FILE
    if file_path.exists():
        with open(file_path) as f:
            file_config = yaml.safe_load(f) or {}
            config.update(file_config)

    for env_var, config_key in ENV_MAPPINGS.items():
        env_value = os.environ.get(env_var)
        if env_value:
            try:
                config[config_key] = coerce_value(config_key, env_value)
            except ValueError:
                raise ConfigError(f"{env_var} must be an integer, got {env_value!r}", field=env_var)

    return config


def save_config(config: dict[str, Any], config_path: Optional[str] = None) -> Path:
    """
    Save settings to file.

    Args:
        config: Settings dictionary to save.
        config_path: Optional path to a settings file.

    Returns:
        Path to the saved settings file.
    """
    file_path = Path(config_path) if config_path else CONFIG_FILE
    if config_path:
        file_path.parent.mkdir(parents=True, exist_ok=True)
    else:
        ensure_config_dir()

    with open(file_path, "w") as f:
        yaml.safe_dump(config, f, default_flow_style=False)

    return file_path


def get_config_value(key: str, config_path: Optional[str] = None) -> Any:
    """Get a specific settings value."""
    config = load_config(config_path)
    return config.get(key)


def set_config_value(
    key: str,
    value: Any,
    config_path: Optional[str] = None
) -> Path:
    """Set a specific settings value and save."""
    config = load_config(config_path)
    config[key] = coerce_value(key, value)
    return save_config(config, config_path)


def init_config(config_path: Optional[str] = None, **overrides: Any) -> Path:
    """Write the default settings, with any overrides, to file."""
    config = DEFAULT_CONFIG.copy()
    for key, value in overrides.items():
        if value is not None:
            config[key] = coerce_value(key, value)
    return save_config(config, config_path)
