"""Tests for preset and key name resolution."""

import pytest

from dynbundle_cli.constants import PRESET_ALIASES, PRESET_NAMES
from dynbundle_cli.validation import resolve_name, suggest


class TestResolveName:
    """Tests for resolve_name function."""

    def test_exact(self):
        assert resolve_name("clock", PRESET_NAMES, PRESET_ALIASES, "preset") == "clock"

    def test_case_and_whitespace(self):
        assert resolve_name("  Two-Body ", PRESET_NAMES, PRESET_ALIASES, "preset") == "two-body"

    @pytest.mark.parametrize("alias,expected", [
        ("kepler", "gravity-circular"),
        ("binary", "two-body"),
        ("exponential", "linear-field"),
    ])
    def test_alias(self, alias, expected, capsys):
        assert resolve_name(alias, PRESET_NAMES, PRESET_ALIASES, "preset") == expected
        assert f'"{alias}"' in capsys.readouterr().err

    def test_unique_substring(self):
        assert resolve_name("elliptic", PRESET_NAMES, {}, "preset") == "gravity-elliptic"

    def test_ambiguous_substring(self):
        assert resolve_name("gravity", PRESET_NAMES, {}, "preset") is None

    def test_no_match(self):
        assert resolve_name("pendulum", PRESET_NAMES, PRESET_ALIASES, "preset") is None
        assert resolve_name("   ", PRESET_NAMES, PRESET_ALIASES, "preset") is None


class TestSuggest:
    """Tests for suggest function."""

    def test_close_match(self):
        assert suggest("clok", PRESET_NAMES)[0] == "clock"

    def test_limit(self):
        assert len(suggest("gravity-c", PRESET_NAMES, n=1)) == 1

    def test_nothing_close(self):
        assert suggest("zzzzzz", PRESET_NAMES) == []
