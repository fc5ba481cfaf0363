"""Name resolution for presets and settings keys."""

import difflib
from typing import Iterable, Optional

import click


def resolve_name(
    value: str,
    valid: Iterable[str],
    aliases: dict,
    field_name: str,
) -> Optional[str]:
    """Resolve ``value`` to one of ``valid``.

    Exact names win, then aliases, then a unique substring match. Returns
    None when nothing fits; ``suggest`` gives the caller something to print.
    """
    valid_set = set(valid)
    v = value.strip().lower()
    if not v:
        return None

    if v in valid_set:
        return v

    if v in aliases:
        corrected = aliases[v]
        click.echo(f'Info: Mapped "{value}" → "{corrected}" for {field_name}', err=True)
        return corrected

    substring_matches = [name for name in valid_set if v in name]
    if len(substring_matches) == 1:
        corrected = substring_matches[0]
        click.echo(f'Info: Mapped "{value}" → "{corrected}" for {field_name}', err=True)
        return corrected

    return None


def suggest(query: str, candidates: Iterable[str], n: int = 3) -> list[str]:
    """Return up to n close matches by edit similarity."""
    return difflib.get_close_matches(query.strip().lower(), list(candidates), n=n, cutoff=0.4)
