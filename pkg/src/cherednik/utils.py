"""Utility functions: settings loading, exact number parsing, artefact output."""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .exceptions import ConfigError
from .models import Settings

__all__ = [
    "load_settings",
    "parse_float_list",
    "parse_rational",
    "parse_rational_list",
    "write_atomic",
]

_SETTINGS_PATHS = (Path("~/.config/cherednik-wb/settings.json"),)

_ENV_FIELDS = {
    "CHEREDNIK_WORKERS": "workers",
    "CHEREDNIK_ORDER_CAP": "order_cap",
    "CHEREDNIK_TAU_SEP": "tau_sep",
    "CHEREDNIK_RTOL": "rtol",
    "CHEREDNIK_ATOL": "atol",
    "CHEREDNIK_MOVE_CAP": "move_cap",
    "CHEREDNIK_DEGREE_CAP": "degree_cap",
}


def _read_settings_file(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read settings file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Settings file {path} must hold a JSON object")
    return data


def load_settings(config_file: str | Path | None = None) -> Settings:
    """Load workbench settings from environment and files.

    Priority (highest first):
        1. CHEREDNIK_* environment variables
        2. Specified config_file path
        3. ~/.config/cherednik-wb/settings.json
        4. Built-in defaults

    Args:
        config_file: Optional path to a JSON settings file.

    Returns:
        Frozen Settings instance.

    Raises:
        ConfigError: If a file or value cannot be parsed.
    """
    values: dict[str, Any] = {}

    if config_file:
        values.update(_read_settings_file(Path(config_file).expanduser()))
    else:
        for path in _SETTINGS_PATHS:
            p = path.expanduser()
            if p.exists():
                values.update(_read_settings_file(p))
                break

    for env_name, field in _ENV_FIELDS.items():
        if (raw := os.getenv(env_name)) is not None:
            values[field] = raw.strip()

    try:
        return Settings.model_validate(values)
    except ValidationError as exc:
        raise ConfigError(f"Invalid settings: {exc}") from exc


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or an integer string exactly.

    Decimal strings such as ``0.25`` are accepted too and converted exactly,
    never through a binary float.
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"Not a rational number: {text!r}") from exc


def parse_rational_list(text: str) -> list[Fraction]:
    return [parse_rational(part) for part in text.split(",") if part.strip()]


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"Not a list of numbers: {text!r}") from exc


def write_atomic(path: str | Path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    tmp = Path(tmp_name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        tmp.replace(target)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return target
