"""Tests for utility functions."""

import json
import os
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

import pytest

from cherednik import ConfigError, load_settings
from cherednik.utils import parse_float_list, parse_rational, parse_rational_list, write_atomic


class TestLoadSettings:
    def test_defaults(self, tmp_path: Path) -> None:
        with (
            patch.dict(os.environ, {}, clear=True),
            patch("cherednik.utils._SETTINGS_PATHS", (tmp_path / "nonexistent.json",)),
        ):
            settings = load_settings()
        assert settings.workers == 4
        assert settings.tau_sep == 1e-8
        assert settings.move_cap == 100_000

    def test_load_from_env(self, tmp_path: Path) -> None:
        with (
            patch.dict(os.environ, {"CHEREDNIK_WORKERS": " 2 ", "CHEREDNIK_RTOL": "1e-8"}),
            patch("cherednik.utils._SETTINGS_PATHS", (tmp_path / "nonexistent.json",)),
        ):
            settings = load_settings()
        assert settings.workers == 2
        assert settings.rtol == 1e-8

    def test_load_from_explicit_file(self, tmp_path: Path) -> None:
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"degree_cap": 12, "workers": 3}))
        with patch.dict(os.environ, {}, clear=True):
            settings = load_settings(config)
        assert settings.degree_cap == 12
        assert settings.workers == 3

    def test_env_beats_file(self, tmp_path: Path) -> None:
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"workers": 3}))
        with patch.dict(os.environ, {"CHEREDNIK_WORKERS": "8"}, clear=True):
            assert load_settings(config).workers == 8

    def test_invalid_value(self, tmp_path: Path) -> None:
        with (
            patch.dict(os.environ, {"CHEREDNIK_WORKERS": "0"}, clear=True),
            patch("cherednik.utils._SETTINGS_PATHS", (tmp_path / "nonexistent.json",)),
            pytest.raises(ConfigError, match="Invalid settings"),
        ):
            load_settings()

    def test_unreadable_file(self, tmp_path: Path) -> None:
        config = tmp_path / "settings.json"
        config.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="must hold a JSON object"):
            load_settings(config)


class TestParsing:
    def test_rational(self) -> None:
        assert parse_rational("3/7") == Fraction(3, 7)
        assert parse_rational(" -2 ") == Fraction(-2)
        assert parse_rational("0.25") == Fraction(1, 4)

    def test_rational_rejects_garbage(self) -> None:
        with pytest.raises(ConfigError, match="Not a rational"):
            parse_rational("1/0")
        with pytest.raises(ConfigError, match="Not a rational"):
            parse_rational("half")

    def test_lists(self) -> None:
        assert parse_rational_list("1/2, 1/3,") == [Fraction(1, 2), Fraction(1, 3)]
        assert parse_float_list("-1,0,1") == [-1.0, 0.0, 1.0]
        with pytest.raises(ConfigError):
            parse_float_list("1,x")


class TestWriteAtomic:
    def test_writes_and_creates_parents(self, tmp_path: Path) -> None:
        target = write_atomic(tmp_path / "out" / "a.csv", "x,y\n1,2\n")
        assert target.read_text() == "x,y\n1,2\n"
        assert [p.name for p in target.parent.iterdir()] == ["a.csv"]

    def test_overwrites(self, tmp_path: Path) -> None:
        target = tmp_path / "a.json"
        target.write_text("old")
        write_atomic(target, "new")
        assert target.read_text() == "new"
