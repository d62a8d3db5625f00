"""Tests for CLI utilities."""

import pytest

from subdecode.cli.exceptions import ConfigError, OutputError
from subdecode.cli.utils import (
    ensure_directory,
    format_table,
    load_config_manager,
    write_csv,
)


class TestFormatTable:
    """Test table formatting."""

    def test_empty_table(self):
        assert format_table(["A", "B"], []) == "No data to display"

    def test_columns_aligned(self):
        result = format_table(["scheme", "error"], [["coded-d2", "1e-3"], ["uncoded", "0.5"]])
        lines = result.split("\n")
        assert lines[0].startswith("scheme  ")
        assert lines[1] == "---------+------"
        assert len({line.index("|") for line in lines if "|" in line}) == 1

    def test_numbers_right_aligned(self):
        result = format_table(["scheme", "error"], [["a", "1.5"], ["b", "10.25"]])
        lines = result.split("\n")
        assert lines[2] == "a      |   1.5"
        assert lines[3] == "b      | 10.25"

    def test_table_with_title(self):
        result = format_table(["Col1"], [["A"]], title="Traces")
        assert "Traces" in result


class TestWriteCsv:
    """Test CSV output."""

    def test_unix_line_endings(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", ["iteration", "error"], [["0", "1.0"], ["1", "0.5"]])
        assert path.read_bytes() == b"iteration,error\n0,1.0\n1,0.5\n"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(OutputError):
            write_csv(tmp_path / "absent" / "t.csv", ["a"], [])

    def test_ensure_directory_nested(self, tmp_path):
        directory = ensure_directory(tmp_path / "a" / "b")
        assert directory.is_dir()


class TestLoadConfigManager:
    """Test config resolution for commands."""

    def test_config_and_preset_exclusive(self):
        with pytest.raises(ConfigError):
            load_config_manager("exp.conf", "twitter-scaled", {})

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            load_config_manager(None, "nope", {})

    def test_overrides_applied(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("runs = 9\n")
        manager = load_config_manager(str(path), None, {"runs": 2})
        assert manager.get("runs") == 2
