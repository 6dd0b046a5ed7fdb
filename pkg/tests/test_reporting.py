"""
Tests for report writing and log formatting.
"""

import json
import logging

import pytest

from common.log_formatter import CustomFormatter, configure_logging
from common.report_writer import write_csv, write_json


def make_record(msg, level=logging.INFO):
    return logging.LogRecord("dynamics.escape", level, __file__, 1, msg, None, None)


class TestWriteCsv:
    @pytest.mark.unit
    def test_stdout(self, capsys):
        write_csv(["n", "winner"], [["1", "2"], ["2", "0"]])
        assert capsys.readouterr().out == "n,winner\n1,2\n2,0\n"

    @pytest.mark.unit
    def test_header_without_rows(self, capsys):
        write_csv(["label", "left", "right"], [], "-")
        assert capsys.readouterr().out == "label,left,right\n"

    @pytest.mark.unit
    def test_creates_parent_directories(self, tmp_path):
        out = tmp_path / "runs" / "a" / "trace.csv"
        write_csv(["y", "gap"], [["1/2", "1/4"]], str(out))
        assert out.read_text() == "y,gap\n1/2,1/4\n"


class TestWriteJson:
    @pytest.mark.unit
    def test_sorted_and_stable(self, tmp_path):
        out = tmp_path / "report.json"
        write_json({"residue": 9, "depth": 6, "point": "digits:1,0,0,1|0"}, str(out))
        first = out.read_bytes()
        write_json({"point": "digits:1,0,0,1|0", "depth": 6, "residue": 9}, str(out))
        assert out.read_bytes() == first
        assert list(json.loads(first)) == ["depth", "point", "residue"]


class TestCustomFormatter:
    @pytest.mark.unit
    @pytest.mark.parametrize(
        "msg,level,color",
        [
            ("search failed", logging.ERROR, "RED"),
            ("⚠️ degenerate system", logging.WARNING, "YELLOW"),
            ("solenoid structure verified through stage 3", logging.INFO, "GREEN"),
            ("trial 4 of 100", logging.DEBUG, "VIOLET"),
            ("wins per hole [1, 5]", logging.INFO, "BLUE"),
            ("loaded config", logging.DEBUG, "WHITE"),
        ],
    )
    def test_pick_color(self, msg, level, color):
        formatter = CustomFormatter()
        assert formatter.pick_color(make_record(msg, level)) == CustomFormatter.COLORS[color]

    @pytest.mark.unit
    def test_plain_format(self):
        text = CustomFormatter(use_color=False).format(make_record("wins per hole [1, 5]"))
        assert "\033[" not in text
        assert text.endswith("INFO dynamics.escape: wins per hole [1, 5]")


class TestConfigureLogging:
    @pytest.mark.unit
    def test_replaces_own_handler(self):
        root = logging.getLogger()
        configure_logging("debug")
        configure_logging("info")
        assert len([h for h in root.handlers if h.get_name() == "odesc"]) == 1
        assert root.level == logging.INFO
        configure_logging("warning")
