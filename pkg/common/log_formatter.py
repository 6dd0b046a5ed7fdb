import logging
import sys
from typing import Optional

from common.config import LOGGING


class CustomFormatter(
    logging.Formatter,
):
    """Custom formatter to color-code log messages based on their content."""

    # ANSI escape codes for colors - using accessible palette
    COLORS = {
        "RESET": "\033[0m",
        "WHITE": "\033[38;5;231m",  # Default text color
        "BLUE": "\033[38;5;116m",  # Hit times and winners
        "GREEN": "\033[38;5;114m",  # Constructions and verdicts
        "VIOLET": "\033[38;5;183m",  # Search progress
        "YELLOW": "\033[38;5;186m",  # Degenerate scales and systems
        "RED": "\033[38;5;210m",  # Errors
    }

    def __init__(self, use_color: bool = True):
        super().__init__()
        self.use_color = use_color

    def pick_color(self, record: logging.LogRecord) -> str:
        if record.levelno >= logging.ERROR:
            return self.COLORS["RED"]

        msg = str(record.msg).lower()

        if any(phrase in msg for phrase in ["degenerate", "whole-space", "⚠️", "overlap"]):
            return self.COLORS["YELLOW"]
        if any(phrase in msg for phrase in ["constructed", "conjugate", "verified"]):
            return self.COLORS["GREEN"]
        if any(phrase in msg for phrase in ["entry", "candidate", "search", "trial"]):
            return self.COLORS["VIOLET"]
        if any(phrase in msg for phrase in ["winner", "wins", "tau", "hit"]):
            return self.COLORS["BLUE"]
        return self.COLORS["WHITE"]

    def format(self, record):
        format_str = "%(asctime)s.%(msecs)03d %(levelname)s %(name)s: %(message)s"
        if self.use_color:
            format_str = self.pick_color(record) + format_str + self.COLORS["RESET"]
        formatter = logging.Formatter(format_str, datefmt=LOGGING["datefmt"])
        return formatter.format(record)


def configure_logging(level: Optional[str] = None) -> None:
    """Send every log record to stderr through CustomFormatter."""
    name = (level or LOGGING["level"]).upper()
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name("odesc")
    handler.setFormatter(CustomFormatter(use_color=sys.stderr.isatty()))
    root = logging.getLogger()
    for old in [h for h in root.handlers if h.get_name() == "odesc"]:
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(getattr(logging, name, logging.WARNING))
