"""Console logging in the `[component] LEVEL: message` style."""
import logging
import sys

from . import config

_ROOT = "loopsampler"


class _TagFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        tag = record.name.rsplit(".", 1)[-1]
        return f"[{tag}] {record.levelname}: {record.getMessage()}"


def get_logger(module_name: str) -> logging.Logger:
    """Return the logger for a `loopsampler.*` module name."""
    if not module_name.startswith(_ROOT):
        module_name = f"{_ROOT}.{module_name}"
    return logging.getLogger(module_name)


def configure_logging(level: str | None = None) -> None:
    root = logging.getLogger(_ROOT)
    root.setLevel(level or config.LOG_LEVEL)
    for handler in root.handlers:
        if getattr(handler, "_loopsampler", False):
            handler.stream = sys.stderr
            break
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_TagFormatter())
        handler._loopsampler = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.propagate = False
