"""
Logging setup shared by the command-line tools.

Log records go to standard error so standard output carries only the
analysis report.
"""

import logging
import sys
from typing import Optional, TextIO

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3
    from pythonjsonlogger.jsonlogger import JsonFormatter

PLAIN_FORMAT = '%(asctime)s | %(levelname)-8s | %(message)s'
JSON_FORMAT = '%(asctime)s %(levelname)s %(name)s %(message)s'

_handler: Optional[logging.Handler] = None


def configure_logging(level: str = "WARNING", json_format: bool = False,
                      stream: Optional[TextIO] = None) -> logging.Handler:
    """Install (or replace) the root handler."""
    global _handler
    root = logging.getLogger()
    if _handler is not None:
        root.removeHandler(_handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    if json_format:
        handler.setFormatter(JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))
    _handler = handler
    return handler
