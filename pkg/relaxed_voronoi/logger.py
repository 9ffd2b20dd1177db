"""
Package logging.

One stderr handler hangs off the ``relaxed_voronoi`` logger; every module
logs through a child of it, so stdout stays free for JSON reports.
"""

import logging
import sys
from typing import Optional

from relaxed_voronoi.config import LOG_FORMAT, LOG_LEVEL

PACKAGE_LOGGER = "relaxed_voronoi"


def _package_logger() -> logging.Logger:
    root = logging.getLogger(PACKAGE_LOGGER)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        root.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))
        root.propagate = False
    return root


def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """
    Logger for a module, nested under the package logger.

    Names outside the package (the CLI, scripts) are prefixed with it so
    they share the handler.

    Args:
        name: Usually ``__name__``.
        level: Optional level for this logger only.
    """
    root = _package_logger()
    if name == PACKAGE_LOGGER:
        return root
    if not name.startswith(PACKAGE_LOGGER + "."):
        name = f"{PACKAGE_LOGGER}.{name}"
    logger = logging.getLogger(name)
    if level:
        logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    return logger
