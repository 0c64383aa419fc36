"""Shared rich console and logging setup."""

import logging

from rich.console import Console
from rich.logging import RichHandler

from cfrelay import config

# Status output goes to stderr so CSV written to stdout stays clean
console = Console(stderr=True)


def configure_logging(level=None):
    """Route the cfrelay logger through rich."""
    level = (level or config.LOG_LEVEL).upper()

    logger = logging.getLogger("cfrelay")
    logger.handlers.clear()
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
