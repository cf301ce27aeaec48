"""Console logging setup for the command-line interface."""

import logging

from rich.console import Console
from rich.logging import RichHandler

_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def setup_logging(verbosity: int = 0, console: Console | None = None) -> None:
    """Route the ``fhzip`` logger to stderr through rich.

    Args:
        verbosity: 0 for WARNING, 1 for INFO, 2 or more for DEBUG.
        console: Console to log to; a stderr console by default.
    """
    logger = logging.getLogger("fhzip")
    logger.setLevel(_LEVELS.get(verbosity, logging.DEBUG))
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=verbosity >= 2,
        rich_tracebacks=False,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
