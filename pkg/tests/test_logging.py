"""Tests for console logging setup."""

import logging

import pytest
from rich.console import Console
from rich.logging import RichHandler

from fhzip.infrastructure.logging import setup_logging


@pytest.fixture
def fhzip_logger():
    """The package logger, restored after the test."""
    logger = logging.getLogger("fhzip")
    level, handlers = logger.level, list(logger.handlers)
    yield logger
    logger.setLevel(level)
    logger.handlers[:] = handlers


class TestSetupLogging:
    """Tests for setup_logging."""

    @pytest.mark.parametrize(
        "verbosity,level", [(0, logging.WARNING), (1, logging.INFO), (2, logging.DEBUG), (5, logging.DEBUG)]
    )
    def test_verbosity_levels(self, fhzip_logger, verbosity, level):
        """Each -v lowers the threshold one step."""
        setup_logging(verbosity, Console(file=None, quiet=True))

        assert fhzip_logger.level == level

    def test_repeated_setup_keeps_one_handler(self, fhzip_logger):
        """Calling setup twice replaces the rich handler."""
        setup_logging(0)
        setup_logging(1)

        assert sum(isinstance(h, RichHandler) for h in fhzip_logger.handlers) == 1

    def test_messages_reach_console(self, fhzip_logger):
        """Records are rendered on the given console."""
        console = Console(record=True, width=120)
        setup_logging(1, console)

        logging.getLogger("fhzip.services").info("stage 0 trained")

        assert "stage 0 trained" in console.export_text()
