"""Exception hierarchy shared by every layer.

Each error carries the exit code the CLI reports for it, so commands can
translate failures without inspecting their type.
"""


class FhzipError(Exception):
    """Base class for all fhzip errors."""

    exit_code = 1


class ConfigError(FhzipError):
    """Invalid configuration value or configuration file."""

    exit_code = 1

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class InputError(FhzipError):
    """A caller passed arrays with the wrong shape or non-finite entries."""

    exit_code = 1


class UndefinedMetricError(InputError):
    """A metric is undefined for the given input (e.g. zero reference)."""


class StorageError(FhzipError):
    """A file could not be read or written."""

    exit_code = 2


class BudgetInfeasibleError(FhzipError):
    """The fronthaul budget is below the rate of the base stage."""

    exit_code = 3


class CorruptStreamError(FhzipError):
    """A container is truncated, inconsistent, or holds invalid indices."""

    exit_code = 4


class FormatError(CorruptStreamError):
    """Bad magic bytes or an unsupported container version."""


class CodebookMismatchError(FhzipError):
    """A bitstream was produced with different codebooks than supplied."""

    exit_code = 5
