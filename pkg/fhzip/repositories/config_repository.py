"""Configuration repository implementation.

Reads the flat ``key = value`` run files and the packaged YAML presets.
"""

from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from ..domain import ConfigError
from .file_repository import FileRepository

PRESETS_RESOURCE = "presets.yaml"


class ConfigRepository:
    """Configuration file repository using pyyaml.

    Implements IConfigRepository.
    """

    def __init__(self, files: FileRepository) -> None:
        self._files = files

    def load_key_values(self, path: Path) -> dict[str, str]:
        """Parse a flat key=value file.

        ``#`` starts a comment; blank lines are skipped. Keys are
        normalized to lower case with ``-`` mapped to ``_``.

        Args:
            path: Path to the configuration file.

        Returns:
            Raw string values by key, in file order.

        Raises:
            StorageError: If the file cannot be read.
            ConfigError: On a line without ``=`` or a repeated key.
        """
        values: dict[str, str] = {}
        for number, line in enumerate(self._files.read_text(path).splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{Path(path).name}:{number}", f"expected key=value, got {line!r}")
            key = key.strip().lower().replace("-", "_")
            if key in values:
                raise ConfigError(key, f"set twice in {path}")
            values[key] = value.strip()
        return values

    def load_yaml(self, path: Path) -> dict[str, Any]:
        """Load a YAML mapping with safe_load; empty files give ``{}``.

        Raises:
            StorageError: If the file cannot be read.
            ConfigError: If the YAML is invalid or not a mapping.
        """
        return self._parse_yaml(self._files.read_text(path), str(path))

    def load_presets(self) -> dict[str, dict[str, Any]]:
        """Presets shipped inside the package, keyed by name."""
        text = resources.files("fhzip").joinpath(PRESETS_RESOURCE).read_text(encoding="utf-8")
        return self._parse_yaml(text, PRESETS_RESOURCE)

    @staticmethod
    def _parse_yaml(text: str, source: str) -> dict[str, Any]:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(source, f"invalid YAML: {e}") from e
        # safe_load returns None for empty files
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(source, "top level must be a mapping")
        return data
