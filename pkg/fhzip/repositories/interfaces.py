"""Repository interface protocols.

Defines the contracts for repository implementations using Python's Protocol
for structural subtyping.
"""

from pathlib import Path
from typing import Any, Optional, Protocol, runtime_checkable

from ..domain import Bitstream, CodecArtifacts, PrecodingDataset, PrecodingTensor


@runtime_checkable
class IFileRepository(Protocol):
    """Protocol for file system operations.

    Implementations report failures as StorageError and replace files
    atomically on write.
    """

    def read_bytes(self, path: Path) -> bytes:
        ...

    def read_text(self, path: Path) -> str:
        ...

    def write_bytes(self, path: Path, content: bytes) -> None:
        ...

    def write_text(self, path: Path, content: str) -> None:
        ...

    def exists(self, path: Path) -> bool:
        ...


@runtime_checkable
class IConfigRepository(Protocol):
    """Protocol for configuration sources."""

    def load_key_values(self, path: Path) -> dict[str, str]:
        """Parse a flat key=value file into raw strings by key.

        Raises:
            StorageError: If the file cannot be read.
            ConfigError: On malformed lines or repeated keys.
        """
        ...

    def load_yaml(self, path: Path) -> dict[str, Any]:
        ...

    def load_presets(self) -> dict[str, dict[str, Any]]:
        """Packaged presets keyed by name."""
        ...


@runtime_checkable
class IContainerRepository(Protocol):
    """Protocol for the binary containers."""

    def save_dataset(self, path: Path, dataset: PrecodingDataset) -> None:
        ...

    def load_dataset(self, path: Path) -> PrecodingDataset:
        ...

    def save_artifacts(self, path: Path, artifacts: CodecArtifacts) -> None:
        ...

    def load_artifacts(self, path: Path) -> CodecArtifacts:
        """Load FHM1 artifacts.

        Raises:
            CodebookMismatchError: If the stored fingerprint is stale.
        """
        ...

    def save_bitstream(self, path: Path, bitstream: Bitstream) -> None:
        ...

    def load_bitstream(self, path: Path) -> Bitstream:
        ...

    def save_tensor(self, path: Path, tensor: PrecodingTensor) -> None:
        ...

    def load_tensor(self, path: Path, sample: Optional[int] = None) -> PrecodingTensor:
        ...
