"""File repository implementation using pathlib.

Writes go to a temporary sibling file that is renamed over the target, so
readers never observe a half-written container or report.
"""

import os
import tempfile
from pathlib import Path

from ..domain import StorageError


class FileRepository:
    """File system repository using pathlib.

    Implements IFileRepository. Every ``OSError`` is re-raised as
    ``StorageError`` naming the path.
    """

    def __init__(self, encoding: str = "utf-8") -> None:
        """Initialize the file repository.

        Args:
            encoding: Text encoding for read_text/write_text.
        """
        self._encoding = encoding

    def read_bytes(self, path: Path) -> bytes:
        """Read a whole file.

        Raises:
            StorageError: If the file cannot be read.
        """
        try:
            return Path(path).read_bytes()
        except OSError as e:
            raise StorageError(f"cannot read {path}: {e.strerror or e}") from e

    def read_text(self, path: Path) -> str:
        try:
            return Path(path).read_text(encoding=self._encoding)
        except OSError as e:
            raise StorageError(f"cannot read {path}: {e.strerror or e}") from e
        except UnicodeDecodeError as e:
            raise StorageError(f"{path} is not {self._encoding} text") from e

    def write_bytes(self, path: Path, content: bytes) -> None:
        """Atomically replace ``path`` with ``content``.

        Creates parent directories if they don't exist.

        Raises:
            StorageError: If the directory or file cannot be written.
        """
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as f:
                    f.write(content)
                os.replace(tmp, path)
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise
        except OSError as e:
            raise StorageError(f"cannot write {path}: {e.strerror or e}") from e

    def write_text(self, path: Path, content: str) -> None:
        self.write_bytes(path, content.encode(self._encoding))

    def exists(self, path: Path) -> bool:
        return Path(path).exists()
