"""Repository layer for data access abstraction.

This module provides repository interfaces (protocols) and their
implementations for files, configuration sources and binary containers.
"""

from .interfaces import IConfigRepository, IContainerRepository, IFileRepository
from .file_repository import FileRepository
from .config_repository import ConfigRepository
from .container_repository import ContainerRepository

__all__ = [
    "IFileRepository",
    "IConfigRepository",
    "IContainerRepository",
    "FileRepository",
    "ConfigRepository",
    "ContainerRepository",
]
