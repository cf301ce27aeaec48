"""Container repository: binary containers on disk."""

from pathlib import Path
from typing import Optional

from ..domain import (
    Bitstream,
    CodecArtifacts,
    FormatError,
    InputError,
    PrecodingDataset,
    PrecodingTensor,
)
from . import containers
from .file_repository import FileRepository


class ContainerRepository:
    """Loads and saves FHD1/FHM1/FHZ1/FHT1 files through a FileRepository."""

    def __init__(self, files: FileRepository) -> None:
        self._files = files

    def save_dataset(self, path: Path, dataset: PrecodingDataset) -> None:
        self._files.write_bytes(path, containers.pack_dataset(dataset))

    def load_dataset(self, path: Path) -> PrecodingDataset:
        return containers.unpack_dataset(self._files.read_bytes(path))

    def save_artifacts(self, path: Path, artifacts: CodecArtifacts) -> None:
        self._files.write_bytes(path, containers.pack_artifacts(artifacts))

    def load_artifacts(self, path: Path) -> CodecArtifacts:
        return containers.unpack_artifacts(self._files.read_bytes(path))

    def save_bitstream(self, path: Path, bitstream: Bitstream) -> None:
        self._files.write_bytes(path, containers.pack_bitstream(bitstream))

    def load_bitstream(self, path: Path) -> Bitstream:
        return containers.unpack_bitstream(self._files.read_bytes(path))

    def save_tensor(self, path: Path, tensor: PrecodingTensor) -> None:
        self._files.write_bytes(path, containers.pack_tensor(tensor))

    def load_tensor(self, path: Path, sample: Optional[int] = None) -> PrecodingTensor:
        """Load a single tensor, or sample ``sample`` of a dataset file.

        Raises:
            FormatError: If the file is neither FHT1 nor FHD1.
            InputError: If ``sample`` is missing for a dataset, given for a
                tensor file, or out of range.
        """
        buffer = self._files.read_bytes(path)
        magic = containers.sniff_magic(buffer)
        if magic == containers.TENSOR_MAGIC:
            if sample is not None:
                raise InputError(f"{path} holds a single tensor; --sample does not apply")
            return containers.unpack_tensor(buffer)
        if magic == containers.DATASET_MAGIC:
            dataset = containers.unpack_dataset(buffer)
            index = 0 if sample is None and len(dataset) == 1 else sample
            if index is None:
                raise InputError(f"{path} holds {len(dataset)} samples; choose one with --sample")
            if not 0 <= index < len(dataset):
                raise InputError(f"sample {index} out of range [0, {len(dataset)})")
            return dataset.samples[index].tensor
        raise FormatError(f"{path}: bad magic {magic!r}, expected a tensor or dataset")
