"""Little-endian binary writer and reader used by every container."""

import struct

import numpy as np

from ..domain import CorruptStreamError


class BinaryWriter:
    """Accumulates little-endian fields into a byte buffer."""

    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def pack(self, fmt: str, *values) -> None:
        self._parts.append(struct.pack("<" + fmt, *values))

    def pack_bytes(self, value: bytes) -> None:
        self._parts.append(value)

    def pack_array(self, array: np.ndarray, dtype: str) -> None:
        """Raw array bytes in C order with the given little-endian dtype."""
        self._parts.append(np.ascontiguousarray(array, dtype=dtype).tobytes())

    def pack_complex(self, array: np.ndarray) -> None:
        """Complex array as interleaved (re, im) float64 pairs."""
        pairs = np.stack([array.real, array.imag], axis=-1)
        self.pack_array(pairs, "<f8")

    def serialize(self) -> bytes:
        return b"".join(self._parts)


class BinaryReader:
    """Consumes little-endian fields; running out of data is corruption."""

    def __init__(self, buffer: bytes) -> None:
        self._buffer = memoryview(buffer)
        self._offset = 0

    @property
    def remaining(self) -> int:
        return len(self._buffer) - self._offset

    def _take(self, size: int) -> memoryview:
        if size > self.remaining:
            raise CorruptStreamError(
                f"truncated data: need {size} bytes at offset {self._offset}, have {self.remaining}"
            )
        chunk = self._buffer[self._offset : self._offset + size]
        self._offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        fmt = "<" + fmt
        return struct.unpack(fmt, self._take(struct.calcsize(fmt)))

    def unpack_one(self, fmt: str):
        return self.unpack(fmt)[0]

    def unpack_bytes(self, size: int) -> bytes:
        return bytes(self._take(size))

    def unpack_array(self, shape: tuple[int, ...], dtype: str) -> np.ndarray:
        count = int(np.prod(shape)) if shape else 1
        itemsize = np.dtype(dtype).itemsize
        raw = self._take(count * itemsize)
        native = np.dtype(dtype).newbyteorder("=")
        return np.frombuffer(raw, dtype=dtype).reshape(shape).astype(native)

    def unpack_complex(self, shape: tuple[int, ...]) -> np.ndarray:
        pairs = self.unpack_array(shape + (2,), "<f8")
        return pairs[..., 0] + 1j * pairs[..., 1]

    def expect_end(self) -> None:
        if self.remaining:
            raise CorruptStreamError(f"{self.remaining} trailing bytes after container end")
