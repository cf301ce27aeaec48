"""Integer arithmetic coder with a 32-bit state.

Encoder and decoder share the interval update; renormalization emits one
bit per shift and defers straddling (underflow) bits until the next shift
resolves them. Frequency tables are cumulative integer arrays whose last
entry is the total, which must not exceed ``MAX_TOTAL``.
"""

import numpy as np
from bitarray import bitarray

STATE_BITS = 32
FULL_RANGE = 1 << STATE_BITS
HALF_RANGE = FULL_RANGE >> 1
QUARTER_RANGE = HALF_RANGE >> 1
MIN_RANGE = QUARTER_RANGE + 2
MAX_TOTAL = MIN_RANGE
STATE_MASK = FULL_RANGE - 1


def cumulative(freqs: np.ndarray) -> list[int]:
    """Cumulative table [0, f0, f0+f1, ...] as Python ints."""
    cum = [0]
    for f in freqs.tolist():
        cum.append(cum[-1] + int(f))
    if cum[-1] > MAX_TOTAL:
        raise ValueError(f"frequency total {cum[-1]} exceeds {MAX_TOTAL}")
    return cum


class _CoderBase:
    def __init__(self) -> None:
        self.low = 0
        self.high = STATE_MASK

    def _update(self, cum: list[int], symbol: int) -> None:
        span = self.high - self.low + 1
        total = cum[-1]
        sym_low = cum[symbol]
        sym_high = cum[symbol + 1]
        if sym_low == sym_high:
            raise ValueError(f"symbol {symbol} has zero frequency")
        self.high = self.low + sym_high * span // total - 1
        self.low = self.low + sym_low * span // total

        while ((self.low ^ self.high) & HALF_RANGE) == 0:
            self._shift()
            self.low = (self.low << 1) & STATE_MASK
            self.high = ((self.high << 1) & STATE_MASK) | 1
        while (self.low & ~self.high & QUARTER_RANGE) != 0:
            self._underflow()
            self.low = (self.low << 1) ^ HALF_RANGE
            self.high = ((self.high ^ HALF_RANGE) << 1) | HALF_RANGE | 1

    def _shift(self) -> None:
        raise NotImplementedError

    def _underflow(self) -> None:
        raise NotImplementedError


class ArithmeticEncoder(_CoderBase):
    """Encodes symbols into a bitarray."""

    def __init__(self) -> None:
        super().__init__()
        self.bits = bitarray(endian="big")
        self._pending = 0

    def write(self, cum: list[int], symbol: int) -> None:
        self._update(cum, symbol)

    def finish(self) -> bytes:
        """Terminate the code and return it padded to whole bytes."""
        self.bits.append(1)
        return self.bits.tobytes()

    def _shift(self) -> None:
        bit = self.low >> (STATE_BITS - 1)
        self.bits.append(bit)
        if self._pending:
            self.bits.extend([bit ^ 1] * self._pending)
            self._pending = 0

    def _underflow(self) -> None:
        self._pending += 1


class ArithmeticDecoder(_CoderBase):
    """Decodes symbols from a byte payload; reads zeros past the end."""

    def __init__(self, payload: bytes) -> None:
        super().__init__()
        self.bits = bitarray(endian="big")
        self.bits.frombytes(payload)
        self.consumed = 0
        self.code = 0
        for _ in range(STATE_BITS):
            self.code = (self.code << 1) | self._next_bit()

    def read(self, cum: list[int]) -> int:
        total = cum[-1]
        span = self.high - self.low + 1
        offset = self.code - self.low
        value = ((offset + 1) * total - 1) // span
        # highest symbol with cum[symbol] <= value
        start, end = 0, len(cum) - 1
        while end - start > 1:
            middle = (start + end) >> 1
            if cum[middle] > value:
                end = middle
            else:
                start = middle
        self._update(cum, start)
        return start

    def _next_bit(self) -> int:
        bit = self.bits[self.consumed] if self.consumed < len(self.bits) else 0
        self.consumed += 1
        return bit

    def _shift(self) -> None:
        self.code = ((self.code << 1) & STATE_MASK) | self._next_bit()

    def _underflow(self) -> None:
        self.code = (self.code & HALF_RANGE) | ((self.code << 1) & (STATE_MASK >> 1)) | self._next_bit()
