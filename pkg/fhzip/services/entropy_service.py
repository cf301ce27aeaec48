"""Context entropy model and arithmetic coding of codeword indices.

Each residual stage gets its own static (fitted once, then frozen)
frequency model: order 0, or order 1 conditioned on the previous index of
the same stage. Stages are coded into separate payloads so any prefix of
stages can be transmitted. Each payload ends with a 16-bit check value of
its indices, coded with a flat byte table.
"""

import hashlib
import logging
from typing import Optional, Sequence

import numpy as np

from ..domain import (
    Bitstream,
    BitstreamHeader,
    CodebookMismatchError,
    CorruptStreamError,
    EntropyModel,
    IndexStream,
    InputError,
    StageModel,
)
from .arithmetic_coder import MAX_TOTAL, ArithmeticDecoder, ArithmeticEncoder, cumulative

logger = logging.getLogger(__name__)

CHECK_BYTES = 2
_BYTE_TABLE = list(range(257))


def stage_check(symbols: np.ndarray) -> bytes:
    """Check value of one stage's indices."""
    data = np.ascontiguousarray(symbols, dtype="<i8").tobytes()
    return hashlib.blake2b(data, digest_size=CHECK_BYTES).digest()


def _fit_counts(counts: np.ndarray) -> np.ndarray:
    """Halve counts until the add-1 table fits the coder's total."""
    counts = counts.astype(np.int64)
    while counts.sum() + counts.shape[-1] > MAX_TOTAL:
        counts = counts // 2
    return counts


class _StageTables:
    """Cumulative tables for one stage, built once per encode/decode."""

    def __init__(self, model: StageModel) -> None:
        self._model = model
        self._base = cumulative(model.frequencies(None))
        self._by_context: dict[int, list[int]] = {}

    def get(self, context: Optional[int]) -> list[int]:
        if context is None or self._model.order == 0:
            return self._base
        table = self._by_context.get(context)
        if table is None:
            table = cumulative(self._model.frequencies(context))
            self._by_context[context] = table
        return table


class EntropyService:
    """Fits entropy models, estimates code lengths and runs the coder."""

    def fit_entropy_model(self, streams: Sequence[IndexStream], order: int) -> EntropyModel:
        """Count symbols (order 0) or (previous, current) pairs (order 1).

        Args:
            streams: Training index streams with identical stage alphabets.
            order: Context order, 0 or 1.

        Returns:
            The fitted EntropyModel.

        Raises:
            InputError: If streams is empty, alphabets differ, or order is
                not 0 or 1.
        """
        if not streams:
            raise InputError("no index streams to fit")
        if order not in (0, 1):
            raise InputError(f"entropy order must be 0 or 1, got {order}")
        alphabets = streams[0].alphabet_sizes
        if any(s.alphabet_sizes != alphabets for s in streams):
            raise InputError("index streams have different stage alphabets")

        stages = []
        for l, K in enumerate(alphabets):
            counts = np.zeros(K, dtype=np.int64)
            pairs = np.zeros((K, K), dtype=np.int64) if order == 1 else None
            for stream in streams:
                symbols = stream.stage(l)
                counts += np.bincount(symbols, minlength=K)
                if pairs is not None and symbols.size > 1:
                    np.add.at(pairs, (symbols[:-1], symbols[1:]), 1)
            if pairs is None:
                stages.append(StageModel(counts=_fit_counts(counts)))
            else:
                seen = pairs.sum(axis=1) > 0
                rows = np.stack([_fit_counts(row) for row in pairs])
                stages.append(
                    StageModel(counts=_fit_counts(counts), context_counts=rows, context_seen=seen)
                )
        return EntropyModel(stages=tuple(stages), order=order)

    def _check_alphabets(self, model: EntropyModel, stream: IndexStream) -> None:
        if stream.alphabet_sizes != model.alphabet_sizes[: stream.active_stages]:
            raise InputError(
                f"stream alphabets {stream.alphabet_sizes} do not match model "
                f"{model.alphabet_sizes}"
            )

    def stage_entropy_bits(self, model: StageModel, symbols: np.ndarray) -> float:
        """-sum log2 p(c_i | ctx_i) for one stage."""
        if symbols.size == 0:
            return 0.0
        base = model.probabilities(None)
        probs = np.empty(symbols.size, dtype=np.float64)
        probs[0] = base[symbols[0]]
        if model.order == 0:
            probs[1:] = base[symbols[1:]]
        else:
            assert model.context_counts is not None and model.context_seen is not None
            table = (model.context_counts + 1).astype(np.float64)
            table /= table.sum(axis=1, keepdims=True)
            prev, cur = symbols[:-1], symbols[1:]
            probs[1:] = np.where(model.context_seen[prev], table[prev, cur], base[cur])
        return float(-np.sum(np.log2(probs)))

    def entropy_estimate(self, model: EntropyModel, stream: IndexStream) -> float:
        """Modeled code length of all active stages in bits.

        Raises:
            InputError: If the stream's alphabets do not match the model.
        """
        self._check_alphabets(model, stream)
        return sum(
            self.stage_entropy_bits(model.stages[l], stream.stage(l))
            for l in range(stream.active_stages)
        )

    def encode_stage(self, model: StageModel, symbols: np.ndarray) -> bytes:
        """Arithmetic-code one stage's indices."""
        tables = _StageTables(model)
        encoder = ArithmeticEncoder()
        prev: Optional[int] = None
        for symbol in symbols.tolist():
            encoder.write(tables.get(prev), symbol)
            prev = symbol
        for byte in stage_check(symbols):
            encoder.write(_BYTE_TABLE, byte)
        return encoder.finish()

    def decode_stage(self, model: StageModel, payload: bytes, count: int) -> np.ndarray:
        """Decode ``count`` indices from one stage payload.

        The payload must be exactly what ``encode_stage`` writes for the
        decoded indices, check value and termination included.

        Raises:
            CorruptStreamError: If the check value or the payload bytes do
                not match the decoded indices.
        """
        tables = _StageTables(model)
        decoder = ArithmeticDecoder(payload)
        out = np.empty(count, dtype=np.int64)
        prev: Optional[int] = None
        for i in range(count):
            prev = decoder.read(tables.get(prev))
            out[i] = prev
        check = bytes(decoder.read(_BYTE_TABLE) for _ in range(CHECK_BYTES))
        if check != stage_check(out):
            raise CorruptStreamError("stage payload fails its check value")
        if self.encode_stage(model, out) != payload:
            raise CorruptStreamError("stage payload does not terminate where its indices end")
        return out

    def encode(
        self,
        stream: IndexStream,
        model: EntropyModel,
        *,
        num_rbs: int,
        num_users: int,
        num_tx_antennas: int,
        latent_dim: int,
        fingerprint: int,
    ) -> Bitstream:
        """Code every active stage and wrap the payloads with a header.

        Raises:
            InputError: If the stream's alphabets do not match the model or
                the token count is not num_rbs * num_users.
        """
        self._check_alphabets(model, stream)
        if stream.num_tokens != num_rbs * num_users:
            raise InputError(f"{stream.num_tokens} tokens for {num_rbs} RBs x {num_users} users")
        payloads = tuple(
            self.encode_stage(model.stages[l], stream.stage(l))
            for l in range(stream.active_stages)
        )
        header = BitstreamHeader(
            num_rows=stream.num_tokens,
            num_tx_antennas=num_tx_antennas,
            num_rbs=num_rbs,
            num_users=num_users,
            latent_dim=latent_dim,
            model_order=model.order,
            fingerprint=fingerprint,
            payload_lengths=tuple(len(p) for p in payloads),
        )
        return Bitstream(header=header, payloads=payloads)

    def decode(self, bitstream: Bitstream, model: EntropyModel, fingerprint: int) -> IndexStream:
        """Inverse of encode.

        Raises:
            CorruptStreamError: If a stage payload fails its integrity checks.
            CodebookMismatchError: If the bitstream fingerprint differs, needs
                more stages than the model has, or was coded with another
                model order.
        """
        header = bitstream.header
        if header.fingerprint != fingerprint:
            raise CodebookMismatchError(
                f"bitstream fingerprint {header.fingerprint:016x} != codebooks {fingerprint:016x}"
            )
        if header.active_stages > len(model.stages):
            raise CodebookMismatchError(
                f"bitstream has {header.active_stages} stages, model only {len(model.stages)}"
            )
        if header.model_order != model.order:
            raise CodebookMismatchError(f"bitstream order {header.model_order} != model order {model.order}")
        rows = [
            self.decode_stage(model.stages[l], bitstream.payloads[l], header.num_rows)
            for l in range(header.active_stages)
        ]
        indices = np.stack(rows) if rows else np.zeros((0, header.num_rows), dtype=np.int64)
        return IndexStream(indices=indices, alphabet_sizes=model.alphabet_sizes[: header.active_stages])
