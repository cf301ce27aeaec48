"""Domain models for the compression chain.

Covers the learned transform, the residual vector quantizer, the index
entropy model, the bitstream container and rate accounting.
"""

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError

BITSTREAM_MAGIC = b"FHZ1"
BITSTREAM_VERSION = 1
BITSTREAM_HEADER_BYTES = 33  # before the per-stage length table


@dataclass(frozen=True)
class TransformPair:
    """Linear analysis/synthesis pair with orthonormal analysis rows."""

    analysis: np.ndarray  # (d, 2*Nt)
    mean: np.ndarray  # (2*Nt,)

    @property
    def latent_dim(self) -> int:
        return int(self.analysis.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.analysis.shape[1])

    @property
    def num_tx_antennas(self) -> int:
        return self.input_dim // 2


@dataclass(frozen=True)
class Latent:
    """Token matrix z (T x d); one token per precoding row."""

    z: np.ndarray

    def __post_init__(self) -> None:
        if self.z.ndim != 2:
            raise InputError(f"latent must be T x d, got shape {self.z.shape}")

    @property
    def num_tokens(self) -> int:
        return int(self.z.shape[0])

    @property
    def dim(self) -> int:
        return int(self.z.shape[1])


@dataclass(frozen=True)
class CodebookStack:
    """Residual VQ codebooks, stage ``l`` is a (K_l, d) array."""

    stages: tuple[np.ndarray, ...]
    requested_sizes: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.stages:
            raise InputError("codebook stack needs at least one stage")
        dims = {int(c.shape[1]) for c in self.stages}
        if len(dims) != 1 or any(c.shape[0] == 0 for c in self.stages):
            raise InputError("codebooks must be non-empty and share one dimension")
        if not self.requested_sizes:
            object.__setattr__(self, "requested_sizes", self.sizes)

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    @property
    def dim(self) -> int:
        return int(self.stages[0].shape[1])

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(int(c.shape[0]) for c in self.stages)

    @property
    def shrunk_stages(self) -> list[int]:
        """Stages that ended up with fewer codewords than requested."""
        return [
            idx
            for idx, (got, want) in enumerate(zip(self.sizes, self.requested_sizes))
            if got < want
        ]

    @property
    def fingerprint(self) -> int:
        """64-bit hash over every codeword's little-endian float64 bytes."""
        digest = hashlib.blake2b(digest_size=8)
        for codebook in self.stages:
            digest.update(np.ascontiguousarray(codebook, dtype="<f8").tobytes())
        return int.from_bytes(digest.digest(), "little")


@dataclass(frozen=True)
class IndexStream:
    """Codeword indices of the active stages, shape (n_active, T)."""

    indices: np.ndarray
    alphabet_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.indices.ndim != 2 or self.indices.shape[0] != len(self.alphabet_sizes):
            raise InputError(
                f"index array shape {self.indices.shape} does not match "
                f"{len(self.alphabet_sizes)} active stages"
            )

    @property
    def active_stages(self) -> int:
        return len(self.alphabet_sizes)

    @property
    def num_tokens(self) -> int:
        return int(self.indices.shape[1])

    def stage(self, l: int) -> np.ndarray:
        return self.indices[l]


@dataclass(frozen=True)
class StageModel:
    """Smoothed frequency tables for one stage.

    Modeled frequencies are ``counts + 1`` (add-1 smoothing). In order-1
    mode, ``context_counts[prev]`` is used when ``prev`` was seen during
    fitting; otherwise, and for the first symbol, the order-0 table.
    """

    counts: np.ndarray  # (K,) int64
    context_counts: Optional[np.ndarray] = None  # (K, K) int64
    context_seen: Optional[np.ndarray] = None  # (K,) bool

    @property
    def alphabet_size(self) -> int:
        return int(self.counts.shape[0])

    @property
    def order(self) -> int:
        return 0 if self.context_counts is None else 1

    def frequencies(self, context: Optional[int]) -> np.ndarray:
        """Integer frequency table for the given previous symbol."""
        if (
            context is None
            or self.context_counts is None
            or self.context_seen is None
            or not self.context_seen[context]
        ):
            return self.counts + 1
        return self.context_counts[context] + 1

    def probabilities(self, context: Optional[int]) -> np.ndarray:
        freqs = self.frequencies(context).astype(np.float64)
        return freqs / freqs.sum()


@dataclass(frozen=True)
class EntropyModel:
    """Per-stage context models over codeword indices."""

    stages: tuple[StageModel, ...]
    order: int

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return tuple(s.alphabet_size for s in self.stages)


@dataclass(frozen=True)
class BitstreamHeader:
    """Fixed-layout header of an ``FHZ1`` bitstream."""

    num_rows: int  # D
    num_tx_antennas: int
    num_rbs: int
    num_users: int
    latent_dim: int
    model_order: int
    fingerprint: int
    payload_lengths: tuple[int, ...]  # bytes, one per active stage

    @property
    def active_stages(self) -> int:
        return len(self.payload_lengths)


@dataclass(frozen=True)
class Bitstream:
    """Header plus one arithmetic-coded payload per active stage."""

    header: BitstreamHeader
    payloads: tuple[bytes, ...]

    def __post_init__(self) -> None:
        if tuple(len(p) for p in self.payloads) != self.header.payload_lengths:
            raise InputError("payload lengths disagree with the header")

    @property
    def payload_bits(self) -> int:
        return 8 * sum(len(p) for p in self.payloads)


@dataclass(frozen=True)
class StageSelection:
    """Number of stages activated under a budget."""

    count: int
    infeasible: bool = False


@dataclass
class RateReport:
    """Rate accounting for one compressed tensor.

    ``stage_bits`` covers every trained stage (coded even if not sent);
    only the first ``active_stages`` entries count towards ``rate_total``.
    """

    tokens: int
    stage_bits: list[int]
    active_stages: int
    model_entropy_bits: list[float] = field(default_factory=list)
    alphabet_sizes: list[int] = field(default_factory=list)
    header_bits: int = 0
    infeasible: bool = False

    @property
    def stage_rates(self) -> list[float]:
        """Coded bits per token of every stage."""
        return [b / self.tokens for b in self.stage_bits]

    @property
    def rate_total(self) -> float:
        """Operational rate of the active prefix, bits per token."""
        return sum(self.stage_bits[: self.active_stages]) / self.tokens

    @property
    def entropy_rates(self) -> list[float]:
        """Model entropy per stage, bits per token."""
        return [h / self.tokens for h in self.model_entropy_bits]

    @property
    def fixed_rates(self) -> list[float]:
        """Fixed-length index cost per stage, bits per token."""
        return [math.log2(k) if k > 1 else 0.0 for k in self.alphabet_sizes]

    @property
    def total_bits(self) -> int:
        return self.header_bits + sum(self.stage_bits[: self.active_stages])
