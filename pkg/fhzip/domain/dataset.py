"""Domain models for precoding datasets and trained codec artifacts."""

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelConfig, RBChannelSet
from .codec import CodebookStack, EntropyModel, TransformPair
from .precoding import PrecoderConfig, PrecodingTensor


@dataclass(frozen=True)
class PrecodingSample:
    """One channel draw and its WMMSE precoders."""

    seed: int
    channel: RBChannelSet
    tensor: PrecodingTensor
    sum_rate: float


@dataclass
class PrecodingDataset:
    """A collection of samples generated under a single configuration."""

    channel_config: ChannelConfig
    precoder_config: PrecoderConfig
    samples: list[PrecodingSample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def subset(self, indices: np.ndarray) -> "PrecodingDataset":
        return PrecodingDataset(
            channel_config=self.channel_config,
            precoder_config=self.precoder_config,
            samples=[self.samples[int(i)] for i in indices],
        )


@dataclass(frozen=True)
class CodecArtifacts:
    """Everything a decoder needs besides the bitstream."""

    transform: TransformPair
    codebooks: CodebookStack
    entropy_model: EntropyModel

    @property
    def fingerprint(self) -> int:
        return self.codebooks.fingerprint
