"""Domain layer: channels, precoders, codec types and configuration."""

from .channel import ChannelConfig, MultipathProfile, RBChannelSet
from .precoding import PrecoderConfig, PrecodingSet, PrecodingTensor, RBPrecoding
from .codec import (
    BITSTREAM_HEADER_BYTES,
    BITSTREAM_MAGIC,
    BITSTREAM_VERSION,
    Bitstream,
    BitstreamHeader,
    CodebookStack,
    EntropyModel,
    IndexStream,
    Latent,
    RateReport,
    StageModel,
    StageSelection,
    TransformPair,
)
from .metrics import CSV_HEADER, EvalReport
from .dataset import CodecArtifacts, PrecodingDataset, PrecodingSample
from .run import STAGE_POLICIES, CodecConfig, DatasetConfig, RunConfig
from .errors import (
    BudgetInfeasibleError,
    CodebookMismatchError,
    ConfigError,
    CorruptStreamError,
    FhzipError,
    FormatError,
    InputError,
    StorageError,
    UndefinedMetricError,
)

__all__ = [
    "ChannelConfig",
    "MultipathProfile",
    "RBChannelSet",
    "PrecoderConfig",
    "PrecodingSet",
    "PrecodingTensor",
    "RBPrecoding",
    "BITSTREAM_HEADER_BYTES",
    "BITSTREAM_MAGIC",
    "BITSTREAM_VERSION",
    "Bitstream",
    "BitstreamHeader",
    "CodebookStack",
    "EntropyModel",
    "IndexStream",
    "Latent",
    "RateReport",
    "StageModel",
    "StageSelection",
    "TransformPair",
    "CSV_HEADER",
    "EvalReport",
    "CodecArtifacts",
    "PrecodingDataset",
    "PrecodingSample",
    "STAGE_POLICIES",
    "CodecConfig",
    "DatasetConfig",
    "RunConfig",
    "BudgetInfeasibleError",
    "CodebookMismatchError",
    "ConfigError",
    "CorruptStreamError",
    "FhzipError",
    "FormatError",
    "InputError",
    "StorageError",
    "UndefinedMetricError",
]
