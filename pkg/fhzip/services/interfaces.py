"""Service interface protocols.

Defines the contracts for service implementations using Python's Protocol
for structural subtyping (duck typing with type hints).
"""

import math
from pathlib import Path
from typing import Any, Mapping, Optional, Protocol, Sequence, runtime_checkable

import numpy as np

from ..domain import (
    Bitstream,
    ChannelConfig,
    CodebookStack,
    CodecArtifacts,
    CodecConfig,
    EntropyModel,
    EvalReport,
    IndexStream,
    Latent,
    MultipathProfile,
    PrecoderConfig,
    PrecodingDataset,
    PrecodingSample,
    PrecodingSet,
    PrecodingTensor,
    RateReport,
    RBChannelSet,
    RBPrecoding,
    RunConfig,
    TransformPair,
)


@runtime_checkable
class IChannelService(Protocol):
    """Protocol for synthetic channel generation."""

    def generate_profile(self, cfg: ChannelConfig) -> MultipathProfile:
        """Draw a tapped-delay-line profile, fully determined by cfg.seed.

        Raises:
            ConfigError: If cfg is invalid.
        """
        ...

    def frequency_response(self, profile: MultipathProfile, cfg: ChannelConfig) -> RBChannelSet:
        ...

    def generate(self, cfg: ChannelConfig) -> RBChannelSet:
        ...


@runtime_checkable
class IPrecoderService(Protocol):
    """Protocol for RB-wise WMMSE precoding and sum-rate evaluation."""

    def wmmse_rb(self, H_g: np.ndarray, cfg: PrecoderConfig) -> RBPrecoding:
        ...

    def precode(self, channel: RBChannelSet, cfg: PrecoderConfig) -> PrecodingSet:
        ...

    def sum_rate(
        self,
        H: RBChannelSet | np.ndarray,
        V: PrecodingSet | np.ndarray,
        noise_power: float,
        rb_weights: Optional[tuple[float, ...]] = None,
    ) -> float:
        """Per-RB average sum rate in bits/s/Hz."""
        ...

    def generate_precoding_tensor(self, channel: RBChannelSet, cfg: PrecoderConfig) -> PrecodingTensor:
        ...


@runtime_checkable
class ITransformService(Protocol):
    """Protocol for the analysis/synthesis transform pair.

    A neural encoder/decoder can stand in for the linear transform as long
    as it honours these signatures.
    """

    def fit_transform(self, tensors: Sequence[PrecodingTensor], latent_dim: int) -> TransformPair:
        ...

    def analyze(self, tensor: PrecodingTensor, transform: TransformPair) -> Latent:
        ...

    def synthesize(
        self, latent: Latent, transform: TransformPair, num_rbs: int, num_users: int
    ) -> PrecodingTensor:
        ...


@runtime_checkable
class IQuantizerService(Protocol):
    """Protocol for residual vector quantization."""

    def train_codebooks(
        self, latents: Sequence[Latent], sizes: Sequence[int], lbg_iters: int, seed: int
    ) -> CodebookStack:
        ...

    def quantize(
        self, latent: Latent, stack: CodebookStack, active_stages: int
    ) -> tuple[IndexStream, Latent]:
        ...

    def dequantize(self, indices: IndexStream, stack: CodebookStack) -> Latent:
        ...


@runtime_checkable
class IEntropyService(Protocol):
    """Protocol for the index entropy model and arithmetic coder."""

    def fit_entropy_model(self, streams: Sequence[IndexStream], order: int) -> EntropyModel:
        ...

    def entropy_estimate(self, model: EntropyModel, stream: IndexStream) -> float:
        """Modeled code length in bits."""
        ...

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
        ...

    def decode(self, bitstream: Bitstream, model: EntropyModel, fingerprint: int) -> IndexStream:
        """Inverse of encode.

        Raises:
            CodebookMismatchError: If the fingerprint differs.
        """
        ...


@runtime_checkable
class ICodecService(Protocol):
    """Protocol for the composed codec."""

    def train(self, tensors: Sequence[PrecodingTensor], cfg: CodecConfig, seed: int) -> CodecArtifacts:
        ...

    def compress(
        self,
        tensor: PrecodingTensor,
        artifacts: CodecArtifacts,
        budget: float = math.inf,
        *,
        stage_policy: str = "prefix",
        rate_weight: float = 0.0,
        active_stages: Optional[int] = None,
    ) -> tuple[Bitstream, RateReport]:
        ...

    def decompress(self, bitstream: Bitstream, artifacts: CodecArtifacts) -> PrecodingTensor:
        ...


@runtime_checkable
class IMetricsService(Protocol):
    """Protocol for distortion and system-level metrics."""

    def mse(self, V: PrecodingTensor | np.ndarray, V_hat: PrecodingTensor | np.ndarray) -> float:
        ...

    def nmse(self, V: PrecodingTensor | np.ndarray, V_hat: PrecodingTensor | np.ndarray) -> float:
        ...

    def rd_objective(
        self, mse: float, rate: float, l_vq: float, rate_weight: float, commitment_weight: float
    ) -> float:
        ...

    def evaluate(
        self,
        samples: Sequence[PrecodingSample],
        artifacts: CodecArtifacts,
        codec_cfg: CodecConfig,
        precoder_cfg: PrecoderConfig,
        stages: Optional[int] = None,
    ) -> EvalReport:
        ...

    def rd_sweep(
        self,
        samples: Sequence[PrecodingSample],
        artifacts: CodecArtifacts,
        codec_cfg: CodecConfig,
        precoder_cfg: PrecoderConfig,
    ) -> list[EvalReport]:
        ...


@runtime_checkable
class IConfigService(Protocol):
    """Protocol for run configuration assembly."""

    def build(
        self, config_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None
    ) -> RunConfig:
        ...


@runtime_checkable
class IPipelineService(Protocol):
    """Protocol for the command-level facade."""

    def gen_data(self, cfg: RunConfig, output: Path) -> PrecodingDataset:
        ...

    def train(self, cfg: RunConfig, dataset_path: Path, artifacts_path: Path) -> CodecArtifacts:
        ...

    def compress(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        input_path: Path,
        output_path: Path,
        sample: Optional[int] = None,
        active_stages: Optional[int] = None,
    ) -> RateReport:
        ...

    def decompress(self, artifacts_path: Path, bitstream_path: Path, output_path: Path) -> PrecodingTensor:
        ...

    def evaluate(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        dataset_path: Path,
        csv_path: Optional[Path] = None,
        split: str = "test",
        stages: Optional[int] = None,
    ) -> EvalReport:
        ...

    def sweep(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        dataset_path: Path,
        csv_path: Optional[Path] = None,
        split: str = "test",
    ) -> list[EvalReport]:
        ...
