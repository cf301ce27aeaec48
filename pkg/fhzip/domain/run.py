"""Run configuration for the end-to-end pipeline."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .channel import ChannelConfig
from .errors import ConfigError
from .precoding import PrecoderConfig

STAGE_POLICIES = ("prefix", "rd")


@dataclass(frozen=True)
class CodecConfig:
    """Transform, quantizer, entropy-model and budget settings."""

    latent_dim: int = 32
    codebook_sizes: tuple[int, ...] = (64, 64, 64, 64)
    lbg_iters: int = 50
    entropy_order: int = 1
    rate_weight: float = 0.01  # lambda, per bit/token
    commitment_weight: float = 0.25  # gamma
    budget_bits_per_token: Optional[float] = None  # None: unlimited
    stage_policy: str = "prefix"
    project_power: bool = True

    def validate(self, num_tx_antennas: int) -> None:
        if not 1 <= self.latent_dim <= 2 * num_tx_antennas:
            raise ConfigError(
                "latent_dim", f"must be in [1, {2 * num_tx_antennas}], got {self.latent_dim}"
            )
        if not self.codebook_sizes or any(k < 1 for k in self.codebook_sizes):
            raise ConfigError("codebook_sizes", "need at least one stage, sizes >= 1")
        if any(k > 2**32 - 1 for k in self.codebook_sizes):
            raise ConfigError("codebook_sizes", "sizes must fit in 32 bits")
        if len(self.codebook_sizes) > 255:
            raise ConfigError("codebook_sizes", "at most 255 stages")
        if self.lbg_iters < 1:
            raise ConfigError("lbg_iters", f"must be >= 1, got {self.lbg_iters}")
        if self.entropy_order not in (0, 1):
            raise ConfigError("entropy_order", f"must be 0 or 1, got {self.entropy_order}")
        if self.rate_weight < 0:
            raise ConfigError("rate_weight", "must be >= 0")
        if self.commitment_weight < 0:
            raise ConfigError("commitment_weight", "must be >= 0")
        if self.budget_bits_per_token is not None and not self.budget_bits_per_token >= 0:
            raise ConfigError("budget_bits_per_token", "must be >= 0")
        if self.stage_policy not in STAGE_POLICIES:
            raise ConfigError("stage_policy", f"must be one of {', '.join(STAGE_POLICIES)}")

    @property
    def budget(self) -> float:
        return math.inf if self.budget_bits_per_token is None else self.budget_bits_per_token


@dataclass(frozen=True)
class DatasetConfig:
    """Dataset size, split and master seed."""

    num_samples: int = 512
    train_fraction: float = 0.8
    seed: int = 0

    def validate(self) -> None:
        if self.num_samples < 2:
            raise ConfigError("num_samples", f"must be >= 2, got {self.num_samples}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                "train_fraction", f"must be in (0, 1), got {self.train_fraction}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RunConfig:
    """Aggregate configuration for a pipeline run."""

    channel: ChannelConfig = field(default_factory=ChannelConfig)
    precoder: PrecoderConfig = field(default_factory=PrecoderConfig)
    codec: CodecConfig = field(default_factory=CodecConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    out_dir: Path = field(default_factory=Path.cwd)

    def validate(self) -> None:
        """Validate every sub-configuration.

        Raises:
            ConfigError: Naming the first offending field.
        """
        self.channel.validate()
        self.precoder.validate()
        self.codec.validate(self.channel.num_tx_antennas)
        self.dataset.validate()
