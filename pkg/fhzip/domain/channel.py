"""Domain models for synthetic downlink channels.

Channels are represented at resource-block granularity: one complex
response vector per (RB, user) pair.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ChannelConfig:
    """Parameters of the tapped-delay-line channel generator.

    Users are single-antenna; ``carrier_freq`` is carried as metadata only.
    """

    num_tx_antennas: int = 16
    num_users: int = 4
    num_rbs: int = 16
    subcarriers_per_rb: int = 12
    subcarrier_spacing: float = 30e3  # Hz
    num_paths: int = 20
    rms_delay_spread: float = 800e-9  # seconds
    carrier_freq: float = 3.5e9  # Hz
    seed: int = 0
    rb_average: bool = False  # average over the RB instead of center sample

    def validate(self) -> None:
        """Check field ranges.

        Raises:
            ConfigError: Naming the first offending field.
        """
        for name in ("num_tx_antennas", "num_users", "num_rbs", "subcarriers_per_rb", "num_paths"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if not (self.rms_delay_spread > 0 and math.isfinite(self.rms_delay_spread)):
            raise ConfigError("rms_delay_spread", f"must be > 0, got {self.rms_delay_spread!r}")
        if not (self.subcarrier_spacing > 0 and math.isfinite(self.subcarrier_spacing)):
            raise ConfigError(
                "subcarrier_spacing", f"must be > 0, got {self.subcarrier_spacing!r}"
            )
        if not self.carrier_freq > 0:
            raise ConfigError("carrier_freq", f"must be > 0, got {self.carrier_freq!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class MultipathProfile:
    """Tap delays, power-delay-profile weights and per-antenna tap gains.

    ``delays`` and ``weights`` are shared by all users (the delay grid is
    deterministic); ``gains`` has shape (K, P, Nt).
    """

    delays: np.ndarray  # (P,) seconds, ascending, delays[0] == 0
    weights: np.ndarray  # (P,) expected tap powers, sum to 1
    gains: np.ndarray  # (K, P, Nt) complex

    @property
    def num_paths(self) -> int:
        return int(self.delays.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.gains.shape[0])

    def rms_delay_spread(self) -> float:
        """RMS delay spread of the power-delay-profile weights."""
        mean = float(np.sum(self.weights * self.delays))
        second = float(np.sum(self.weights * self.delays**2))
        return math.sqrt(max(second - mean * mean, 0.0))


@dataclass(frozen=True)
class RBChannelSet:
    """Frequency-domain channel, one vector per RB and user.

    ``H[g, k]`` is the length-Nt response seen by user ``k`` on RB ``g``.
    """

    H: np.ndarray  # (G, K, Nt) complex128
    config: ChannelConfig

    @property
    def num_rbs(self) -> int:
        return int(self.H.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.H.shape[1])

    @property
    def num_tx_antennas(self) -> int:
        return int(self.H.shape[2])
