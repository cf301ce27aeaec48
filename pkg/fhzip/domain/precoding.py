"""Domain models for RB-granularity downlink precoding."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InputError


@dataclass(frozen=True)
class PrecoderConfig:
    """WMMSE precoder parameters.

    ``rb_weights`` is an optional per-RB multiplier applied when averaging
    rates across RBs; ``None`` means uniform weights.
    """

    total_power: float = 1.0  # W per RB
    noise_power: float = 1e-2  # W
    max_iters: int = 100
    convergence_tol: float = 1e-8  # relative sum-rate change
    rb_weights: Optional[tuple[float, ...]] = None

    def validate(self) -> None:
        """Check field ranges.

        Raises:
            ConfigError: Naming the first offending field.
        """
        if not (self.total_power > 0 and math.isfinite(self.total_power)):
            raise ConfigError("total_power", f"must be > 0, got {self.total_power!r}")
        if not (self.noise_power > 0 and math.isfinite(self.noise_power)):
            raise ConfigError("noise_power", f"must be > 0, got {self.noise_power!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise ConfigError("max_iters", f"must be >= 1, got {self.max_iters!r}")
        if not self.convergence_tol > 0:
            raise ConfigError("convergence_tol", f"must be > 0, got {self.convergence_tol!r}")
        if self.rb_weights is not None and any(w < 0 for w in self.rb_weights):
            raise ConfigError("rb_weights", "weights must be non-negative")


@dataclass(frozen=True)
class RBPrecoding:
    """Result of WMMSE on a single RB."""

    V: np.ndarray  # (K, Nt) complex, row k is v_k
    iterations: int
    sum_rate: float  # bits/s/Hz on this RB
    mu: float  # final Lagrange multiplier
    rate_history: list[float] = field(default_factory=list)  # includes the initial point


@dataclass(frozen=True)
class PrecodingSet:
    """Precoders for every RB and user."""

    V: np.ndarray  # (G, K, Nt) complex128
    iterations_used: int
    final_sum_rate: float  # bits/s/Hz, per-RB average


@dataclass(frozen=True)
class PrecodingTensor:
    """Real-valued stacking of RB-wise precoders.

    Row ``g * K + k`` holds ``[Re(v_{g,k}), Im(v_{g,k})]`` so ``D = G * K``
    and the width is ``2 * Nt``.
    """

    data: np.ndarray  # (D, 2*Nt) float64
    num_rbs: int
    num_users: int

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[1] % 2:
            raise InputError(f"tensor must be D x 2Nt, got shape {self.data.shape}")
        if self.data.shape[0] != self.num_rbs * self.num_users:
            raise InputError(
                f"tensor has {self.data.shape[0]} rows, expected "
                f"{self.num_rbs} RBs x {self.num_users} users"
            )

    @property
    def num_rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def num_tx_antennas(self) -> int:
        return int(self.data.shape[1] // 2)

    @classmethod
    def from_precoders(cls, V: np.ndarray) -> "PrecodingTensor":
        """Stack complex precoders of shape (G, K, Nt)."""
        if V.ndim != 3:
            raise InputError(f"precoders must be G x K x Nt, got shape {V.shape}")
        G, K, Nt = V.shape
        rows = V.reshape(G * K, Nt)
        data = np.concatenate([rows.real, rows.imag], axis=1).astype(np.float64)
        return cls(data=data, num_rbs=G, num_users=K)

    def to_precoders(self) -> np.ndarray:
        """Undo the stacking, returning complex precoders (G, K, Nt)."""
        Nt = self.num_tx_antennas
        rows = self.data[:, :Nt] + 1j * self.data[:, Nt:]
        return rows.reshape(self.num_rbs, self.num_users, Nt)
