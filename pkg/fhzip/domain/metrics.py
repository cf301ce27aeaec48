"""Domain models for evaluation results."""

from dataclasses import dataclass

RATE_LOSS_TARGET = 0.03  # fraction of reference sum rate
SINR_LOSS_TARGET_DB = 0.5


@dataclass(frozen=True)
class EvalReport:
    """Distortion, rate, objective and system-level figures for one setting."""

    stages: int
    mse: float
    nmse: float
    nmse_db: float
    evm_percent: float
    rate_bits_per_token: float
    l_vq: float
    objective: float
    sum_rate_ref: float
    sum_rate_compressed: float
    delta_rate_fraction: float
    sinr_delta_db: float = 0.0  # worst per-user SINR loss
    compression_ratio: float = 0.0

    @property
    def meets_rate_target(self) -> bool:
        return self.delta_rate_fraction <= RATE_LOSS_TARGET

    @property
    def meets_sinr_target(self) -> bool:
        return self.sinr_delta_db <= SINR_LOSS_TARGET_DB

    def csv_row(self) -> list[str]:
        """Values in ``CSV_HEADER`` order."""
        return [str(self.stages)] + [
            f"{v:.10e}"
            for v in (
                self.rate_bits_per_token,
                self.mse,
                self.nmse_db,
                self.evm_percent,
                self.delta_rate_fraction,
                self.objective,
            )
        ]


CSV_HEADER = (
    "stages",
    "rate_bits_per_token",
    "mse",
    "nmse_db",
    "evm_pct",
    "delta_rate",
    "objective",
)
