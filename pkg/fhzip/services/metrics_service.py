"""Distortion, rate and system-level evaluation of the codec.

Distortion metrics work on any pair of equally shaped real or complex
arrays. ``evaluate`` and ``rd_sweep`` aggregate over a set of samples:
MSE and L_VQ are per-sample means, NMSE and the sum-rate loss are ratios
of sums.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..domain import (
    CSV_HEADER,
    CodecArtifacts,
    CodecConfig,
    EvalReport,
    InputError,
    PrecoderConfig,
    PrecodingSample,
    PrecodingTensor,
    RateReport,
    UndefinedMetricError,
)
from .codec_service import CodecService, choose_stages_rd, header_bits, select_stages
from .precoder_service import PrecoderService, user_sinr

logger = logging.getLogger(__name__)

RAW_BITS_PER_VALUE = 32  # float32 fronthaul reference


def _as_array(value: PrecodingTensor | np.ndarray) -> np.ndarray:
    return value.data if isinstance(value, PrecodingTensor) else np.asarray(value)


def _check_shapes(V: np.ndarray, V_hat: np.ndarray) -> None:
    if V.shape != V_hat.shape:
        raise InputError(f"shape mismatch: {V.shape} vs {V_hat.shape}")


def project_power(V: np.ndarray, total_power: float) -> np.ndarray:
    """Scale down every RB of V (G, K, Nt) whose power exceeds total_power."""
    power = np.sum(np.abs(V) ** 2, axis=(1, 2))
    scale = np.ones_like(power)
    over = power > total_power
    scale[over] = np.sqrt(total_power / power[over])
    return V * scale[:, None, None]


@dataclass
class _SampleCodes:
    """Coded rates and reconstructions of one sample for every stage count."""

    sample: PrecodingSample
    report: RateReport
    reconstructions: list[PrecodingTensor]  # index n: n stages
    vq_errors: list[float]  # index n: mean ||z - z_hat||^2 with n stages


class MetricsService:
    """Distortion metrics, RD objective, sum-rate loss and sweeps."""

    def __init__(self, precoder_service: PrecoderService, codec_service: CodecService) -> None:
        self._precoder = precoder_service
        self._codec = codec_service

    # ---- distortion -------------------------------------------------------

    def mse(self, V: PrecodingTensor | np.ndarray, V_hat: PrecodingTensor | np.ndarray) -> float:
        """||V_hat - V||_F^2 / (M N).

        Raises:
            InputError: If the shapes differ.
        """
        a, b = _as_array(V), _as_array(V_hat)
        _check_shapes(a, b)
        if a.size == 0:
            raise InputError("empty matrices")
        return float(np.sum(np.abs(b - a) ** 2) / a.size)

    def nmse(self, V: PrecodingTensor | np.ndarray, V_hat: PrecodingTensor | np.ndarray) -> float:
        """||V_hat - V||_F^2 / ||V||_F^2.

        Raises:
            InputError: If the shapes differ.
            UndefinedMetricError: If V is all zero.
        """
        a, b = _as_array(V), _as_array(V_hat)
        _check_shapes(a, b)
        ref = float(np.sum(np.abs(a) ** 2))
        if ref == 0.0:
            raise UndefinedMetricError("NMSE undefined for a zero reference")
        return float(np.sum(np.abs(b - a) ** 2) / ref)

    def evm(self, V: PrecodingTensor | np.ndarray, V_hat: PrecodingTensor | np.ndarray) -> float:
        """Error vector magnitude in percent, 100 * sqrt(NMSE)."""
        return 100.0 * math.sqrt(self.nmse(V, V_hat))

    def rd_objective(
        self, mse: float, rate: float, l_vq: float, rate_weight: float, commitment_weight: float
    ) -> float:
        """mse + lambda * rate + gamma * l_vq.

        Raises:
            InputError: If any input is negative.
        """
        terms = {
            "mse": mse,
            "rate": rate,
            "l_vq": l_vq,
            "rate_weight": rate_weight,
            "commitment_weight": commitment_weight,
        }
        for name, value in terms.items():
            if not value >= 0:
                raise InputError(f"{name} must be non-negative, got {value}")
        return mse + rate_weight * rate + commitment_weight * l_vq

    # ---- system level -----------------------------------------------------

    def delta_rate(
        self,
        H: np.ndarray,
        V_ref: np.ndarray,
        V_hat: np.ndarray,
        noise_power: float,
        rb_weights: Optional[tuple[float, ...]] = None,
    ) -> float:
        """Fractional sum-rate loss of V_hat relative to V_ref.

        Raises:
            InputError: If shapes differ.
            UndefinedMetricError: If the reference sum rate is zero.
        """
        ref = self._precoder.sum_rate(H, V_ref, noise_power, rb_weights)
        if ref <= 0.0:
            raise UndefinedMetricError("sum-rate loss undefined for a zero reference rate")
        return (ref - self._precoder.sum_rate(H, V_hat, noise_power, rb_weights)) / ref

    def sinr_delta_db(
        self, H: np.ndarray, V_ref: np.ndarray, V_hat: np.ndarray, noise_power: float
    ) -> float:
        """Worst per-user loss of RB-averaged SINR in dB.

        Users without reference signal are skipped; 0 if none remain.
        """
        ref = user_sinr(H, V_ref, noise_power).mean(axis=0)
        got = user_sinr(H, V_hat, noise_power).mean(axis=0)
        served = ref > 0
        if not served.any():
            return 0.0
        with np.errstate(divide="ignore"):
            loss = 10.0 * np.log10(ref[served] / got[served])
        return float(np.max(loss))

    # ---- aggregate evaluation -------------------------------------------

    def code_samples(
        self, samples: Sequence[PrecodingSample], artifacts: CodecArtifacts
    ) -> list[_SampleCodes]:
        """Compress every sample once and reconstruct it at 0..L stages."""
        if not samples:
            raise InputError("no samples to evaluate")
        num_stages = artifacts.codebooks.num_stages
        coded = []
        for sample in samples:
            tensor = sample.tensor
            _, report = self._codec.compress(tensor, artifacts, active_stages=num_stages)
            recons, errors = [], []
            for n in range(num_stages + 1):
                z, _, z_hat = self._codec.quantize_latent(tensor, artifacts, n)
                errors.append(float(np.mean(np.sum((z.z - z_hat.z) ** 2, axis=1))))
                recons.append(self._codec.reconstruct(tensor, artifacts, n))
            coded.append(_SampleCodes(sample, report, recons, errors))
        return coded

    def evaluate_stages(
        self,
        coded: Sequence[_SampleCodes],
        stages: int,
        codec_cfg: CodecConfig,
        precoder_cfg: PrecoderConfig,
    ) -> EvalReport:
        """EvalReport for a fixed number of active stages."""
        mses: list[float] = []
        vq: list[float] = []
        rates: list[float] = []
        nums = dens = 0.0
        ref_rate = hat_rate = 0.0
        raw_bits = coded_bits = 0
        H_all, V_all, V_hat_all = [], [], []
        for entry in coded:
            sample = entry.sample
            V_t = sample.tensor
            V_hat_t = entry.reconstructions[stages]
            mses.append(self.mse(V_t, V_hat_t))
            nums += float(np.sum((V_hat_t.data - V_t.data) ** 2))
            dens += float(np.sum(V_t.data**2))
            vq.append(entry.vq_errors[stages])
            bits = sum(entry.report.stage_bits[:stages])
            rates.append(bits / entry.report.tokens)
            raw_bits += V_t.data.size * RAW_BITS_PER_VALUE
            coded_bits += bits + header_bits(stages)

            H = sample.channel.H
            V = V_t.to_precoders()
            V_hat = V_hat_t.to_precoders()
            if codec_cfg.project_power:
                V_hat = project_power(V_hat, precoder_cfg.total_power)
            ref_rate += self._precoder.sum_rate(H, V, precoder_cfg.noise_power, precoder_cfg.rb_weights)
            hat_rate += self._precoder.sum_rate(H, V_hat, precoder_cfg.noise_power, precoder_cfg.rb_weights)
            H_all.append(H)
            V_all.append(V)
            V_hat_all.append(V_hat)

        if dens == 0.0:
            raise UndefinedMetricError("NMSE undefined for an all-zero dataset")
        if ref_rate <= 0.0:
            raise UndefinedMetricError("sum-rate loss undefined for a zero reference rate")
        mse = float(np.mean(mses))
        nmse = nums / dens
        rate = float(np.mean(rates))
        l_vq = float(np.mean(vq))
        n = len(coded)
        return EvalReport(
            stages=stages,
            mse=mse,
            nmse=nmse,
            nmse_db=10.0 * math.log10(nmse) if nmse > 0 else -math.inf,
            evm_percent=100.0 * math.sqrt(nmse),
            rate_bits_per_token=rate,
            l_vq=l_vq,
            objective=self.rd_objective(
                mse, rate, l_vq, codec_cfg.rate_weight, codec_cfg.commitment_weight
            ),
            sum_rate_ref=ref_rate / n,
            sum_rate_compressed=hat_rate / n,
            delta_rate_fraction=(ref_rate - hat_rate) / ref_rate,
            sinr_delta_db=self.sinr_delta_db(
                np.concatenate(H_all),
                np.concatenate(V_all),
                np.concatenate(V_hat_all),
                precoder_cfg.noise_power,
            ),
            compression_ratio=raw_bits / coded_bits,
        )

    def select_eval_stages(self, coded: Sequence[_SampleCodes], codec_cfg: CodecConfig) -> int:
        """Stage count chosen from the dataset-mean per-stage rates.

        An infeasible budget yields 0 stages (mean-only reconstruction).
        """
        stage_rates = np.mean([entry.report.stage_rates for entry in coded], axis=0)
        if codec_cfg.stage_policy == "rd":
            num_stages = len(stage_rates)
            distortions = [
                float(np.mean([self.mse(e.sample.tensor, e.reconstructions[n]) for e in coded]))
                for n in range(1, num_stages + 1)
            ]
            selection = choose_stages_rd(
                distortions, list(np.cumsum(stage_rates)), codec_cfg.rate_weight, codec_cfg.budget
            )
        else:
            selection = select_stages(list(stage_rates), codec_cfg.budget)
        if selection.infeasible:
            logger.warning(
                "budget %.3f bits/token is below the base stage rate %.3f; evaluating mean-only",
                codec_cfg.budget,
                stage_rates[0],
            )
        return selection.count

    def evaluate(
        self,
        samples: Sequence[PrecodingSample],
        artifacts: CodecArtifacts,
        codec_cfg: CodecConfig,
        precoder_cfg: PrecoderConfig,
        stages: Optional[int] = None,
    ) -> EvalReport:
        """Evaluate at ``stages`` or at the budget-selected stage count."""
        coded = self.code_samples(samples, artifacts)
        if stages is None:
            stages = self.select_eval_stages(coded, codec_cfg)
        elif not 0 <= stages <= artifacts.codebooks.num_stages:
            raise InputError(f"stages must be in [0, {artifacts.codebooks.num_stages}], got {stages}")
        report = self.evaluate_stages(coded, stages, codec_cfg, precoder_cfg)
        logger.info(
            "eval: %d stage(s), %.3f bits/token, NMSE %.2f dB, dR %.4f",
            report.stages,
            report.rate_bits_per_token,
            report.nmse_db,
            report.delta_rate_fraction,
        )
        return report

    def rd_sweep(
        self,
        samples: Sequence[PrecodingSample],
        artifacts: CodecArtifacts,
        codec_cfg: CodecConfig,
        precoder_cfg: PrecoderConfig,
    ) -> list[EvalReport]:
        """One EvalReport per stage count 1..L, ordered by stage count."""
        coded = self.code_samples(samples, artifacts)
        return [
            self.evaluate_stages(coded, n, codec_cfg, precoder_cfg)
            for n in range(1, artifacts.codebooks.num_stages + 1)
        ]

    def to_csv(self, reports: Sequence[EvalReport]) -> str:
        """CSV text with the fixed header, ``%.10e`` values and LF endings."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for report in reports:
            writer.writerow(report.csv_row())
        return buffer.getvalue()
