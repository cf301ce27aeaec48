"""Codec facade: training, stage selection, compression and decompression.

Composes the transform, quantizer and entropy services. Compression codes
every trained stage so the per-stage rates are known, then keeps the
prefix of stages that fits the fronthaul budget.
"""

import logging
import math
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from ..domain import (
    BITSTREAM_HEADER_BYTES,
    STAGE_POLICIES,
    Bitstream,
    CodebookMismatchError,
    CodecArtifacts,
    CodecConfig,
    ConfigError,
    IndexStream,
    InputError,
    Latent,
    PrecodingTensor,
    RateReport,
    StageSelection,
)
from .entropy_service import EntropyService
from .quantizer_service import QuantizerService
from .transform_service import TransformService

logger = logging.getLogger(__name__)


def header_bits(active_stages: int) -> int:
    return 8 * (BITSTREAM_HEADER_BYTES + 4 * active_stages)


def select_stages(per_stage_rates: Sequence[float], budget: float) -> StageSelection:
    """Largest prefix whose cumulative rate fits the budget.

    Args:
        per_stage_rates: Rate of each stage in bits/token, in stage order.
        budget: Fronthaul budget in bits/token; ``math.inf`` for unlimited.

    Returns:
        StageSelection; ``count == 0`` with ``infeasible`` set when even the
        base stage exceeds the budget.

    Raises:
        InputError: If a rate is negative or the budget is negative/NaN.
    """
    if any(not r >= 0 for r in per_stage_rates):
        raise InputError("stage rates must be non-negative")
    if not budget >= 0:
        raise InputError(f"budget must be non-negative, got {budget}")
    count = 0
    spent = 0.0
    for rate in per_stage_rates:
        if spent + rate > budget:
            break
        spent += rate
        count += 1
    infeasible = bool(per_stage_rates) and count == 0
    return StageSelection(count=count, infeasible=infeasible)


def choose_stages_rd(
    distortions: Sequence[float],
    cumulative_rates: Sequence[float],
    rate_weight: float,
    budget: float,
) -> StageSelection:
    """Prefix length minimizing ``D(n) + lambda * R(n)`` within the budget.

    ``distortions[n-1]`` and ``cumulative_rates[n-1]`` describe the first
    ``n`` stages. Ties go to the shorter prefix.

    Raises:
        InputError: If the sequences differ in length.
    """
    if len(distortions) != len(cumulative_rates):
        raise InputError(
            f"{len(distortions)} distortions for {len(cumulative_rates)} cumulative rates"
        )
    best = 0
    best_cost = math.inf
    for n, (dist, rate) in enumerate(zip(distortions, cumulative_rates), start=1):
        if rate > budget:
            break
        cost = dist + rate_weight * rate
        if cost < best_cost:
            best, best_cost = n, cost
    return StageSelection(count=best, infeasible=bool(distortions) and best == 0)


class CodecService:
    """End-to-end learned transform + residual VQ + entropy codec."""

    def __init__(
        self,
        transform_service: TransformService,
        quantizer_service: QuantizerService,
        entropy_service: EntropyService,
    ) -> None:
        """Initialize with the three codec stages.

        Args:
            transform_service: Analysis/synthesis transform.
            quantizer_service: Residual vector quantizer.
            entropy_service: Entropy model and arithmetic coder.
        """
        self._transform = transform_service
        self._quantizer = quantizer_service
        self._entropy = entropy_service

    def train(
        self, tensors: Sequence[PrecodingTensor], cfg: CodecConfig, seed: int
    ) -> CodecArtifacts:
        """Fit transform, then codebooks, then the entropy model.

        Args:
            tensors: Training tensors (train split only).
            cfg: Codec configuration.
            seed: Seed for codebook initialization.

        Returns:
            The trained CodecArtifacts.

        Raises:
            ConfigError: If the training set cannot support the config.
        """
        if not tensors:
            raise ConfigError("training_set", "no training tensors")
        cfg.validate(tensors[0].num_tx_antennas)

        transform = self._transform.fit_transform(tensors, cfg.latent_dim)
        latents = [self._transform.analyze(t, transform) for t in tensors]
        stack = self._quantizer.train_codebooks(latents, cfg.codebook_sizes, cfg.lbg_iters, seed)
        for l in stack.shrunk_stages:
            logger.warning(
                "stage %d trained %d of %d requested codewords",
                l,
                stack.sizes[l],
                stack.requested_sizes[l],
            )
        streams = [self._quantizer.quantize(z, stack, stack.num_stages)[0] for z in latents]
        model = self._entropy.fit_entropy_model(streams, cfg.entropy_order)
        artifacts = CodecArtifacts(transform=transform, codebooks=stack, entropy_model=model)

        for n in range(1, stack.num_stages + 1):
            err = np.mean([self._tensor_error(t, artifacts, n) for t in tensors])
            logger.info("train split, %d stage(s): MSE %.4e", n, err)
        logger.info("codec trained, fingerprint %016x", stack.fingerprint)
        return artifacts

    def _tensor_error(self, tensor: PrecodingTensor, artifacts: CodecArtifacts, stages: int) -> float:
        diff = self.reconstruct(tensor, artifacts, stages).data - tensor.data
        return float(np.mean(diff**2))

    def quantize_latent(
        self, tensor: PrecodingTensor, artifacts: CodecArtifacts, stages: int
    ) -> tuple[Latent, IndexStream, Latent]:
        """Analyze and quantize, returning (z, indices, z_hat).

        With ``stages == 0`` the index stream is empty and ``z_hat`` is zero.
        """
        z = self._transform.analyze(tensor, artifacts.transform)
        if stages == 0:
            empty = IndexStream(indices=np.zeros((0, z.num_tokens), dtype=np.int64), alphabet_sizes=())
            return z, empty, Latent(z=np.zeros_like(z.z))
        indices, z_hat = self._quantizer.quantize(z, artifacts.codebooks, stages)
        return z, indices, z_hat

    def reconstruct(self, tensor: PrecodingTensor, artifacts: CodecArtifacts, stages: int) -> PrecodingTensor:
        """synthesize(quantize(analyze(x))) without entropy coding."""
        _, _, z_hat = self.quantize_latent(tensor, artifacts, stages)
        return self._transform.synthesize(z_hat, artifacts.transform, tensor.num_rbs, tensor.num_users)

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
        """Analyze, quantize and entropy-code one tensor.

        Args:
            tensor: Precoding tensor to compress.
            artifacts: Trained codec.
            budget: Fronthaul budget in bits/token.
            stage_policy: ``prefix`` (largest fitting prefix) or ``rd``
                (rate-weighted choice among fitting prefixes).
            rate_weight: Lambda for the ``rd`` policy.
            active_stages: Force this many stages, ignoring the budget.

        Returns:
            (bitstream with the selected stages, rate report over all stages).
            When the budget is infeasible the bitstream carries no stages.

        Raises:
            InputError: On shape mismatch or an out-of-range active_stages.
            ConfigError: On an unknown stage policy.
        """
        if stage_policy not in STAGE_POLICIES:
            raise ConfigError("stage_policy", f"must be one of {', '.join(STAGE_POLICIES)}")
        stack = artifacts.codebooks
        model = artifacts.entropy_model
        if active_stages is not None and not 0 <= active_stages <= stack.num_stages:
            raise InputError(f"active_stages must be in [0, {stack.num_stages}], got {active_stages}")

        _, indices, _ = self.quantize_latent(tensor, artifacts, stack.num_stages)
        full = self._entropy.encode(
            indices,
            model,
            num_rbs=tensor.num_rbs,
            num_users=tensor.num_users,
            num_tx_antennas=tensor.num_tx_antennas,
            latent_dim=artifacts.transform.latent_dim,
            fingerprint=artifacts.fingerprint,
        )
        tokens = indices.num_tokens
        stage_bits = [8 * len(p) for p in full.payloads]
        rates = [b / tokens for b in stage_bits]

        if active_stages is not None:
            selection = StageSelection(count=active_stages)
        elif stage_policy == "rd":
            distortions = [self._tensor_error(tensor, artifacts, n) for n in range(1, stack.num_stages + 1)]
            selection = choose_stages_rd(distortions, list(np.cumsum(rates)), rate_weight, budget)
        else:
            selection = select_stages(rates, budget)

        n = selection.count
        header = replace(full.header, payload_lengths=full.header.payload_lengths[:n])
        bitstream = Bitstream(header=header, payloads=full.payloads[:n])
        report = RateReport(
            tokens=tokens,
            stage_bits=stage_bits,
            active_stages=n,
            model_entropy_bits=[
                self._entropy.stage_entropy_bits(model.stages[l], indices.stage(l))
                for l in range(stack.num_stages)
            ],
            alphabet_sizes=list(stack.sizes),
            header_bits=header_bits(n),
            infeasible=selection.infeasible,
        )
        logger.debug(
            "compressed %d tokens: stage rates %s, %d active, %.3f bits/token",
            tokens,
            [round(r, 3) for r in rates],
            n,
            report.rate_total,
        )
        return bitstream, report

    def decompress(self, bitstream: Bitstream, artifacts: CodecArtifacts) -> PrecodingTensor:
        """Decode, dequantize and synthesize.

        Raises:
            CodebookMismatchError: If the bitstream was made with other
                artifacts.
            CorruptStreamError: If a payload fails its integrity checks or decodes
                to invalid indices.
        """
        header = bitstream.header
        transform = artifacts.transform
        if header.latent_dim != transform.latent_dim or header.num_tx_antennas != transform.num_tx_antennas:
            raise CodebookMismatchError(
                f"bitstream is d={header.latent_dim}, Nt={header.num_tx_antennas}; artifacts are "
                f"d={transform.latent_dim}, Nt={transform.num_tx_antennas}"
            )
        indices = self._entropy.decode(bitstream, artifacts.entropy_model, artifacts.fingerprint)
        if indices.active_stages == 0:
            z_hat = Latent(z=np.zeros((header.num_rows, transform.latent_dim)))
        else:
            z_hat = self._quantizer.dequantize(indices, artifacts.codebooks)
        return self._transform.synthesize(z_hat, transform, header.num_rbs, header.num_users)
