"""Pipeline facade for the command-line workflow.

Each public method is one CLI command: it loads its inputs through the
container repository, delegates to the domain services and persists the
result. Everything is deterministic given the configured seed.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..domain import (
    BudgetInfeasibleError,
    CodecArtifacts,
    EvalReport,
    InputError,
    PrecodingDataset,
    PrecodingSample,
    PrecodingTensor,
    RateReport,
    RunConfig,
)
from ..repositories import ContainerRepository, FileRepository
from .channel_service import ChannelService
from .codec_service import CodecService
from .metrics_service import MetricsService
from .precoder_service import PrecoderService

logger = logging.getLogger(__name__)

SPLITS = ("train", "test", "all")


def sample_seeds(seed: int, count: int) -> list[int]:
    """Independent 64-bit channel seeds for ``count`` samples."""
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def split_indices(num_samples: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, exhaustive (train, test) index arrays, each sorted.

    Both parts are non-empty whenever ``num_samples >= 2``.
    """
    n_train = min(num_samples - 1, max(1, round(train_fraction * num_samples)))
    order = np.random.default_rng(np.random.SeedSequence([seed, num_samples])).permutation(num_samples)
    return np.sort(order[:n_train]), np.sort(order[n_train:])


class PipelineService:
    """Facade over generation, training, coding and evaluation."""

    def __init__(
        self,
        channel_service: ChannelService,
        precoder_service: PrecoderService,
        codec_service: CodecService,
        metrics_service: MetricsService,
        container_repository: ContainerRepository,
        file_repository: FileRepository,
    ) -> None:
        self._channels = channel_service
        self._precoder = precoder_service
        self._codec = codec_service
        self._metrics = metrics_service
        self._containers = container_repository
        self._files = file_repository

    # ---- data -------------------------------------------------------------

    def generate_dataset(self, cfg: RunConfig) -> PrecodingDataset:
        """Draw channels and WMMSE precoders for every sample."""
        cfg.validate()
        count = cfg.dataset.num_samples
        samples = []
        for i, seed in enumerate(sample_seeds(cfg.dataset.seed, count)):
            channel = self._channels.generate(replace(cfg.channel, seed=seed))
            precoding = self._precoder.precode(channel, cfg.precoder)
            samples.append(
                PrecodingSample(
                    seed=seed,
                    channel=channel,
                    tensor=PrecodingTensor.from_precoders(precoding.V),
                    sum_rate=precoding.final_sum_rate,
                )
            )
            logger.debug(
                "sample %d/%d: %.4f b/s/Hz, %d iterations",
                i + 1,
                count,
                precoding.final_sum_rate,
                precoding.iterations_used,
            )
        logger.info("generated %d samples", count)
        return PrecodingDataset(
            channel_config=replace(cfg.channel, seed=cfg.dataset.seed),
            precoder_config=cfg.precoder,
            samples=samples,
        )

    def gen_data(self, cfg: RunConfig, output: Path) -> PrecodingDataset:
        """Generate a dataset and write it as FHD1."""
        dataset = self.generate_dataset(cfg)
        self._containers.save_dataset(output, dataset)
        logger.info("wrote %s", output)
        return dataset

    def select_split(self, dataset: PrecodingDataset, train_fraction: float, split: str) -> PrecodingDataset:
        """The train, test or full part of a dataset.

        Raises:
            InputError: On an unknown split name.
        """
        if split not in SPLITS:
            raise InputError(f"split must be one of {', '.join(SPLITS)}, got {split!r}")
        if split == "all":
            return dataset
        train, test = split_indices(len(dataset), train_fraction, dataset.channel_config.seed)
        return dataset.subset(train if split == "train" else test)

    # ---- codec ------------------------------------------------------------

    def train(self, cfg: RunConfig, dataset_path: Path, artifacts_path: Path) -> CodecArtifacts:
        """Fit the codec on the train split and write FHM1 artifacts."""
        dataset = self._containers.load_dataset(dataset_path)
        train = self.select_split(dataset, cfg.dataset.train_fraction, "train")
        logger.info("training on %d of %d samples", len(train), len(dataset))
        artifacts = self._codec.train(
            [s.tensor for s in train.samples], cfg.codec, dataset.channel_config.seed
        )
        self._containers.save_artifacts(artifacts_path, artifacts)
        return artifacts

    def compress(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        input_path: Path,
        output_path: Path,
        sample: Optional[int] = None,
        active_stages: Optional[int] = None,
    ) -> RateReport:
        """Compress a tensor (or one dataset sample) into an FHZ1 file.

        Raises:
            BudgetInfeasibleError: If the base stage alone exceeds the
                budget; nothing is written.
        """
        artifacts = self._containers.load_artifacts(artifacts_path)
        tensor = self._containers.load_tensor(input_path, sample)
        bitstream, report = self._codec.compress(
            tensor,
            artifacts,
            cfg.codec.budget,
            stage_policy=cfg.codec.stage_policy,
            rate_weight=cfg.codec.rate_weight,
            active_stages=active_stages,
        )
        if report.infeasible:
            raise BudgetInfeasibleError(
                f"budget {cfg.codec.budget:g} bits/token is below the base stage rate "
                f"{report.stage_rates[0]:.3f} bits/token"
            )
        self._containers.save_bitstream(output_path, bitstream)
        logger.info("wrote %s: %d stage(s), %d bits", output_path, report.active_stages, report.total_bits)
        return report

    def decompress(self, artifacts_path: Path, bitstream_path: Path, output_path: Path) -> PrecodingTensor:
        """Reconstruct an FHZ1 file into an FHT1 tensor."""
        artifacts = self._containers.load_artifacts(artifacts_path)
        bitstream = self._containers.load_bitstream(bitstream_path)
        tensor = self._codec.decompress(bitstream, artifacts)
        self._containers.save_tensor(output_path, tensor)
        return tensor

    # ---- evaluation -------------------------------------------------------

    def evaluate(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        dataset_path: Path,
        csv_path: Optional[Path] = None,
        split: str = "test",
        stages: Optional[int] = None,
    ) -> EvalReport:
        """Evaluate at the budget-selected (or given) stage count."""
        artifacts = self._containers.load_artifacts(artifacts_path)
        dataset = self._containers.load_dataset(dataset_path)
        part = self.select_split(dataset, cfg.dataset.train_fraction, split)
        report = self._metrics.evaluate(
            part.samples, artifacts, cfg.codec, dataset.precoder_config, stages
        )
        if csv_path is not None:
            self._files.write_text(csv_path, self._metrics.to_csv([report]))
        return report

    def sweep(
        self,
        cfg: RunConfig,
        artifacts_path: Path,
        dataset_path: Path,
        csv_path: Optional[Path] = None,
        split: str = "test",
    ) -> list[EvalReport]:
        """Rate-distortion sweep over 1..L stages."""
        artifacts = self._containers.load_artifacts(artifacts_path)
        dataset = self._containers.load_dataset(dataset_path)
        part = self.select_split(dataset, cfg.dataset.train_fraction, split)
        reports = self._metrics.rd_sweep(part.samples, artifacts, cfg.codec, dataset.precoder_config)
        if csv_path is not None:
            self._files.write_text(csv_path, self._metrics.to_csv(reports))
        return reports
