"""Tests for stage selection and the end-to-end codec."""

import hashlib
import math

import numpy as np
import pytest

from fhzip.domain import (
    ChannelConfig,
    CodebookMismatchError,
    CodecConfig,
    ConfigError,
    InputError,
    PrecoderConfig,
    PrecodingTensor,
)
from fhzip.repositories.containers import pack_bitstream
from fhzip.services import (
    ChannelService,
    CodecService,
    EntropyService,
    PrecoderService,
    QuantizerService,
    TransformService,
    choose_stages_rd,
    select_stages,
)
from fhzip.services.codec_service import header_bits


def make_tensors(count: int, seed: int = 0) -> list[PrecodingTensor]:
    """WMMSE tensors for a 4-antenna, 2-user, 4-RB system."""
    channels = ChannelService()
    precoder = PrecoderService()
    cfg = PrecoderConfig()
    out = []
    for i in range(count):
        channel = channels.generate(
            ChannelConfig(num_tx_antennas=4, num_users=2, num_rbs=4, num_paths=4, seed=seed + i)
        )
        out.append(precoder.generate_precoding_tensor(channel, cfg))
    return out


@pytest.fixture(scope="module")
def codec() -> CodecService:
    """A codec wired with the real stage services."""
    return CodecService(TransformService(), QuantizerService(), EntropyService())


@pytest.fixture(scope="module")
def codec_config() -> CodecConfig:
    """Three small stages over a 4-dimensional latent."""
    return CodecConfig(latent_dim=4, codebook_sizes=(8, 8, 4), lbg_iters=20, entropy_order=1)


@pytest.fixture(scope="module")
def tensors() -> list[PrecodingTensor]:
    """Ten precoding tensors; the first eight train the codec."""
    return make_tensors(10)


@pytest.fixture(scope="module")
def artifacts(codec, codec_config, tensors):
    """Codec artifacts trained on the first eight tensors."""
    return codec.train(tensors[:8], codec_config, seed=5)


class TestSelectStages:
    """Tests for budgeted prefix selection."""

    def test_budget_between_stages(self):
        """Rates [3, 2, 2] under budget 5 activate two stages."""
        selection = select_stages([3, 2, 2], 5)

        assert selection.count == 2
        assert not selection.infeasible

    def test_budget_below_base_stage(self):
        """Budget 2.9 cannot carry the 3-bit base stage."""
        selection = select_stages([3, 2, 2], 2.9)

        assert selection.count == 0
        assert selection.infeasible

    def test_unlimited_budget(self):
        """An infinite budget activates every stage."""
        assert select_stages([3, 2, 2], math.inf).count == 3

    def test_exact_fit(self):
        """A budget equal to the cumulative rate is feasible."""
        assert select_stages([3, 2, 2], 7).count == 3

    def test_no_stages(self):
        """No rates means nothing to select and nothing infeasible."""
        selection = select_stages([], 1.0)

        assert selection.count == 0
        assert not selection.infeasible

    def test_random_budgets_respected(self):
        """The selected prefix never exceeds the budget."""
        rng = np.random.default_rng(0)
        for _ in range(200):
            rates = rng.uniform(0, 4, size=int(rng.integers(1, 6)))
            budget = float(rng.uniform(0, 12))
            selection = select_stages(list(rates), budget)

            assert rates[: selection.count].sum() <= budget
            if selection.count < len(rates):
                assert rates[: selection.count + 1].sum() > budget

    def test_negative_budget(self):
        """Budgets must be non-negative."""
        with pytest.raises(InputError):
            select_stages([1.0], -1.0)


class TestChooseStagesRd:
    """Tests for rate-weighted stage selection."""

    def test_minimizes_objective(self):
        """Costs 1.1, 0.7, 0.75 select two stages."""
        selection = choose_stages_rd([1.0, 0.5, 0.45], [1, 2, 3], 0.1, math.inf)

        assert selection.count == 2

    def test_zero_weight_prefers_lowest_distortion(self):
        """Without a rate penalty the least distortion wins."""
        assert choose_stages_rd([1.0, 0.5, 0.45], [1, 2, 3], 0.0, math.inf).count == 3

    def test_tie_goes_to_shorter_prefix(self):
        """Equal costs keep the shorter prefix."""
        assert choose_stages_rd([1.0, 0.75], [1, 2], 0.25, math.inf).count == 1

    def test_budget_limits_choice(self):
        """Prefixes over budget are not considered."""
        assert choose_stages_rd([1.0, 0.5, 0.45], [1, 2, 3], 0.0, 2.5).count == 2

    def test_infeasible(self):
        """No prefix within budget selects zero stages."""
        selection = choose_stages_rd([1.0], [1], 0.1, 0.5)

        assert selection.count == 0
        assert selection.infeasible

    def test_length_mismatch(self):
        """Distortions and rates must pair up."""
        with pytest.raises(InputError):
            choose_stages_rd([1.0, 0.5], [1], 0.1, math.inf)


class TestTrain:
    """Tests for CodecService.train."""

    def test_artifact_shapes(self, artifacts):
        """Transform, codebooks and entropy model agree on dimensions."""
        assert artifacts.transform.latent_dim == 4
        assert artifacts.transform.num_tx_antennas == 4
        assert artifacts.codebooks.sizes == (8, 8, 4)
        assert artifacts.entropy_model.alphabet_sizes == (8, 8, 4)
        assert artifacts.entropy_model.order == 1

    def test_deterministic(self, codec, codec_config, tensors, artifacts):
        """Training twice with the same seed gives the same fingerprint."""
        again = codec.train(tensors[:8], codec_config, seed=5)

        assert again.fingerprint == artifacts.fingerprint

    def test_fingerprint_hashes_codewords(self, artifacts):
        """The fingerprint is a 64-bit blake2b hash of the float64 codewords."""
        digest = hashlib.blake2b(digest_size=8)
        for codebook in artifacts.codebooks.stages:
            digest.update(codebook.astype("<f8").tobytes())

        assert artifacts.fingerprint == int.from_bytes(digest.digest(), "little")
        assert artifacts.fingerprint == artifacts.codebooks.fingerprint

    def test_training_mse_non_increasing(self, codec, tensors, artifacts):
        """Each added stage lowers (or keeps) the training MSE."""
        errors = [
            np.mean([np.mean((codec.reconstruct(t, artifacts, n).data - t.data) ** 2) for t in tensors[:8]])
            for n in range(4)
        ]

        assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))

    def test_full_capacity_reconstructs_training_rows(self, codec, tensors):
        """d = 2 Nt with one codeword per training token is lossless on training data."""
        train = tensors[:8]
        cfg = CodecConfig(latent_dim=8, codebook_sizes=(64,), lbg_iters=50, entropy_order=0)
        artifacts = codec.train(train, cfg, seed=0)

        for tensor in train:
            assert np.mean((codec.reconstruct(tensor, artifacts, 1).data - tensor.data) ** 2) < 1e-24

    def test_empty_training_set(self, codec, codec_config):
        """Training needs data."""
        with pytest.raises(ConfigError):
            codec.train([], codec_config, seed=0)


class TestCompressDecompress:
    """Tests for compress and decompress."""

    @pytest.mark.parametrize("stages", [1, 2, 3])
    def test_decompress_matches_reconstruct(self, codec, tensors, artifacts, stages):
        """Entropy coding is lossless on top of the quantizer."""
        bitstream, _ = codec.compress(tensors[9], artifacts, active_stages=stages)
        restored = codec.decompress(bitstream, artifacts)

        assert np.array_equal(restored.data, codec.reconstruct(tensors[9], artifacts, stages).data)

    def test_deterministic_payloads(self, codec, tensors, artifacts):
        """Compressing twice gives identical bytes."""
        first, _ = codec.compress(tensors[8], artifacts)
        second, _ = codec.compress(tensors[8], artifacts)

        assert pack_bitstream(first) == pack_bitstream(second)

    def test_rate_report_matches_file_size(self, codec, tensors, artifacts):
        """Header plus payload bits equal the serialized size."""
        bitstream, report = codec.compress(tensors[8], artifacts, active_stages=2)

        assert report.total_bits == 8 * len(pack_bitstream(bitstream))
        assert report.header_bits == header_bits(2) == 8 * (33 + 4 * 2)
        assert report.rate_total == pytest.approx(sum(report.stage_rates[:2]))
        assert len(report.stage_bits) == 3

    def test_budget_selects_prefix(self, codec, tensors, artifacts):
        """The active prefix fits the budget."""
        _, full = codec.compress(tensors[9], artifacts)
        budget = full.stage_rates[0] + full.stage_rates[1] + 1e-9
        bitstream, report = codec.compress(tensors[9], artifacts, budget)

        assert report.active_stages == 2
        assert bitstream.header.active_stages == 2
        assert report.rate_total <= budget

    def test_infeasible_budget_sends_mean(self, codec, tensors, artifacts):
        """Below the base rate no stage is sent and decoding yields the mean."""
        bitstream, report = codec.compress(tensors[9], artifacts, 0.0)
        restored = codec.decompress(bitstream, artifacts)

        assert report.infeasible
        assert bitstream.payloads == ()
        np.testing.assert_allclose(restored.data, np.tile(artifacts.transform.mean, (8, 1)), atol=1e-12)

    def test_rd_policy_with_heavy_rate_weight(self, codec, tensors, artifacts):
        """A large rate weight makes the RD rule keep only the base stage."""
        _, report = codec.compress(tensors[9], artifacts, stage_policy="rd", rate_weight=1e9)

        assert report.active_stages == 1

    def test_unknown_policy(self, codec, tensors, artifacts):
        """Only the known stage policies are accepted."""
        with pytest.raises(ConfigError):
            codec.compress(tensors[9], artifacts, stage_policy="greedy")

    def test_active_stages_out_of_range(self, codec, tensors, artifacts):
        """Forced stage counts must not exceed L."""
        with pytest.raises(InputError):
            codec.compress(tensors[9], artifacts, active_stages=4)

    def test_other_artifacts_rejected(self, codec, codec_config, tensors, artifacts):
        """A bitstream decodes only with the codebooks that produced it."""
        other = codec.train(tensors[:8], codec_config, seed=6)
        bitstream, _ = codec.compress(tensors[9], artifacts)

        with pytest.raises(CodebookMismatchError):
            codec.decompress(bitstream, other)
