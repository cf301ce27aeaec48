"""Tests for the PCA analysis/synthesis transform."""

import numpy as np
import pytest

from fhzip.domain import ConfigError, InputError, Latent, PrecodingTensor
from fhzip.services import TransformService


@pytest.fixture
def service() -> TransformService:
    """Create a transform service."""
    return TransformService()


@pytest.fixture
def tensors() -> list[PrecodingTensor]:
    """Correlated training tensors: 5 samples of 4 RBs x 2 users, Nt = 4."""
    rng = np.random.default_rng(0)
    mixing = rng.standard_normal((3, 8))
    out = []
    for _ in range(5):
        data = rng.standard_normal((8, 3)) @ mixing + 0.05 * rng.standard_normal((8, 8)) + 0.3
        out.append(PrecodingTensor(data=data, num_rbs=4, num_users=2))
    return out


def stacked(tensors: list[PrecodingTensor]) -> np.ndarray:
    return np.concatenate([t.data for t in tensors], axis=0)


class TestFitTransform:
    """Tests for TransformService.fit_transform."""

    def test_analysis_rows_orthonormal(self, service, tensors):
        """A A^T is the identity."""
        pair = service.fit_transform(tensors, 5)

        np.testing.assert_allclose(pair.analysis @ pair.analysis.T, np.eye(5), atol=1e-10)
        assert pair.latent_dim == 5
        assert pair.input_dim == 8

    def test_mean_is_training_mean(self, service, tensors):
        """The offset is the mean training row."""
        pair = service.fit_transform(tensors, 3)

        np.testing.assert_allclose(pair.mean, stacked(tensors).mean(axis=0), atol=1e-12)

    def test_sign_convention(self, service, tensors):
        """First non-negligible coordinate of every direction is positive."""
        pair = service.fit_transform(tensors, 4)
        for row in pair.analysis:
            first = row[np.flatnonzero(np.abs(row) > 1e-12 * np.abs(row).max())[0]]
            assert first > 0

    def test_deterministic(self, service, tensors):
        """Fitting twice gives identical transforms."""
        first = service.fit_transform(tensors, 4)
        second = service.fit_transform(tensors, 4)

        assert np.array_equal(first.analysis, second.analysis)
        assert np.array_equal(first.mean, second.mean)

    def test_beats_random_subspaces(self, service, tensors):
        """PCA reconstruction error is no worse than random d-dim projections."""
        d = 3
        pair = service.fit_transform(tensors, d)
        rows = stacked(tensors)
        centered = rows - pair.mean
        pca_err = np.sum((centered - centered @ pair.analysis.T @ pair.analysis) ** 2)

        rng = np.random.default_rng(1)
        for _ in range(20):
            basis, _ = np.linalg.qr(rng.standard_normal((8, d)))
            rand_err = np.sum((centered - centered @ basis @ basis.T) ** 2)
            assert pca_err <= rand_err + 1e-12

    @pytest.mark.parametrize("latent_dim", [0, 9])
    def test_latent_dim_out_of_range(self, service, tensors, latent_dim):
        """d must lie in [1, 2 Nt]."""
        with pytest.raises(ConfigError) as exc_info:
            service.fit_transform(tensors, latent_dim)

        assert exc_info.value.field == "latent_dim"

    def test_empty_training_set(self, service):
        """No tensors means nothing to fit."""
        with pytest.raises(ConfigError):
            service.fit_transform([], 2)

    def test_too_few_rows(self, service):
        """Fewer rows than d cannot define the subspace."""
        tensor = PrecodingTensor(data=np.ones((2, 8)), num_rbs=1, num_users=2)

        with pytest.raises(ConfigError):
            service.fit_transform([tensor], 4)


class TestAnalyzeSynthesize:
    """Tests for analysis and synthesis."""

    def test_full_dimension_round_trip(self, service, tensors):
        """With d = 2 Nt synthesis inverts analysis."""
        pair = service.fit_transform(tensors, 8)
        original = tensors[0]
        restored = service.synthesize(service.analyze(original, pair), pair, 4, 2)

        np.testing.assert_allclose(restored.data, original.data, atol=1e-10)

    def test_affine_plane_round_trip(self, service):
        """Rows on a 2-D affine plane survive a d = 2 transform exactly."""
        rng = np.random.default_rng(11)
        offset = rng.standard_normal(8)
        directions = rng.standard_normal((2, 8))
        planar = [
            PrecodingTensor(data=offset + rng.standard_normal((8, 2)) @ directions, num_rbs=4, num_users=2)
            for _ in range(5)
        ]
        pair = service.fit_transform(planar, 2)

        for tensor in planar:
            restored = service.synthesize(service.analyze(tensor, pair), pair, 4, 2)
            np.testing.assert_allclose(restored.data, tensor.data, atol=1e-10)

    def test_token_per_row(self, service, tensors):
        """Analysis yields one d-dimensional token per row."""
        pair = service.fit_transform(tensors, 3)
        latent = service.analyze(tensors[1], pair)

        assert latent.z.shape == (8, 3)

    def test_synthesis_is_projection(self, service, tensors):
        """Analyze after synthesize returns the same latent."""
        pair = service.fit_transform(tensors, 3)
        latent = service.analyze(tensors[2], pair)
        again = service.analyze(service.synthesize(latent, pair, 4, 2), pair)

        np.testing.assert_allclose(again.z, latent.z, atol=1e-10)

    def test_width_mismatch(self, service, tensors):
        """A tensor for another antenna count is rejected."""
        pair = service.fit_transform(tensors, 3)
        wrong = PrecodingTensor(data=np.zeros((8, 6)), num_rbs=4, num_users=2)

        with pytest.raises(InputError):
            service.analyze(wrong, pair)

    def test_latent_dim_mismatch(self, service, tensors):
        """Tokens must have the transform's dimension."""
        pair = service.fit_transform(tensors, 3)

        with pytest.raises(InputError):
            service.synthesize(Latent(z=np.zeros((8, 2))), pair, 4, 2)
