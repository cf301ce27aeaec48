"""Tests for WMMSE precoding, sum rates and the precoding tensor layout."""

import math

import numpy as np
import pytest

from fhzip.domain import ChannelConfig, InputError, PrecoderConfig, PrecodingTensor
from fhzip.services import ChannelService, PrecoderService
from fhzip.services.precoder_service import user_sinr


@pytest.fixture
def service() -> PrecoderService:
    """Create a precoder service."""
    return PrecoderService()


@pytest.fixture
def config() -> PrecoderConfig:
    """Default precoder configuration."""
    return PrecoderConfig(total_power=1.0, noise_power=1e-2, max_iters=100, convergence_tol=1e-8)


def random_channel(rng: np.random.Generator, K: int, Nt: int) -> np.ndarray:
    """i.i.d. CN(0, 1) channel rows."""
    return (rng.standard_normal((K, Nt)) + 1j * rng.standard_normal((K, Nt))) / math.sqrt(2)


def loop_sum_rate(H: np.ndarray, V: np.ndarray, noise_power: float) -> float:
    """Per-RB average sum rate with explicit loops."""
    G, K, _ = H.shape
    total = 0.0
    for g in range(G):
        for k in range(K):
            signal = abs(np.vdot(H[g, k], V[g, k])) ** 2
            interference = sum(abs(np.vdot(H[g, k], V[g, j])) ** 2 for j in range(K) if j != k)
            total += math.log2(1 + signal / (interference + noise_power))
    return total / G


class TestWmmseRb:
    """Tests for single-RB WMMSE."""

    def test_single_user_converges_to_mrt(self, service, config):
        """With one user the optimum is full-power maximum ratio transmission."""
        rng = np.random.default_rng(0)
        h = random_channel(rng, 1, 8)
        result = service.wmmse_rb(h, config)
        mrt = math.sqrt(config.total_power) * h / np.linalg.norm(h)

        np.testing.assert_allclose(result.V, mrt, rtol=1e-9, atol=1e-12)

    def test_orthogonal_users_split_power_equally(self, service, config):
        """Equal-gain orthogonal users each get half the power."""
        H = 0.5 * np.eye(2, dtype=np.complex128)
        result = service.wmmse_rb(H, config)
        powers = np.sum(np.abs(result.V) ** 2, axis=1)

        np.testing.assert_allclose(powers, [0.5, 0.5], atol=1e-6)

    def test_orthogonal_users_reach_grid_optimum(self, service, config):
        """Sum rate matches a fine power-split grid search."""
        gain = 0.25
        H = math.sqrt(gain) * np.eye(2, dtype=np.complex128)
        result = service.wmmse_rb(H, config)
        splits = np.linspace(0.0, config.total_power, 100001)
        grid = np.log2(1 + splits * gain / config.noise_power) + np.log2(
            1 + (config.total_power - splits) * gain / config.noise_power
        )

        assert result.sum_rate == pytest.approx(grid.max(), abs=1e-4)

    def test_zero_channel_gives_zero_precoder(self, service, config):
        """An all-zero channel yields zero precoders and zero rate."""
        result = service.wmmse_rb(np.zeros((3, 4), dtype=np.complex128), config)

        assert np.all(result.V == 0)
        assert result.sum_rate == 0.0

    def test_zero_user_gets_no_power(self, service, config):
        """A user with a zero channel receives a zero precoder."""
        rng = np.random.default_rng(1)
        H = random_channel(rng, 3, 4)
        H[1] = 0
        result = service.wmmse_rb(H, config)

        assert np.all(result.V[1] == 0)
        assert np.sum(np.abs(result.V) ** 2) <= config.total_power * (1 + 1e-9)

    def test_non_finite_channel_rejected(self, service, config):
        """NaN or Inf in H raises InputError."""
        H = np.ones((2, 4), dtype=np.complex128)
        H[0, 1] = np.nan

        with pytest.raises(InputError):
            service.wmmse_rb(H, config)

    def test_monotone_and_feasible(self, service, config):
        """Over 100 random RBs the sum rate never decreases and power stays within budget."""
        rng = np.random.default_rng(2)
        for _ in range(100):
            H = random_channel(rng, 3, 8)
            result = service.wmmse_rb(H, config)
            history = np.array(result.rate_history)

            assert np.all(np.diff(history) >= -1e-9)
            assert np.sum(np.abs(result.V) ** 2) <= config.total_power * (1 + 1e-9)

    def test_precoders_lie_in_channel_span(self, service, config):
        """With an active power constraint each precoder combines the user channels."""
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(100):
            H = random_channel(rng, 3, 8)
            result = service.wmmse_rb(H, config)
            if result.mu <= 0:
                continue
            checked += 1
            Q, _ = np.linalg.qr(H.T)
            for v in result.V:
                residual = v - Q @ (Q.conj().T @ v)
                assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(v)

        assert checked > 0

    def test_stops_at_iteration_limit(self, service):
        """max_iters bounds the number of updates."""
        rng = np.random.default_rng(4)
        cfg = PrecoderConfig(max_iters=2, convergence_tol=1e-15)
        result = service.wmmse_rb(random_channel(rng, 4, 4), cfg)

        assert result.iterations <= 2
        assert len(result.rate_history) == result.iterations + 1


class TestSumRate:
    """Tests for PrecoderService.sum_rate."""

    def test_zero_precoder_has_zero_rate(self, service):
        """No transmit power means no rate."""
        H = np.ones((2, 2, 4), dtype=np.complex128)

        assert service.sum_rate(H, np.zeros_like(H), 1e-2) == 0.0

    def test_single_user_closed_form(self, service):
        """K = 1, G = 1 reduces to log2(1 + |h^H v|^2 / sigma^2)."""
        H = np.array([[[2.0 + 0j, 0.0]]])
        V = np.array([[[0.5 + 0j, 0.0]]])

        assert service.sum_rate(H, V, 0.1) == pytest.approx(math.log2(1 + 1.0 / 0.1))

    def test_matches_loop_oracle(self, service):
        """Vectorized rate equals the explicit SINR sum."""
        rng = np.random.default_rng(5)
        H = np.stack([random_channel(rng, 3, 4) for _ in range(5)])
        V = np.stack([random_channel(rng, 3, 4) for _ in range(5)]) * 0.3

        assert service.sum_rate(H, V, 0.05) == pytest.approx(loop_sum_rate(H, V, 0.05), rel=1e-12)

    def test_rb_weights_average(self, service):
        """Weighted average uses the normalized RB weights."""
        rng = np.random.default_rng(6)
        H = np.stack([random_channel(rng, 2, 2) for _ in range(2)])
        V = H.copy()
        rates = [service.sum_rate(H[g : g + 1], V[g : g + 1], 0.1) for g in range(2)]

        weighted = service.sum_rate(H, V, 0.1, rb_weights=(3.0, 1.0))

        assert weighted == pytest.approx(0.75 * rates[0] + 0.25 * rates[1])

    def test_shape_mismatch(self, service):
        """Mismatched H and V shapes raise InputError."""
        with pytest.raises(InputError):
            service.sum_rate(np.ones((2, 2, 4)), np.ones((2, 2, 3)), 0.1)

    def test_wrong_weight_count(self, service):
        """One weight per RB is required."""
        H = np.ones((2, 1, 2), dtype=np.complex128)

        with pytest.raises(InputError):
            service.sum_rate(H, H, 0.1, rb_weights=(1.0,))

    def test_user_sinr_single_user(self):
        """SINR without interference is |h^H v|^2 / sigma^2."""
        H = np.array([[[1.0 + 0j, 1.0]]])
        V = np.array([[[1.0 + 0j, 0.0]]])

        assert user_sinr(H, V, 0.5)[0, 0] == pytest.approx(2.0)


class TestPrecodingTensor:
    """Tests for the real-valued tensor stacking."""

    def test_stacking_example(self):
        """v = (1+2j, 3-1j) becomes the row [1, 3, 2, -1]."""
        V = np.array([[[1 + 2j, 3 - 1j]]])
        tensor = PrecodingTensor.from_precoders(V)

        assert tensor.data.tolist() == [[1.0, 3.0, 2.0, -1.0]]

    def test_round_trip(self):
        """Stacking then unstacking restores the complex precoders."""
        rng = np.random.default_rng(7)
        V = rng.standard_normal((3, 2, 4)) + 1j * rng.standard_normal((3, 2, 4))
        tensor = PrecodingTensor.from_precoders(V)

        assert tensor.data.shape == (6, 8)
        assert np.array_equal(tensor.to_precoders(), V)

    def test_row_order_is_rb_major(self):
        """Row g * K + k holds RB g, user k."""
        V = np.zeros((2, 3, 1), dtype=np.complex128)
        V[1, 2, 0] = 5.0
        tensor = PrecodingTensor.from_precoders(V)

        assert tensor.data[1 * 3 + 2, 0] == 5.0

    def test_row_count_must_match(self):
        """D must equal G * K."""
        with pytest.raises(InputError):
            PrecodingTensor(data=np.zeros((5, 4)), num_rbs=2, num_users=2)

    def test_generate_precoding_tensor(self, service, config):
        """Tensor shape is (G K) x 2 Nt for a generated channel."""
        channel = ChannelService().generate(
            ChannelConfig(num_tx_antennas=4, num_users=2, num_rbs=3, num_paths=4, seed=1)
        )
        tensor = service.generate_precoding_tensor(channel, config)

        assert tensor.data.shape == (6, 8)
        assert tensor.num_rbs == 3
        assert tensor.num_users == 2
        powers = np.sum(np.abs(tensor.to_precoders()) ** 2, axis=(1, 2))
        assert np.all(powers <= config.total_power * (1 + 1e-9))
