"""Tapped-delay-line channel generator.

Produces frequency-selective MISO downlink channels at RB granularity.
Tap delays sit on a deterministic exponential quantile grid scaled so the
power-delay profile has exactly the configured RMS delay spread; tap gains
are i.i.d. circularly-symmetric complex Gaussian per antenna.
"""

import logging
import math

import numpy as np

from ..domain import ChannelConfig, InputError, MultipathProfile, RBChannelSet

logger = logging.getLogger(__name__)


def exponential_delay_grid(num_paths: int, rms_delay_spread: float) -> tuple[np.ndarray, np.ndarray]:
    """Tap delays and normalized weights of an exponential PDP.

    Delays are the quantiles ``-ln(1 - p/P)`` (p = 0..P-1) of a unit
    exponential, scaled so the weighted RMS spread equals the target.

    Returns:
        (delays in seconds, weights summing to 1).
    """
    if num_paths == 1:
        return np.zeros(1), np.ones(1)
    unit = -np.log1p(-np.arange(num_paths) / num_paths)
    weights = np.exp(-unit)
    weights /= weights.sum()
    mean = np.sum(weights * unit)
    unit_spread = math.sqrt(np.sum(weights * unit**2) - mean**2)
    delays = unit * (rms_delay_spread / unit_spread)
    return delays, weights


class ChannelService:
    """Generates multipath profiles and their RB frequency responses."""

    def generate_profile(self, cfg: ChannelConfig) -> MultipathProfile:
        """Draw tap gains for every user.

        User ``k`` draws from ``SeedSequence([seed, k])``, so users can be
        generated independently without changing the result.

        Args:
            cfg: Channel configuration.

        Returns:
            A MultipathProfile with gains of shape (K, P, Nt).

        Raises:
            ConfigError: If cfg is invalid.
        """
        cfg.validate()
        delays, weights = exponential_delay_grid(cfg.num_paths, cfg.rms_delay_spread)
        amplitude = np.sqrt(weights / 2.0)[:, None]
        gains = np.empty((cfg.num_users, cfg.num_paths, cfg.num_tx_antennas), dtype=np.complex128)
        for k in range(cfg.num_users):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, k]))
            draws = rng.standard_normal((2, cfg.num_paths, cfg.num_tx_antennas))
            gains[k] = amplitude * (draws[0] + 1j * draws[1])
        return MultipathProfile(delays=delays, weights=weights, gains=gains)

    def rb_frequencies(self, cfg: ChannelConfig) -> np.ndarray:
        """Baseband frequency of each RB's center subcarrier, shape (G,)."""
        g = np.arange(cfg.num_rbs)
        spr = cfg.subcarriers_per_rb
        return (g * spr + spr / 2) * cfg.subcarrier_spacing

    def frequency_response(self, profile: MultipathProfile, cfg: ChannelConfig) -> RBChannelSet:
        """Evaluate the tap sum at every RB.

        ``H[g, k] = sum_p gains[k, p] * exp(-j 2 pi f_g tau_p)``. With
        ``cfg.rb_average`` the response is averaged over the RB's
        subcarriers instead of sampled at its center.

        Raises:
            InputError: If the profile does not match cfg.
        """
        if profile.gains.shape != (cfg.num_users, cfg.num_paths, cfg.num_tx_antennas):
            raise InputError(
                f"profile gains {profile.gains.shape} do not match config "
                f"({cfg.num_users}, {cfg.num_paths}, {cfg.num_tx_antennas})"
            )
        if cfg.rb_average:
            spr = cfg.subcarriers_per_rb
            carriers = np.arange(cfg.num_rbs * spr).reshape(cfg.num_rbs, spr)
            freqs = carriers * cfg.subcarrier_spacing
            phase = np.exp(-2j * np.pi * freqs[:, :, None] * profile.delays[None, None, :])
            phase = phase.mean(axis=1)
        else:
            freqs = self.rb_frequencies(cfg)
            phase = np.exp(-2j * np.pi * np.outer(freqs, profile.delays))
        H = np.einsum("gp,kpn->gkn", phase, profile.gains)
        return RBChannelSet(H=H, config=cfg)

    def generate(self, cfg: ChannelConfig) -> RBChannelSet:
        """Profile then frequency response in one call."""
        profile = self.generate_profile(cfg)
        channel = self.frequency_response(profile, cfg)
        logger.debug(
            "channel seed=%d G=%d K=%d Nt=%d mean gain %.3f",
            cfg.seed,
            cfg.num_rbs,
            cfg.num_users,
            cfg.num_tx_antennas,
            float(np.mean(np.abs(channel.H) ** 2)),
        )
        return channel
