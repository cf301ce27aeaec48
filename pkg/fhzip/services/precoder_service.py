"""RB-granularity WMMSE precoding and sum-rate evaluation.

Each RB is optimized independently with the classical WMMSE block
coordinate descent (receiver, MSE weight, precoder) under a per-RB sum
power constraint. The Lagrange multiplier of the precoder update is found
by bisection.
"""

import logging
from typing import Optional

import numpy as np

from ..domain import (
    InputError,
    PrecoderConfig,
    PrecodingSet,
    PrecodingTensor,
    RBChannelSet,
    RBPrecoding,
)

logger = logging.getLogger(__name__)

BISECTION_STEPS = 64
# Eigenvalues below this fraction of the largest are treated as null space.
EIG_RTOL = 1e-12


def per_rb_rates(H: np.ndarray, V: np.ndarray, noise_power: float) -> np.ndarray:
    """Per-RB sum rates in bits/s/Hz for H, V of shape (G, K, Nt)."""
    sinr = user_sinr(H, V, noise_power)
    return np.log2(1.0 + sinr).sum(axis=1)


def user_sinr(H: np.ndarray, V: np.ndarray, noise_power: float) -> np.ndarray:
    """Post-precoding SINR of every user on every RB, shape (G, K)."""
    if H.shape != V.shape or H.ndim != 3:
        raise InputError(f"channel {H.shape} and precoder {V.shape} shapes differ")
    gains = np.abs(np.einsum("gkn,gjn->gkj", H.conj(), V)) ** 2
    signal = np.diagonal(gains, axis1=1, axis2=2)
    interference = gains.sum(axis=2) - signal
    return signal / (interference + noise_power)


def _rb_rate(H_g: np.ndarray, V_g: np.ndarray, noise_power: float) -> float:
    return float(per_rb_rates(H_g[None], V_g[None], noise_power)[0])


class PrecoderService:
    """WMMSE precoder generation and sum-rate evaluation."""

    def wmmse_rb(self, H_g: np.ndarray, cfg: PrecoderConfig) -> RBPrecoding:
        """Run WMMSE on one RB.

        Args:
            H_g: Channel slice of shape (K, Nt); row k is h_k.
            cfg: Precoder configuration.

        Returns:
            RBPrecoding with V of shape (K, Nt) and the sum-rate history
            (initial point first).

        Raises:
            InputError: If H_g has non-finite entries or the wrong rank.
        """
        cfg.validate()
        H_g = np.asarray(H_g, dtype=np.complex128)
        if H_g.ndim != 2:
            raise InputError(f"RB channel must be K x Nt, got shape {H_g.shape}")
        if not np.all(np.isfinite(H_g)):
            raise InputError("channel has non-finite entries")

        K, Nt = H_g.shape
        V = np.zeros((K, Nt), dtype=np.complex128)
        norms = np.linalg.norm(H_g, axis=1)
        active = norms > 0
        if not active.any():
            return RBPrecoding(V=V, iterations=0, sum_rate=0.0, mu=0.0, rate_history=[0.0])

        # MRT start, equal power per active user
        P = cfg.total_power
        sigma2 = cfg.noise_power
        V[active] = np.sqrt(P / active.sum()) * H_g[active] / norms[active, None]
        rate = _rb_rate(H_g, V, sigma2)
        history = [rate]
        Ha = H_g[active]
        mu = 0.0
        iterations = 0

        for iterations in range(1, cfg.max_iters + 1):
            Va = V[active]
            cross = Ha.conj() @ Va.T  # cross[k, j] = h_k^H v_j
            total = np.sum(np.abs(cross) ** 2, axis=1) + sigma2
            desired = np.diagonal(cross)
            u = desired / total
            mse = 1.0 - np.abs(desired) ** 2 / total
            w = 1.0 / np.maximum(mse, np.finfo(float).tiny)

            # A = sum_j w_j |u_j|^2 h_j h_j^H, b_k = w_k u_k h_k
            A = (Ha.T * (w * np.abs(u) ** 2)) @ Ha.conj()
            B = (w * u)[:, None] * Ha
            V_new, mu = self._solve_power_constrained(A, B, P)
            V = np.zeros_like(V)
            V[active] = V_new

            new_rate = _rb_rate(H_g, V, sigma2)
            history.append(new_rate)
            change = abs(new_rate - rate)
            rate = new_rate
            if change <= cfg.convergence_tol * max(abs(rate), np.finfo(float).tiny):
                break

        return RBPrecoding(V=V, iterations=iterations, sum_rate=rate, mu=mu, rate_history=history)

    def _solve_power_constrained(
        self, A: np.ndarray, B: np.ndarray, total_power: float
    ) -> tuple[np.ndarray, float]:
        """Solve v_k = (A + mu I)^-1 b_k with the smallest feasible mu >= 0.

        A is Hermitian PSD and spanned by the active channels; inversion is
        restricted to its range so precoders stay in the channel column
        space.
        """
        eigvals, Q = np.linalg.eigh(A)
        keep = eigvals > EIG_RTOL * max(eigvals.max(), 0.0)
        lam = eigvals[keep]
        Q = Q[:, keep]
        coeffs = B.conj() @ Q  # row k: (Q^H b_k)^H
        coeffs = coeffs.conj()
        energy = np.sum(np.abs(coeffs) ** 2, axis=0)  # per eigen-direction

        def power(mu: float) -> float:
            return float(np.sum(energy / (lam + mu) ** 2))

        mu = 0.0
        if power(0.0) > total_power:
            hi = 1.0
            while power(hi) > total_power:
                hi *= 2.0
            lo = 0.0
            for _ in range(BISECTION_STEPS):
                mid = 0.5 * (lo + hi)
                if power(mid) > total_power:
                    lo = mid
                else:
                    hi = mid
            mu = hi
        V = (coeffs / (lam + mu)) @ Q.T
        return V, mu

    def precode(self, channel: RBChannelSet, cfg: PrecoderConfig) -> PrecodingSet:
        """Run WMMSE on every RB of a channel set."""
        H = channel.H
        V = np.zeros_like(H)
        iterations = 0
        for g in range(H.shape[0]):
            result = self.wmmse_rb(H[g], cfg)
            V[g] = result.V
            iterations = max(iterations, result.iterations)
        final_rate = self.sum_rate(H, V, cfg.noise_power, cfg.rb_weights)
        logger.debug("WMMSE done: %d RBs, max %d iterations, %.4f b/s/Hz", H.shape[0], iterations, final_rate)
        return PrecodingSet(V=V, iterations_used=iterations, final_sum_rate=final_rate)

    def sum_rate(
        self,
        H: RBChannelSet | np.ndarray,
        V: PrecodingSet | np.ndarray,
        noise_power: float,
        rb_weights: Optional[tuple[float, ...]] = None,
    ) -> float:
        """Per-RB average sum rate in bits/s/Hz.

        Args:
            H: Channel set or array of shape (G, K, Nt).
            V: Precoding set or array of the same shape.
            noise_power: Receiver noise power.
            rb_weights: Optional per-RB weights for the average.

        Raises:
            InputError: If shapes differ.
        """
        H_arr = H.H if isinstance(H, RBChannelSet) else np.asarray(H)
        V_arr = V.V if isinstance(V, PrecodingSet) else np.asarray(V)
        rates = per_rb_rates(H_arr, V_arr, noise_power)
        if rb_weights is None:
            return float(rates.mean())
        weights = np.asarray(rb_weights, dtype=np.float64)
        if weights.shape != rates.shape:
            raise InputError(f"{weights.size} RB weights for {rates.size} RBs")
        return float(np.sum(weights * rates) / np.sum(weights))

    def generate_precoding_tensor(self, channel: RBChannelSet, cfg: PrecoderConfig) -> PrecodingTensor:
        """Precode every RB and stack the result row-major (RB outer, user inner)."""
        return PrecodingTensor.from_precoders(self.precode(channel, cfg).V)
