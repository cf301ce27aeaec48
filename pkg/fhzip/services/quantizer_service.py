"""Residual vector quantization.

Stage 0 quantizes the latent tokens, every later stage quantizes the
residual left by the stages before it. Codebooks are trained stage by
stage with k-means (LBG) on those residuals.
"""

import logging
from typing import Sequence

import numpy as np
from sklearn.cluster import KMeans

from ..domain import (
    CodebookStack,
    ConfigError,
    CorruptStreamError,
    IndexStream,
    InputError,
    Latent,
)

logger = logging.getLogger(__name__)

KMEANS_REL_TOL = 1e-6
_BLOCK_ELEMENTS = 1 << 22


def block_rows(num_codewords: int, dim: int) -> int:
    """Rows per search block; a block's difference tensor holds at most _BLOCK_ELEMENTS floats."""
    return max(1, _BLOCK_ELEMENTS // max(1, num_codewords * dim))


def nearest_codeword(points: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Index of the nearest codeword for every point; ties go to the lowest index."""
    out = np.empty(points.shape[0], dtype=np.int64)
    chunk = block_rows(*codebook.shape)
    for start in range(0, points.shape[0], chunk):
        block = points[start : start + chunk]
        diff = block[:, None, :] - codebook[None, :, :]
        dist = np.einsum("tkd,tkd->tk", diff, diff)
        out[start : start + chunk] = np.argmin(dist, axis=1)
    return out


def lloyd(points: np.ndarray, n_clusters: int, max_iters: int, seed: int) -> tuple[np.ndarray, float, int]:
    """k-means++ seeding, then Lloyd steps until the objective stalls.

    Iteration stops after ``max_iters`` steps or once a step improves the
    mean squared error by less than ``KMEANS_REL_TOL`` of its previous value.

    Returns:
        (centers, mean squared error, iterations run).
    """
    km = KMeans(
        n_clusters=n_clusters,
        init="k-means++",
        n_init=1,
        max_iter=1,
        random_state=seed % 2**32,
        algorithm="lloyd",
    ).fit(points)
    centers = km.cluster_centers_.astype(np.float64)
    objective = float(km.inertia_) / points.shape[0]
    iterations = 1
    while iterations < max_iters:
        km = KMeans(n_clusters=n_clusters, init=centers, n_init=1, max_iter=1, algorithm="lloyd").fit(points)
        iterations += 1
        improved = objective - float(km.inertia_) / points.shape[0]
        centers = km.cluster_centers_.astype(np.float64)
        objective = float(km.inertia_) / points.shape[0]
        if improved <= KMEANS_REL_TOL * (objective + improved):
            break
    return centers, objective, iterations


def _dedupe(codebook: np.ndarray) -> np.ndarray:
    _, first = np.unique(codebook, axis=0, return_index=True)
    return codebook[np.sort(first)]


class QuantizerService:
    """Codebook training, quantization and dequantization."""

    def train_codebooks(
        self,
        latents: Sequence[Latent],
        sizes: Sequence[int],
        lbg_iters: int,
        seed: int,
    ) -> CodebookStack:
        """Train one k-means codebook per stage on successive residuals.

        A stage whose residuals have fewer distinct points than requested
        shrinks to the distinct count; this is logged, not raised.

        Args:
            latents: Training latents; all share the token dimension.
            sizes: Requested codebook size per stage.
            lbg_iters: Maximum Lloyd iterations per stage.
            seed: Seed for k-means++ initialization (stage l uses seed + l).

        Returns:
            The trained CodebookStack.

        Raises:
            ConfigError: If sizes is empty or there are fewer tokens than
                the largest requested size.
        """
        if not sizes:
            raise ConfigError("codebook_sizes", "need at least one stage")
        if not latents:
            raise ConfigError("training_set", "no training latents")
        tokens = np.concatenate([lat.z for lat in latents], axis=0)
        if tokens.shape[0] < max(sizes):
            raise ConfigError(
                "codebook_sizes",
                f"{tokens.shape[0]} training tokens cannot train {max(sizes)} codewords",
            )

        residual = tokens.astype(np.float64, copy=True)
        stages: list[np.ndarray] = []
        for l, size in enumerate(sizes):
            distinct = np.unique(residual, axis=0).shape[0]
            n_clusters = min(int(size), distinct)
            if n_clusters < size:
                logger.warning(
                    "stage %d: only %d distinct residuals, codebook shrinks from %d",
                    l,
                    distinct,
                    size,
                )
            centers, _, iterations = lloyd(residual, n_clusters, lbg_iters, seed + l)
            codebook = _dedupe(centers)
            stages.append(codebook)

            before = float(np.mean(np.sum(residual**2, axis=1)))
            residual = residual - codebook[nearest_codeword(residual, codebook)]
            after = float(np.mean(np.sum(residual**2, axis=1)))
            logger.debug(
                "stage %d: K=%d, %d Lloyd iterations, residual energy %.4e -> %.4e",
                l,
                codebook.shape[0],
                iterations,
                before,
                after,
            )
        return CodebookStack(stages=tuple(stages), requested_sizes=tuple(int(s) for s in sizes))

    def quantize(
        self, latent: Latent, stack: CodebookStack, active_stages: int
    ) -> tuple[IndexStream, Latent]:
        """Quantize every token through the first ``active_stages`` stages.

        Returns:
            (indices, reconstructed latent z_hat = sum of chosen codewords).

        Raises:
            InputError: On dimension mismatch or active_stages out of range.
        """
        indices, z_hat, _ = self.quantize_with_residual(latent, stack, active_stages)
        return indices, z_hat

    def quantize_with_residual(
        self, latent: Latent, stack: CodebookStack, active_stages: int
    ) -> tuple[IndexStream, Latent, np.ndarray]:
        """Like quantize, also returning the final residual r^(n)."""
        if latent.dim != stack.dim:
            raise InputError(f"latent dim {latent.dim} != codebook dim {stack.dim}")
        if not 1 <= active_stages <= stack.num_stages:
            raise InputError(f"active_stages must be in [1, {stack.num_stages}], got {active_stages}")

        residual = latent.z.astype(np.float64, copy=True)
        z_hat = np.zeros_like(residual)
        rows = []
        for codebook in stack.stages[:active_stages]:
            idx = nearest_codeword(residual, codebook)
            chosen = codebook[idx]
            z_hat = z_hat + chosen
            residual = residual - chosen
            rows.append(idx)
        indices = IndexStream(
            indices=np.stack(rows), alphabet_sizes=stack.sizes[:active_stages]
        )
        return indices, Latent(z=z_hat), residual

    def dequantize(self, indices: IndexStream, stack: CodebookStack) -> Latent:
        """Sum the codewords selected by each active stage.

        Raises:
            CorruptStreamError: If an index is outside its codebook or the
                stream has more stages than the stack.
        """
        if indices.active_stages > stack.num_stages:
            raise CorruptStreamError(
                f"stream has {indices.active_stages} stages, codebooks only {stack.num_stages}"
            )
        z_hat = np.zeros((indices.num_tokens, stack.dim), dtype=np.float64)
        for l in range(indices.active_stages):
            idx = indices.stage(l)
            codebook = stack.stages[l]
            if idx.size and (idx.min() < 0 or idx.max() >= codebook.shape[0]):
                raise CorruptStreamError(f"stage {l} index out of range [0, {codebook.shape[0]})")
            z_hat = z_hat + codebook[idx]
        return Latent(z=z_hat)

    def residual_energies(self, latent: Latent, stack: CodebookStack) -> list[float]:
        """Mean squared residual norm after 0, 1, ..., L stages."""
        residual = latent.z.astype(np.float64, copy=True)
        energies = [float(np.mean(np.sum(residual**2, axis=1)))]
        for codebook in stack.stages:
            residual = residual - codebook[nearest_codeword(residual, codebook)]
            energies.append(float(np.mean(np.sum(residual**2, axis=1))))
        return energies
