"""Learned linear analysis/synthesis transform.

The transform is a mean-removed principal-component projection fitted
on training precoding rows. Any pair implementing ``ITransformService``
(for instance a neural encoder/decoder) can replace it.
"""

import logging
from typing import Sequence

import numpy as np
from sklearn.decomposition import PCA

from ..domain import ConfigError, InputError, Latent, PrecodingTensor, TransformPair

logger = logging.getLogger(__name__)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Make the first non-negligible coordinate of every row positive."""
    out = components.copy()
    for row in out:
        scale = np.max(np.abs(row))
        nonzero = np.flatnonzero(np.abs(row) > 1e-12 * scale)
        if nonzero.size and row[nonzero[0]] < 0:
            row *= -1.0
    return out


class TransformService:
    """PCA transform fitting plus analysis and synthesis."""

    def fit_transform(self, tensors: Sequence[PrecodingTensor], latent_dim: int) -> TransformPair:
        """Fit the top principal directions of all training rows.

        Args:
            tensors: Training tensors; all must share the same width.
            latent_dim: Target latent dimension d.

        Returns:
            A TransformPair with orthonormal analysis rows.

        Raises:
            ConfigError: If the set is empty, d is out of range, or there
                are fewer than d training rows.
        """
        if not tensors:
            raise ConfigError("training_set", "no training tensors")
        widths = {t.data.shape[1] for t in tensors}
        if len(widths) != 1:
            raise InputError(f"training tensors have mixed widths {sorted(widths)}")
        width = widths.pop()
        if not 1 <= latent_dim <= width:
            raise ConfigError("latent_dim", f"must be in [1, {width}], got {latent_dim}")
        rows = np.concatenate([t.data for t in tensors], axis=0)
        if rows.shape[0] < latent_dim:
            raise ConfigError(
                "latent_dim", f"{rows.shape[0]} training rows cannot span {latent_dim} dimensions"
            )

        pca = PCA(n_components=latent_dim, svd_solver="full")
        pca.fit(rows)
        analysis = _fix_signs(pca.components_.astype(np.float64))
        retained = float(np.sum(pca.explained_variance_ratio_))
        logger.info("transform fitted: %d rows, d=%d, %.2f%% variance retained", rows.shape[0], latent_dim, 100 * retained)
        return TransformPair(analysis=analysis, mean=pca.mean_.astype(np.float64))

    def analyze(self, tensor: PrecodingTensor, transform: TransformPair) -> Latent:
        """z_i = A (row_i - m), one token per row.

        Raises:
            InputError: If the tensor width differs from the transform's.
        """
        if tensor.data.shape[1] != transform.input_dim:
            raise InputError(
                f"tensor width {tensor.data.shape[1]} != transform width {transform.input_dim}"
            )
        return Latent(z=(tensor.data - transform.mean) @ transform.analysis.T)

    def synthesize(
        self, latent: Latent, transform: TransformPair, num_rbs: int, num_users: int
    ) -> PrecodingTensor:
        """row_i = A^T z_i + m.

        Raises:
            InputError: If the token dimension differs from d or the token
                count does not match num_rbs * num_users.
        """
        if latent.dim != transform.latent_dim:
            raise InputError(f"latent dim {latent.dim} != transform dim {transform.latent_dim}")
        data = latent.z @ transform.analysis + transform.mean
        return PrecodingTensor(data=data, num_rbs=num_rbs, num_users=num_users)
