"""NumPy implementations of the hot kernels.

Fallback backend used when the compiled extension is unavailable; same
contracts as _ckernels. All inputs are float64 arrays, rows are vectors.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def dot_scores(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Row-wise dot products of `matrix` against `query`."""
    return matrix @ query


def dot_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All pairwise dot products: result[i, j] = a[i] . b[j]."""
    return a @ b.T


def sqdist_matrix(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances: result[i, j] = ||x[i] - centers[j]||^2.

    Computed directly (not via the expanded dot-product identity) so small
    distances are not swamped by cancellation.
    """
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)
