"""Squared Euclidean distances in bounded-memory chunks."""

from __future__ import annotations

import numpy as np

# query rows per chunk; keeps the (chunk x reference) block near 80 MB at 20k references
CHUNK_ELEMENTS = 10_000_000


def chunk_size(n_reference: int) -> int:
    return max(1, CHUNK_ELEMENTS // max(1, n_reference))


def squared_distances(q: np.ndarray, r: np.ndarray, r_norms: np.ndarray | None = None) -> np.ndarray:
    """BLAS-backed ||q - r||^2, clipped at 0 (approximate to a few ulps of the norms)."""
    if r_norms is None:
        r_norms = np.einsum("ij,ij->i", r, r)
    q_norms = np.einsum("ij,ij->i", q, q)
    d2 = q_norms[:, None] + r_norms[None, :] - 2.0 * (q @ r.T)
    np.maximum(d2, 0.0, out=d2)
    return d2
