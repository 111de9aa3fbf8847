"""k-nearest-neighbour vote over (optionally capped) stored training rows.

Neighbours are ranked by exact squared Euclidean distance, ties going to
the lower reference index. A BLAS pass screens candidates; exact distances
are recomputed for everything within rounding reach of the k-th one.
"""

from __future__ import annotations

import numpy as np

from .._random import derive_rng, stratified_subsample
from ..preprocess import DesignMatrix
from .distance import chunk_size, squared_distances

_BELOW_HALF = float(np.nextafter(0.5, 0.0))


class KnnModel:
    algorithm = "knn"

    def __init__(self, reference: np.ndarray, labels: np.ndarray, k: int):
        self.reference = reference
        self.labels = labels
        self.k = k
        self._norms = np.einsum("ij,ij->i", reference, reference)

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "KnnModel":
        x, y = data.values, data.labels
        cap = params["reference_cap"]
        if cap is not None and len(y) > cap:
            rows = stratified_subsample(y, cap, derive_rng(seed, "knn"))
            x, y = x[rows], y[rows]
        return cls(np.ascontiguousarray(x), np.ascontiguousarray(y), params["k"])

    def neighbors(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Indices and exact squared distances of the k nearest references, nearest first."""
        k = min(self.k, len(self.labels))
        n = x.shape[0]
        idx_out = np.empty((n, k), dtype=np.int64)
        dist_out = np.empty((n, k))
        ref = self.reference
        step = chunk_size(len(ref))
        max_norm = float(self._norms.max())
        for lo in range(0, n, step):
            q = x[lo:lo + step]
            approx = squared_distances(q, ref, self._norms)
            kth = np.partition(approx, k - 1, axis=1)[:, k - 1]
            margin = 1e-9 * (np.einsum("ij,ij->i", q, q) + max_norm) + 1e-12
            for i in range(q.shape[0]):
                cand = np.flatnonzero(approx[i] <= kth[i] + margin[i])
                diff = ref[cand] - q[i]
                exact = np.einsum("ij,ij->i", diff, diff)
                best = np.lexsort((cand, exact))[:k]
                idx_out[lo + i] = cand[best]
                dist_out[lo + i] = exact[best]
        return idx_out, dist_out

    def scores(self, x: np.ndarray) -> np.ndarray:
        idx, _ = self.neighbors(x)
        votes = self.labels[idx]
        score = votes.mean(axis=1)
        # a split vote follows the single nearest neighbour
        tie = votes.sum(axis=1) * 2 == votes.shape[1]
        score[tie & (votes[:, 0] == 0)] = _BELOW_HALF
        return score

    def state(self):
        return {"k": self.k}, {"reference": self.reference, "labels": self.labels}

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(arrays["reference"], arrays["labels"], meta["k"])
