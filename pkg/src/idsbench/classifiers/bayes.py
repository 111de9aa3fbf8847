"""Naive Bayes over mixed columns.

Numeric columns get per-class Gaussians; each one-hot block is read back as
a single categorical variable with Laplace-smoothed per-class frequencies.
A row whose block is all zeros (a value unseen in training, or missing)
contributes nothing for that variable.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.special import expit

from ..preprocess import NUMERIC, DesignMatrix

_LOG_2PI = float(np.log(2.0 * np.pi))


class NaiveBayesModel:
    algorithm = "naive_bayes"

    def __init__(self, priors, numeric_cols, means, variances, blocks, log_tables):
        self.priors = priors  # (2,)
        self.numeric_cols = numeric_cols  # (g,) int
        self.means = means  # (2, g)
        self.variances = variances  # (2, g)
        self.blocks = blocks  # list of (start, width)
        self.log_tables = log_tables  # list of (2, width) arrays

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "NaiveBayesModel":
        x, y = data.values, data.labels
        alpha, floor = params["laplace_alpha"], params["variance_floor"]
        counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=np.float64)
        priors = counts / counts.sum()

        numeric_cols = np.array([b.start for b in data.blocks if b.kind == NUMERIC], dtype=np.int64)
        means = np.zeros((2, len(numeric_cols)))
        variances = np.zeros((2, len(numeric_cols)))
        for c in (0, 1):
            xc = x[y == c][:, numeric_cols]
            means[c] = xc.mean(axis=0)
            variances[c] = np.maximum(xc.var(axis=0), floor)

        blocks, tables = [], []
        for b in data.blocks:
            if b.kind == NUMERIC:
                continue
            block = x[:, b.start:b.stop]
            table = np.zeros((2, b.width))
            for c in (0, 1):
                table[c] = block[y == c].sum(axis=0)
            smoothed = table + alpha
            tables.append(np.log(smoothed / smoothed.sum(axis=1, keepdims=True)))
            blocks.append((b.start, b.width))
        return cls(priors, numeric_cols, means, variances, blocks, tables)

    def joint_log_likelihood(self, x: np.ndarray) -> np.ndarray:
        """log P(class) + sum of per-variable log likelihoods, shape (n, 2)."""
        out = np.empty((x.shape[0], 2))
        xn = x[:, self.numeric_cols]
        for c in (0, 1):
            var = self.variances[c]
            ll = -0.5 * (_LOG_2PI + np.log(var) + (xn - self.means[c]) ** 2 / var)
            out[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        for (start, width), table in zip(self.blocks, self.log_tables):
            # x is one-hot in the block, so the product picks the observed category
            out += x[:, start:start + width] @ table.T
        return out

    def posteriors(self, x: np.ndarray) -> np.ndarray:
        # work from the log-odds: the joint terms can reach 1e10 in magnitude,
        # and subtracting a log-normalizer that large loses the low digits
        jll = self.joint_log_likelihood(x)
        odds = jll[:, 1] - jll[:, 0]
        return np.column_stack([expit(-odds), expit(odds)])

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.posteriors(x)[:, 1]

    def state(self):
        arrays = {
            "priors": self.priors,
            "numeric_cols": self.numeric_cols,
            "means": self.means,
            "variances": self.variances,
        }
        for i, table in enumerate(self.log_tables):
            arrays[f"table{i}"] = table
        return {"blocks": json.loads(json.dumps(self.blocks))}, arrays

    @classmethod
    def from_state(cls, meta, arrays):
        blocks = [tuple(b) for b in meta["blocks"]]
        tables = [arrays[f"table{i}"] for i in range(len(blocks))]
        return cls(arrays["priors"], arrays["numeric_cols"], arrays["means"], arrays["variances"], blocks, tables)
