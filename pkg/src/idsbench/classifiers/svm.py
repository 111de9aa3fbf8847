"""Linear soft-margin SVM trained with Pegasos (stochastic subgradient on the hinge loss)."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .. import kernels
from .._random import derive_rng, stratified_subsample
from ..preprocess import DesignMatrix


class LinearSvmModel:
    algorithm = "svm"

    def __init__(self, weights: np.ndarray, bias: float):
        self.weights = weights
        self.bias = bias

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int, *, backend=None) -> "LinearSvmModel":
        rng = derive_rng(seed, "svm")
        x, labels = data.values, data.labels
        cap = params["subsample_cap"]
        if cap is not None and len(labels) > cap:
            rows = stratified_subsample(labels, cap, rng)
            x, labels = x[rows], labels[rows]
        y = np.where(labels == 1, 1.0, -1.0)
        n, d = x.shape
        perms = np.stack([rng.permutation(n) for _ in range(params["epochs"])]).astype(np.int64)
        w = np.zeros(d + 1)
        kern = backend or kernels
        kern.pegasos(np.ascontiguousarray(x), y, float(params["lambda"]), np.ascontiguousarray(perms), w)
        return cls(w[:d].copy(), float(w[d]))

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weights + self.bias

    def scores(self, x: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(x))

    def state(self):
        return {"bias": self.bias}, {"weights": self.weights}

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(arrays["weights"], meta["bias"])
