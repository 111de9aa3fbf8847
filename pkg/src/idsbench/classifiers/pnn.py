"""Probabilistic neural network (Parzen-window classifier)."""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logsumexp

from .._random import derive_rng, stratified_subsample
from ..preprocess import DesignMatrix
from .distance import chunk_size, squared_distances

SIGMA_GRID = (0.25, 0.5, 1.0, 2.0)
HOLDOUT_FRACTION = 0.1


def _class_log_scores(d2: np.ndarray, pattern_labels: np.ndarray, log_priors: np.ndarray, sigma: float) -> np.ndarray:
    """log(prior_c * mean_c exp(-d^2 / 2 sigma^2)) for both classes, shape (n, 2)."""
    logk = -d2 / (2.0 * sigma * sigma)
    out = np.empty((d2.shape[0], 2))
    for c in (0, 1):
        members = pattern_labels == c
        out[:, c] = log_priors[c] + logsumexp(logk[:, members], axis=1) - np.log(members.sum())
    return out


def _select_patterns(x, y, cap, rng):
    if cap is not None and len(y) > cap:
        rows = stratified_subsample(y, cap, rng)
        return x[rows], y[rows]
    return x, y


class PnnModel:
    algorithm = "pnn"

    def __init__(self, patterns: np.ndarray, labels: np.ndarray, log_priors: np.ndarray, sigma: float,
                 sigma_scores: dict | None = None):
        self.patterns = patterns
        self.labels = labels
        self.log_priors = log_priors
        self.sigma = sigma
        self.sigma_scores = sigma_scores or {}
        self._norms = np.einsum("ij,ij->i", patterns, patterns)

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "PnnModel":
        x, y = data.values, data.labels
        counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=np.float64)
        log_priors = np.log(counts / counts.sum())
        cap = params["pattern_cap"]
        sigma = params["sigma"]
        sigma_scores = {}
        if sigma == "auto":
            rng = derive_rng(seed, "pnn", "holdout")
            n_hold = max(2, int(round(HOLDOUT_FRACTION * len(y))))
            hold = stratified_subsample(y, n_hold, rng)
            keep = np.ones(len(y), dtype=bool)
            keep[hold] = False
            if len(np.unique(y[keep])) < 2:
                keep[:] = True
            px, py = _select_patterns(x[keep], y[keep], cap, rng)
            probe = cls(px, py, log_priors, SIGMA_GRID[0])
            correct = probe._holdout_correct(x[hold], y[hold], SIGMA_GRID)
            sigma_scores = {str(s): c / len(hold) for s, c in zip(SIGMA_GRID, correct)}
            sigma = SIGMA_GRID[int(np.argmax(correct))]
        px, py = _select_patterns(x, y, cap, derive_rng(seed, "pnn", "patterns"))
        return cls(np.ascontiguousarray(px), np.ascontiguousarray(py), log_priors, float(sigma), sigma_scores)

    def _holdout_correct(self, x, y, sigmas) -> list[int]:
        correct = [0] * len(sigmas)
        step = chunk_size(len(self.patterns))
        for lo in range(0, len(y), step):
            d2 = squared_distances(x[lo:lo + step], self.patterns, self._norms)
            for j, s in enumerate(sigmas):
                ls = _class_log_scores(d2, self.labels, self.log_priors, s)
                pred = expit(ls[:, 1] - ls[:, 0]) >= 0.5
                correct[j] += int((pred == (y[lo:lo + step] == 1)).sum())
        return correct

    def scores(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape[0])
        step = chunk_size(len(self.patterns))
        for lo in range(0, x.shape[0], step):
            d2 = squared_distances(x[lo:lo + step], self.patterns, self._norms)
            ls = _class_log_scores(d2, self.labels, self.log_priors, self.sigma)
            out[lo:lo + step] = expit(ls[:, 1] - ls[:, 0])
        return out

    def state(self):
        meta = {"sigma": self.sigma, "sigma_scores": self.sigma_scores}
        return meta, {"patterns": self.patterns, "labels": self.labels, "log_priors": self.log_priors}

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(arrays["patterns"], arrays["labels"], arrays["log_priors"], meta["sigma"], meta["sigma_scores"])
