"""Gradient boosted trees for binary log-loss.

Each round fits a squared-error regression tree to the residuals y - p and
adds its leaf means, shrunk by the learning rate, to the running log-odds.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..preprocess import DesignMatrix
from .tree import Tree, grow_tree, presort


def log_loss(y: np.ndarray, logit: np.ndarray) -> float:
    # log(1 + e^z) - y z, the numerically stable form of the binary cross-entropy
    return float(np.mean(np.logaddexp(0.0, logit) - y * logit))


class GradientBoostedTreesModel:
    algorithm = "gbt"

    def __init__(self, init_logit: float, trees: list[Tree], learning_rate: float, losses: np.ndarray):
        self.init_logit = init_logit
        self.trees = trees
        self.learning_rate = learning_rate
        # losses[0] is the loss of the constant model, losses[i] after round i
        self.losses = losses

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "GradientBoostedTreesModel":
        x = data.values
        y = data.labels.astype(np.float64)
        n = x.shape[0]
        xt = np.ascontiguousarray(x.T)
        base_order = presort(xt)
        p0 = y.mean()
        init = float(np.log(p0 / (1.0 - p0)))
        logit = np.full(n, init)
        w = np.ones(n)
        lr = params["learning_rate"]
        trees, losses = [], [log_loss(y, logit)]
        for _ in range(params["rounds"]):
            residual = y - expit(logit)
            tree = grow_tree(
                xt,
                base_order.copy(),
                residual,
                w,
                criterion="sse",
                max_depth=params["tree_depth"],
                min_node_size=params["min_node_size"],
            )
            logit = logit + lr * tree.leaf_values(x)[:, 0]
            trees.append(tree)
            losses.append(log_loss(y, logit))
        return cls(init, trees, lr, np.array(losses))

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        logit = np.full(x.shape[0], self.init_logit)
        for tree in self.trees:
            logit = logit + self.learning_rate * tree.leaf_values(x)[:, 0]
        return logit

    def scores(self, x: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(x))

    def state(self):
        arrays = {"losses": self.losses}
        for i, tree in enumerate(self.trees):
            arrays.update(tree.state(f"tree{i}."))
        meta = {"n_trees": len(self.trees), "init_logit": self.init_logit, "learning_rate": self.learning_rate}
        return meta, arrays

    @classmethod
    def from_state(cls, meta, arrays):
        trees = [Tree.from_state(arrays, f"tree{i}.") for i in range(meta["n_trees"])]
        return cls(meta["init_logit"], trees, meta["learning_rate"], arrays["losses"])
