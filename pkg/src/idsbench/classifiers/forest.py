"""Random forest: bagged trees with per-node feature subsampling."""

from __future__ import annotations

import math

import numpy as np

from .._random import derive_rng
from ..preprocess import DesignMatrix
from .tree import Tree, grow_tree, presort, restrict_order


def resolve_features_per_split(setting, width: int) -> int:
    if setting == "sqrt":
        return max(1, int(math.floor(math.sqrt(width))))
    if setting == "all":
        return width
    return min(int(setting), width)


class RandomForestModel:
    algorithm = "random_forest"

    def __init__(self, trees: list[Tree]):
        self.trees = trees

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "RandomForestModel":
        x, y = data.values, data.labels
        n = x.shape[0]
        xt = np.ascontiguousarray(x.T)
        full_order = presort(xt)
        max_features = resolve_features_per_split(params["features_per_split"], data.width)
        trees = []
        for t in range(params["trees"]):
            rng = derive_rng(seed, "random_forest", t)
            if params["bootstrap"]:
                w = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.float64)
                order = restrict_order(full_order, w > 0)
            else:
                w = np.ones(n)
                order = full_order.copy()
            trees.append(
                grow_tree(
                    xt,
                    order,
                    y,
                    w,
                    criterion=params["criterion"],
                    max_depth=params["max_depth"],
                    min_node_size=params["min_node_size"],
                    max_features=max_features,
                    rng=rng,
                )
            )
        return cls(trees)

    def scores(self, x: np.ndarray) -> np.ndarray:
        total = np.zeros(x.shape[0])
        for tree in self.trees:
            total += tree.attack_probability(x)
        return total / len(self.trees)

    def state(self):
        arrays = {}
        for i, tree in enumerate(self.trees):
            arrays.update(tree.state(f"tree{i}."))
        return {"n_trees": len(self.trees)}, arrays

    @classmethod
    def from_state(cls, meta, arrays):
        return cls([Tree.from_state(arrays, f"tree{i}.") for i in range(meta["n_trees"])])
