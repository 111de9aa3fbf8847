from __future__ import annotations

import numpy as np

from ..preprocess import DesignMatrix
from .tree import Tree, fit_tree


class DecisionTreeModel:
    algorithm = "decision_tree"

    def __init__(self, tree: Tree):
        self.tree = tree

    @classmethod
    def fit(cls, data: DesignMatrix, params: dict, seed: int) -> "DecisionTreeModel":
        tree = fit_tree(
            data.values,
            data.labels,
            criterion=params["criterion"],
            max_depth=params["max_depth"],
            min_node_size=params["min_node_size"],
        )
        return cls(tree)

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.tree.attack_probability(x)

    def state(self):
        return {}, self.tree.state("tree.")

    @classmethod
    def from_state(cls, meta, arrays):
        return cls(Tree.from_state(arrays, "tree."))
