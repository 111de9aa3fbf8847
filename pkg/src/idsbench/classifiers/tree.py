"""CART-style binary trees grown on presorted columns.

The same grower serves the plain decision tree (Gini or gain ratio on 0/1
labels), the random forest (bootstrap counts as row weights, per-node
feature sampling) and gradient boosting (squared error on residuals).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels as _default_kernels

CRITERIA = {"gini": _default_kernels.GINI, "gain_ratio": _default_kernels.GAIN_RATIO, "sse": _default_kernels.SSE}


@dataclass(frozen=True, eq=False)
class Tree:
    feature: np.ndarray  # int32, -1 marks a leaf
    threshold: np.ndarray  # float64; rows with x <= threshold go left
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    value: np.ndarray  # (nodes, 2) class weights, or (nodes, 1) regression means

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):  # children always have larger ids
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Leaf id reached by every row of ``x``."""
        node = np.zeros(x.shape[0], dtype=np.int64)
        active = np.arange(x.shape[0])
        while active.size:
            f = self.feature[node[active]]
            internal = f >= 0
            active, f = active[internal], f[internal]
            if not active.size:
                break
            cur = node[active]
            go_left = x[active, f] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return node

    def leaf_values(self, x: np.ndarray) -> np.ndarray:
        return self.value[self.apply(x)]

    def attack_probability(self, x: np.ndarray) -> np.ndarray:
        v = self.leaf_values(x)
        return v[:, 1] / (v[:, 0] + v[:, 1])

    def state(self, prefix: str) -> dict[str, np.ndarray]:
        return {
            f"{prefix}feature": self.feature,
            f"{prefix}threshold": self.threshold,
            f"{prefix}left": self.left,
            f"{prefix}right": self.right,
            f"{prefix}value": self.value,
        }

    @classmethod
    def from_state(cls, arrays: dict[str, np.ndarray], prefix: str) -> "Tree":
        return cls(*(arrays[f"{prefix}{k}"] for k in ("feature", "threshold", "left", "right", "value")))


def presort(xt: np.ndarray) -> np.ndarray:
    """Per-feature row order, ascending by value (ties by row index)."""
    return np.ascontiguousarray(np.argsort(xt, axis=1, kind="stable").astype(np.int32))


def restrict_order(order: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Drop rows with ``keep[row] == False`` from a presorted order, keeping sort order."""
    mask = keep[order]
    return np.ascontiguousarray(order[mask].reshape(order.shape[0], -1))


def grow_tree(
    xt: np.ndarray,
    order: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    *,
    criterion: str = "gini",
    max_depth: int = 30,
    min_node_size: float = 2,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
    kernels=None,
) -> Tree:
    """Grow one tree greedily.

    ``xt`` is the transposed design matrix (features x rows), ``order`` a
    presorted index array restricted to rows with positive weight; it is
    rearranged in place. Node ids follow depth-first, left-first order.
    """
    kern = kernels or _default_kernels
    crit = CRITERIA[criterion]
    regression = crit == _default_kernels.SSE
    n_features, n_total = xt.shape
    xt = np.ascontiguousarray(xt, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    goes_left = np.zeros(n_total, dtype=np.uint8)
    scratch = np.empty(order.shape[1], dtype=np.int32)
    all_features = np.arange(n_features, dtype=np.int64)
    sample_features = max_features is not None and max_features < n_features

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[tuple[float, ...]] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(())
        return len(feature) - 1

    stack = [(new_node(), 0, order.shape[1], 0)]
    while stack:
        nid, start, end, depth = stack.pop()
        rows = order[0, start:end]
        wr = w[rows]
        total = float(wr.sum())
        if regression:
            value[nid] = (float(np.dot(wr, y[rows])) / total,)
            pure = False
        else:
            pos = float(wr[y[rows] > 0.5].sum())
            value[nid] = (total - pos, pos)
            pure = pos == 0.0 or pos == total
        if pure or depth >= max_depth or total < min_node_size or end - start < 2:
            continue
        if sample_features:
            feats = np.sort(rng.choice(n_features, size=max_features, replace=False)).astype(np.int64)
        else:
            feats = all_features
        f, thr, _gain = kern.best_split(xt, order, start, end, feats, y, w, crit)
        if f < 0:
            continue
        mid = kern.partition(xt, order, start, end, f, thr, goes_left, scratch)
        lid, rid = new_node(), new_node()
        feature[nid], threshold[nid], left[nid], right[nid] = f, thr, lid, rid
        stack.append((rid, mid, end, depth + 1))
        stack.append((lid, start, mid, depth + 1))

    return Tree(
        np.array(feature, dtype=np.int32),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        np.array(value, dtype=np.float64),
    )


def fit_tree(
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray | None = None,
    *,
    kernels=None,
    **kwargs,
) -> Tree:
    """Convenience wrapper: presort ``x`` (rows x features) and grow one tree."""
    xt = np.ascontiguousarray(np.asarray(x, dtype=np.float64).T)
    w = np.ones(x.shape[0]) if w is None else np.asarray(w, dtype=np.float64)
    order = presort(xt)
    if (w <= 0).any():
        order = restrict_order(order, w > 0)
    return grow_tree(xt, order, y, w, kernels=kernels, **kwargs)
