"""CART decision trees with Gini impurity, used as the base learner.

Splits send ``x[feature] <= threshold`` to the left child. Thresholds are
midpoints between consecutive distinct sorted feature values. Trees are
fully grown by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .dataset import Dataset, EmptyDatasetError


@dataclass(frozen=True)
class Leaf:
    label: int
    positive_fraction: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class TreeParams:
    max_depth: Optional[int] = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


@dataclass(frozen=True, eq=False)
class Tree:
    """A fitted tree together with the input dimension it expects."""

    root: TreeNode
    n_features: int
    _flat: Optional[tuple] = field(default=None, repr=False, compare=False)

    def depth(self) -> int:
        def rec(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(rec(node.left), rec(node.right))
        return rec(self.root)

    def n_leaves(self) -> int:
        def rec(node):
            if isinstance(node, Leaf):
                return 1
            return rec(node.left) + rec(node.right)
        return rec(self.root)

    def _flatten(self):
        if self._flat is not None:
            return self._flat
        feature, threshold, left, right, value = [], [], [], [], []

        def add(node):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(0)
            if isinstance(node, Leaf):
                value[i] = node.label
            else:
                feature[i] = node.feature
                threshold[i] = node.threshold
                left[i] = add(node.left)
                right[i] = add(node.right)
            return i

        add(self.root)
        flat = (np.array(feature), np.array(threshold), np.array(left),
                np.array(right), np.array(value, dtype=np.int64))
        object.__setattr__(self, "_flat", flat)
        return flat

    def predict(self, X) -> np.ndarray:
        """Vectorized :func:`predict_tree` over the rows of ``X``."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected shape (n, {self.n_features}), got {X.shape}")
        feature, threshold, left, right, value = self._flatten()
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = feature[node] >= 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, feature[nd]] <= threshold[nd]
            node[r] = np.where(go_left, left[nd], right[nd])
            active = feature[node] >= 0
        return value[node]

    def to_dict(self) -> dict:
        def rec(node):
            if isinstance(node, Leaf):
                return {"kind": "leaf", "label": node.label,
                        "positive_fraction": node.positive_fraction}
            return {"kind": "split", "feature": node.feature, "threshold": node.threshold,
                    "left": rec(node.left), "right": rec(node.right)}
        return {"n_features": self.n_features, "root": rec(self.root)}

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        def rec(d):
            if d["kind"] == "leaf":
                return Leaf(int(d["label"]), float(d["positive_fraction"]))
            if d["kind"] == "split":
                return Split(int(d["feature"]), float(d["threshold"]), rec(d["left"]), rec(d["right"]))
            raise ValueError(f"unknown node kind {d['kind']!r}")
        return cls(rec(data["root"]), int(data["n_features"]))


def _make_leaf(n_pos: int, n: int) -> Leaf:
    frac = n_pos / n
    return Leaf(1 if frac >= 0.5 else -1, frac)


def _best_split(X: np.ndarray, pos: np.ndarray, min_leaf: int):
    """Return (feature, threshold) minimizing weighted Gini, or None.

    Minimizing n * weighted Gini is the same as maximizing
    (pL^2 + nL_neg^2) / nL + (pR^2 + nR_neg^2) / nR.
    """
    n, d = X.shape
    total_pos = int(pos.sum())
    n_left = np.arange(1, n)
    n_right = n - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)

    best_score, best = -np.inf, None
    for f in range(d):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        pl = np.cumsum(pos[order])[:-1]
        pr = total_pos - pl
        score = (pl ** 2 + (n_left - pl) ** 2) / n_left + (pr ** 2 + (n_right - pr) ** 2) / n_right
        score = np.where(valid, score, -np.inf)
        i = int(np.argmax(score))  # first maximum = lowest threshold
        # strict improvement needed to displace a lower feature index
        if score[i] > best_score + 1e-12 * n:
            best_score = score[i]
            lo, hi = xs[i], xs[i + 1]
            t = lo + (hi - lo) / 2.0
            if not lo <= t < hi:
                t = lo
            best = (f, float(t))
    return best


def fit_tree(ds: Dataset, params: TreeParams = TreeParams(), seed=None) -> Tree:
    """Greedy recursive partitioning on Gini impurity.

    ``seed`` is accepted for interface symmetry with the other learners;
    impurity ties are resolved deterministically (lowest feature, then
    lowest threshold), so the result never depends on it.
    """
    if ds.n == 0:
        raise EmptyDatasetError("cannot fit a tree on an empty dataset")
    X = ds.X
    pos = (ds.y == 1).astype(np.int64)

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        n = idx.size
        n_pos = int(pos[idx].sum())
        if (n_pos == 0 or n_pos == n
                or (params.max_depth is not None and depth >= params.max_depth)
                or n < params.min_samples_split
                or n < 2 * params.min_samples_leaf):
            return _make_leaf(n_pos, n)
        split = _best_split(X[idx], pos[idx], params.min_samples_leaf)
        if split is None:
            return _make_leaf(n_pos, n)
        f, t = split
        mask = X[idx, f] <= t
        return Split(f, t, grow(idx[mask], depth + 1), grow(idx[~mask], depth + 1))

    return Tree(grow(np.arange(ds.n), 0), ds.dimension)


def predict_tree(tree: Tree, x) -> int:
    x = np.asarray(x, dtype=float)
    if x.shape != (tree.n_features,):
        raise ValueError(f"expected a vector of length {tree.n_features}, got shape {x.shape}")
    node = tree.root
    while isinstance(node, Split):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label
