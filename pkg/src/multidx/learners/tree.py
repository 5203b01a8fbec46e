"""Classification trees: greedy impurity splits with best-first growth.

One builder serves the standalone decision tree (entropy, capped leaf
count) and the forest's trees (gini, per-node feature subsampling). Ties
in split gain resolve toward the lower feature index, then the lower
threshold; ties in expansion priority resolve by insertion order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .base import TrainedLearner, register

_GAIN_EPS = 1e-12


def _impurity(counts: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of one or more count vectors (last axis = classes)."""
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=-1)
    logs = np.where(p > 0.0, np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return -np.sum(p * logs, axis=-1)


def _best_split(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    criterion: str,
    feature_ids: np.ndarray,
) -> Optional[Tuple[float, int, float]]:
    """Best (improvement, feature, threshold) over candidate features.

    Improvement is the node-local impurity decrease; None when no split
    separates the node. Thresholds are midpoints of consecutive distinct
    sorted values.
    """
    n = y.size
    parent_counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    parent_imp = float(_impurity(parent_counts, criterion))
    best: Optional[Tuple[float, int, float]] = None
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    for j in feature_ids:
        vals = x[:, j]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        boundaries = np.flatnonzero(sv[:-1] < sv[1:])
        if boundaries.size == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left_counts = cum[boundaries]
        nl = (boundaries + 1).astype(np.float64)
        nr = n - nl
        right_counts = parent_counts[None, :] - left_counts
        imp_l = _impurity(left_counts, criterion)
        imp_r = _impurity(right_counts, criterion)
        improvement = parent_imp - (nl / n) * imp_l - (nr / n) * imp_r
        pick = int(np.argmax(improvement))
        gain = float(improvement[pick])
        if gain > _GAIN_EPS and (best is None or gain > best[0]):
            b = boundaries[pick]
            threshold = float((sv[b] + sv[b + 1]) / 2.0)
            best = (gain, int(j), threshold)
    return best


@dataclass
class Tree:
    """Flat-array binary tree; feature -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    distribution: np.ndarray  # (n_nodes, n_classes), valid at leaves

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def predict_dist(self, x: np.ndarray) -> np.ndarray:
        idx = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[idx]
            active = feat >= 0
            if not active.any():
                break
            rows = np.flatnonzero(active)
            go_left = x[rows, feat[rows]] <= self.threshold[idx[rows]]
            idx[rows] = np.where(go_left, self.left[idx[rows]], self.right[idx[rows]])
        return self.distribution[idx]

    def to_state(self) -> Dict[str, np.ndarray]:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "distribution": self.distribution,
        }

    @classmethod
    def from_state(cls, state: Dict[str, np.ndarray]) -> "Tree":
        return cls(
            feature=np.asarray(state["feature"], dtype=np.int64),
            threshold=np.asarray(state["threshold"], dtype=np.float64),
            left=np.asarray(state["left"], dtype=np.int64),
            right=np.asarray(state["right"], dtype=np.int64),
            distribution=np.asarray(state["distribution"], dtype=np.float64),
        )


def grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    criterion: str,
    max_leaf_nodes: Optional[int] = None,
    max_features: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> Tree:
    """Best-first growth: expand the pending leaf with the largest
    weighted impurity decrease until the cap or no useful split remains."""
    n, d = x.shape
    all_features = np.arange(d)

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    dist: List[np.ndarray] = []

    def new_node(rows: np.ndarray) -> int:
        node_id = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts = np.bincount(y[rows], minlength=n_classes).astype(np.float64)
        dist.append(counts / counts.sum())
        return node_id

    def candidate(rows: np.ndarray):
        if rows.size < 2 or np.unique(y[rows]).size < 2:
            return None
        if max_features is not None and max_features < d:
            ids = np.sort(rng.choice(d, size=max_features, replace=False))
        else:
            ids = all_features
        found = _best_split(x[rows], y[rows], n_classes, criterion, ids)
        if found is None:
            return None
        gain, j, thr = found
        return (rows.size * gain, j, thr)

    heap: List[Tuple[float, int, int, np.ndarray, int, float]] = []
    counter = 0

    def push(node_id: int, rows: np.ndarray) -> None:
        nonlocal counter
        cand = candidate(rows)
        if cand is not None:
            weighted_gain, j, thr = cand
            heapq.heappush(heap, (-weighted_gain, counter, node_id, rows, j, thr))
            counter += 1

    root_rows = np.arange(n)
    new_node(root_rows)
    push(0, root_rows)
    leaves = 1
    while heap and (max_leaf_nodes is None or leaves < max_leaf_nodes):
        _, _, node_id, rows, j, thr = heapq.heappop(heap)
        mask = x[rows, j] <= thr
        left_rows = rows[mask]
        right_rows = rows[~mask]
        feature[node_id] = j
        threshold[node_id] = thr
        left_id = new_node(left_rows)
        right_id = new_node(right_rows)
        left[node_id] = left_id
        right[node_id] = right_id
        leaves += 1
        push(left_id, left_rows)
        push(right_id, right_rows)

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        distribution=np.array(dist),
    )


@register
class DecisionTreeLearner(TrainedLearner):
    """Entropy-split tree, growth capped at max_leaf_nodes leaves."""

    KIND = "DecisionTree"

    def __init__(self, spec):
        super().__init__(spec)
        self.tree: Optional[Tree] = None

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        self.tree = grow_tree(
            x,
            y,
            self.n_classes,
            criterion=str(self.spec["criterion"]),
            max_leaf_nodes=int(self.spec["max_leaf_nodes"]),
        )

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.tree.predict_dist(x)

    def _params_state(self) -> Dict[str, object]:
        return {"tree": self.tree.to_state()}

    def _load_params(self, params: Dict[str, object]) -> None:
        self.tree = Tree.from_state(params["tree"])
