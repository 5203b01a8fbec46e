"""Second-order gradient boosting of regression trees on log-loss.

The boosting profile: gain and leaf weights from the gradient/hessian
Taylor expansion with leaf regularization reg_lambda, no split penalty,
row subsampling per round, shrinkage by learning_rate. Binary margins
start at logit(0.5) = 0; multiclass goes one-vs-rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .base import TrainedLearner, register

_GAIN_EPS = 1e-12


@dataclass
class RegressionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # leaf weight, valid where feature < 0

    def predict(self, x: np.ndarray) -> np.ndarray:
        idx = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[idx]
            active = feat >= 0
            if not active.any():
                break
            rows = np.flatnonzero(active)
            go_left = x[rows, feat[rows]] <= self.threshold[idx[rows]]
            idx[rows] = np.where(go_left, self.left[idx[rows]], self.right[idx[rows]])
        return self.value[idx]

    def to_state(self) -> Dict[str, np.ndarray]:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_state(cls, state: Dict[str, np.ndarray]) -> "RegressionTree":
        return cls(
            feature=np.asarray(state["feature"], dtype=np.int64),
            threshold=np.asarray(state["threshold"], dtype=np.float64),
            left=np.asarray(state["left"], dtype=np.int64),
            right=np.asarray(state["right"], dtype=np.int64),
            value=np.asarray(state["value"], dtype=np.float64),
        )


def _leaf_weight(g_sum: float, h_sum: float, reg_lambda: float) -> float:
    return -g_sum / (h_sum + reg_lambda)


def _score(g_sum, h_sum, reg_lambda):
    return g_sum * g_sum / (h_sum + reg_lambda)


def _best_split(
    x: np.ndarray, g: np.ndarray, h: np.ndarray, reg_lambda: float
) -> Optional[Tuple[float, int, float]]:
    """Best (gain, feature, threshold); ties toward lower feature/threshold."""
    n, d = x.shape
    g_total, h_total = float(g.sum()), float(h.sum())
    parent_score = _score(g_total, h_total, reg_lambda)
    best: Optional[Tuple[float, int, float]] = None
    for j in range(d):
        vals = x[:, j]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        boundaries = np.flatnonzero(sv[:-1] < sv[1:])
        if boundaries.size == 0:
            continue
        g_cum = np.cumsum(g[order])
        h_cum = np.cumsum(h[order])
        gl, hl = g_cum[boundaries], h_cum[boundaries]
        gr, hr = g_total - gl, h_total - hl
        gain = 0.5 * (
            _score(gl, hl, reg_lambda) + _score(gr, hr, reg_lambda) - parent_score
        )
        pick = int(np.argmax(gain))
        if gain[pick] > _GAIN_EPS and (best is None or gain[pick] > best[0]):
            b = boundaries[pick]
            best = (float(gain[pick]), j, float((sv[b] + sv[b + 1]) / 2.0))
    return best


def grow_regression_tree(
    x: np.ndarray, g: np.ndarray, h: np.ndarray, max_depth: int, reg_lambda: float
) -> RegressionTree:
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[float] = []

    def build(rows: np.ndarray, depth: int) -> int:
        node_id = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(_leaf_weight(float(g[rows].sum()), float(h[rows].sum()), reg_lambda))
        if depth >= max_depth or rows.size < 2:
            return node_id
        found = _best_split(x[rows], g[rows], h[rows], reg_lambda)
        if found is None:
            return node_id
        _, j, thr = found
        mask = x[rows, j] <= thr
        feature[node_id] = j
        threshold[node_id] = thr
        left[node_id] = build(rows[mask], depth + 1)
        right[node_id] = build(rows[~mask], depth + 1)
        return node_id

    build(np.arange(x.shape[0]), 0)
    return RegressionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@register
class GradientBoostedTreesLearner(TrainedLearner):
    """Boosted binary classifier; each round fits a depth-capped tree to
    the log-loss gradient/hessian of a 70% row subsample."""

    KIND = "GradientBoostedTrees"
    BINARY_ONLY = True

    def __init__(self, spec):
        super().__init__(spec)
        self.trees: List[RegressionTree] = []
        self.base_margin: float = 0.0

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        n = x.shape[0]
        rounds = int(self.spec["n_estimators"])
        max_depth = int(self.spec["max_depth"])
        subsample = float(self.spec["subsample"])
        lr = float(self.spec["learning_rate"])
        reg_lambda = float(self.spec["reg_lambda"])
        target = y.astype(np.float64)

        self.base_margin = 0.0  # logit of the 0.5 base score
        margins = np.full(n, self.base_margin)
        self.trees = []
        for t in range(rounds):
            rng = np.random.default_rng([self.spec.seed, t])
            p = _sigmoid(margins)
            g = p - target
            h = np.maximum(p * (1.0 - p), 1e-16)
            m = max(1, int(round(subsample * n)))
            rows = np.sort(rng.choice(n, size=m, replace=False))
            tree = grow_regression_tree(x[rows], g[rows], h[rows], max_depth, reg_lambda)
            self.trees.append(tree)
            margins += lr * tree.predict(x)

    def _margins(self, x: np.ndarray) -> np.ndarray:
        lr = float(self.spec["learning_rate"])
        z = np.full(x.shape[0], self.base_margin)
        for tree in self.trees:
            z += lr * tree.predict(x)
        return z

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        p1 = _sigmoid(self._margins(x))
        return np.column_stack([1.0 - p1, p1])

    def training_log_loss_curve(self, x: np.ndarray, y: np.ndarray) -> List[float]:
        """Mean log-loss after each boosting round (diagnostics/tests)."""
        lr = float(self.spec["learning_rate"])
        target = np.asarray(y, dtype=np.float64)
        z = np.full(x.shape[0], self.base_margin)
        curve = []
        for tree in self.trees:
            z += lr * tree.predict(x)
            p = np.clip(_sigmoid(z), 1e-12, 1.0 - 1e-12)
            curve.append(float(-np.mean(target * np.log(p) + (1 - target) * np.log(1 - p))))
        return curve

    def _params_state(self) -> Dict[str, object]:
        return {
            "base_margin": self.base_margin,
            "trees": [t.to_state() for t in self.trees],
        }

    def _load_params(self, params: Dict[str, object]) -> None:
        self.base_margin = float(params["base_margin"])
        self.trees = [RegressionTree.from_state(s) for s in params["trees"]]
