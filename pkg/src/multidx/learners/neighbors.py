"""K-nearest-neighbors classifier (lazy: stores the training set)."""

from __future__ import annotations

from typing import Dict

import numpy as np

from .base import TrainedLearner, register


@register
class KNearestNeighborsLearner(TrainedLearner):
    """Minkowski-distance voting; probability = neighbor class fraction.

    Distance ties break toward the lower training-row index. k is
    clamped to the training-set size.
    """

    KIND = "KNearestNeighbors"

    def __init__(self, spec):
        super().__init__(spec)
        self.train_x: np.ndarray = np.zeros((0, 0))
        self.train_y: np.ndarray = np.zeros(0, dtype=np.int64)

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        self.train_x = x.copy()
        self.train_y = y.copy()

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        k = min(int(self.spec["k"]), self.train_x.shape[0])
        p = float(self.spec["p"])
        diff = np.abs(x[:, None, :] - self.train_x[None, :, :])
        if p == 2:
            dist = np.sqrt(np.sum(diff * diff, axis=2))
        else:
            dist = np.sum(diff**p, axis=2) ** (1.0 / p)
        order = np.argsort(dist, axis=1, kind="stable")[:, :k]
        probs = np.zeros((x.shape[0], self.n_classes))
        for i in range(x.shape[0]):
            counts = np.bincount(self.train_y[order[i]], minlength=self.n_classes)
            probs[i] = counts / k
        return probs

    def _params_state(self) -> Dict[str, object]:
        return {"train_x": self.train_x, "train_y": self.train_y}

    def _load_params(self, params: Dict[str, object]) -> None:
        self.train_x = np.asarray(params["train_x"], dtype=np.float64)
        self.train_y = np.asarray(params["train_y"], dtype=np.int64)
