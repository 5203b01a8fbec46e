"""Random forest: bagged gini trees with sqrt(d) features per split."""

from __future__ import annotations

import math
from typing import Dict, List

import numpy as np

from .base import TrainedLearner, register
from .tree import Tree, grow_tree


@register
class RandomForestLearner(TrainedLearner):
    """n_estimators bootstrap trees; probability = mean leaf distribution.

    Tree i draws its bootstrap sample and per-node feature subsets from a
    generator seeded by (spec.seed, i), so fitting the trees in any order
    (or in parallel) yields the same forest.
    """

    KIND = "RandomForest"

    def __init__(self, spec):
        super().__init__(spec)
        self.trees: List[Tree] = []

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        n, d = x.shape
        n_estimators = int(self.spec["n_estimators"])
        criterion = str(self.spec["criterion"])
        max_features = max(1, int(math.isqrt(d)))
        self.trees = []
        for t in range(n_estimators):
            rng = np.random.default_rng([self.spec.seed, t])
            sample = rng.integers(0, n, size=n)
            self.trees.append(
                grow_tree(
                    x[sample],
                    y[sample],
                    self.n_classes,
                    criterion=criterion,
                    max_features=max_features,
                    rng=rng,
                )
            )

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        acc = np.zeros((x.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict_dist(x)
        return acc / len(self.trees)

    def _params_state(self) -> Dict[str, object]:
        return {"trees": [t.to_state() for t in self.trees]}

    def _load_params(self, params: Dict[str, object]) -> None:
        self.trees = [Tree.from_state(s) for s in params["trees"]]
