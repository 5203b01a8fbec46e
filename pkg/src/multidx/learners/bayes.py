"""Gaussian naive Bayes with empirical priors."""

from __future__ import annotations

from typing import Dict

import numpy as np

from .base import TrainedLearner, register


@register
class GaussianNaiveBayesLearner(TrainedLearner):
    """Per-class per-feature normal likelihoods, variance floored."""

    KIND = "GaussianNaiveBayes"

    def __init__(self, spec):
        super().__init__(spec)
        self.means: np.ndarray = np.zeros((0, 0))
        self.variances: np.ndarray = np.zeros((0, 0))
        self.log_priors: np.ndarray = np.zeros(0)

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        var_floor = float(self.spec["var_floor"])
        k, d = self.n_classes, x.shape[1]
        self.means = np.zeros((k, d))
        self.variances = np.full((k, d), var_floor)
        priors = np.full(k, 1e-300)  # absent classes keep a vanishing prior
        for c in range(k):
            members = x[y == c]
            if members.shape[0] == 0:
                continue
            self.means[c] = members.mean(axis=0)
            self.variances[c] = np.maximum(members.var(axis=0), var_floor)
            priors[c] = members.shape[0] / x.shape[0]
        self.log_priors = np.log(priors)

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        # log N(x | mu, var) summed over features, per class
        diff = x[:, None, :] - self.means[None, :, :]
        log_like = -0.5 * (
            np.log(2.0 * np.pi * self.variances)[None, :, :]
            + diff * diff / self.variances[None, :, :]
        ).sum(axis=2)
        log_post = log_like + self.log_priors[None, :]
        log_post -= log_post.max(axis=1, keepdims=True)
        probs = np.exp(log_post)
        return probs / probs.sum(axis=1, keepdims=True)

    def _params_state(self) -> Dict[str, object]:
        return {
            "means": self.means,
            "variances": self.variances,
            "log_priors": self.log_priors,
        }

    def _load_params(self, params: Dict[str, object]) -> None:
        self.means = np.asarray(params["means"], dtype=np.float64)
        self.variances = np.asarray(params["variances"], dtype=np.float64)
        self.log_priors = np.asarray(params["log_priors"], dtype=np.float64)
