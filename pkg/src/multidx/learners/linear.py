"""L2-regularized logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

from typing import Dict

import numpy as np

from .base import TrainedLearner, register


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@register
class LogisticRegressionLearner(TrainedLearner):
    """Sigmoid classifier on a linear score, one-vs-rest beyond two classes.

    Full-batch gradient descent on mean log-loss plus (l2 / 2n) ||w||^2,
    bias unregularized. The step size is 1/L with L the Lipschitz bound
    of the gradient, so descent is monotone; iteration stops once the
    gradient sup-norm drops below tol or max_iter is hit.
    """

    KIND = "LogisticRegression"
    BINARY_ONLY = True

    def __init__(self, spec):
        super().__init__(spec)
        self.weights: np.ndarray = np.zeros(0)
        self.bias: float = 0.0

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        n, d = x.shape
        l2 = float(self.spec["l2"])
        max_iter = int(self.spec["max_iter"])
        tol = float(self.spec["tol"])
        target = y.astype(np.float64)

        augmented = np.column_stack([x, np.ones(n)])
        spectral_sq = float(np.linalg.eigvalsh(augmented.T @ augmented).max())
        lipschitz = spectral_sq / (4.0 * n) + l2 / n
        step = 1.0 / lipschitz

        w = np.zeros(d)
        b = 0.0
        for _ in range(max_iter):
            p = _sigmoid(x @ w + b)
            residual = p - target
            grad_w = x.T @ residual / n + (l2 / n) * w
            grad_b = float(residual.mean())
            if max(np.abs(grad_w).max(initial=0.0), abs(grad_b)) < tol:
                break
            w -= step * grad_w
            b -= step * grad_b
        self.weights = w
        self.bias = b

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        p1 = _sigmoid(x @ self.weights + self.bias)
        return np.column_stack([1.0 - p1, p1])

    def _params_state(self) -> Dict[str, object]:
        return {"weights": self.weights, "bias": self.bias}

    def _load_params(self, params: Dict[str, object]) -> None:
        self.weights = np.asarray(params["weights"], dtype=np.float64)
        self.bias = float(params["bias"])
