"""RBF-kernel SVM trained by sequential minimal optimization.

The dual is solved pairwise (Platt's SMO with an error cache and the
standard second-choice heuristics); probabilities come from a sigmoid
fit to the training decision values (Platt scaling, Newton iteration
with backtracking). gamma follows the 1 / (d * Var(X)) convention.
"""

from __future__ import annotations

import math
from typing import Dict, Tuple

import numpy as np

from .base import TrainedLearner, register

_ALPHA_EPS = 1e-12


def _rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    sq = np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)
    return np.exp(-gamma * sq)


class _SmoSolver:
    """Pairwise dual ascent until no example violates KKT beyond tol."""

    def __init__(self, k: np.ndarray, y: np.ndarray, c: float, tol: float, rng: np.random.Generator):
        self.k = k
        self.y = y.astype(np.float64)
        self.c = c
        self.tol = tol
        self.rng = rng
        self.n = y.size
        self.alphas = np.zeros(self.n)
        self.b = 0.0
        self.errors = -self.y.copy()  # u - y with all alphas 0, b 0
        self.steps = 0
        self.max_steps = max(200_000, 1_000 * self.n)

    def _refresh_errors(self) -> None:
        self.errors = (self.alphas * self.y) @ self.k - self.b - self.y

    def solve(self) -> Tuple[np.ndarray, float]:
        num_changed = 0
        examine_all = True
        while (num_changed > 0 or examine_all) and self.steps < self.max_steps:
            num_changed = 0
            if examine_all:
                for i in range(self.n):
                    num_changed += self._examine(i)
            else:
                for i in np.flatnonzero(
                    (self.alphas > _ALPHA_EPS) & (self.alphas < self.c - _ALPHA_EPS)
                ):
                    num_changed += self._examine(int(i))
            self._refresh_errors()  # kill incremental-update drift each pass
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
        return self.alphas, self.b

    def _examine(self, i2: int) -> int:
        y2 = self.y[i2]
        alph2 = self.alphas[i2]
        e2 = self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and alph2 < self.c) or (r2 > self.tol and alph2 > 0)):
            return 0
        non_bound = np.flatnonzero(
            (self.alphas > _ALPHA_EPS) & (self.alphas < self.c - _ALPHA_EPS)
        )
        if non_bound.size > 1:
            gaps = np.abs(self.errors[non_bound] - e2)
            i1 = int(non_bound[np.argmax(gaps)])
            if self._take_step(i1, i2):
                return 1
        if non_bound.size:
            start = int(self.rng.integers(0, non_bound.size))
            for offset in range(non_bound.size):
                i1 = int(non_bound[(start + offset) % non_bound.size])
                if self._take_step(i1, i2):
                    return 1
        start = int(self.rng.integers(0, self.n))
        for offset in range(self.n):
            i1 = (start + offset) % self.n
            if self._take_step(i1, i2):
                return 1
        return 0

    def _take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        alph1, alph2 = self.alphas[i1], self.alphas[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s > 0:
            lo = max(0.0, alph2 + alph1 - self.c)
            hi = min(self.c, alph2 + alph1)
        else:
            lo = max(0.0, alph2 - alph1)
            hi = min(self.c, self.c + alph2 - alph1)
        if lo == hi:
            return False
        k11 = self.k[i1, i1]
        k12 = self.k[i1, i2]
        k22 = self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = alph2 + y2 * (e1 - e2) / eta
            a2 = min(max(a2, lo), hi)
        else:
            # evaluate the objective at both clip ends
            f1 = y1 * (e1 + self.b) - alph1 * k11 - s * alph2 * k12
            f2 = y2 * (e2 + self.b) - s * alph1 * k12 - alph2 * k22
            l1 = alph1 + s * (alph2 - lo)
            h1 = alph1 + s * (alph2 - hi)
            lobj = (
                l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12
            )
            hobj = (
                h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12
            )
            if lobj < hobj - _ALPHA_EPS:
                a2 = lo
            elif lobj > hobj + _ALPHA_EPS:
                a2 = hi
            else:
                a2 = alph2
        if abs(a2 - alph2) < _ALPHA_EPS * (a2 + alph2 + _ALPHA_EPS):
            return False
        a1 = alph1 + s * (alph2 - a2)

        b1 = e1 + y1 * (a1 - alph1) * k11 + y2 * (a2 - alph2) * k12 + self.b
        b2 = e2 + y1 * (a1 - alph1) * k12 + y2 * (a2 - alph2) * k22 + self.b
        if _ALPHA_EPS < a1 < self.c - _ALPHA_EPS:
            new_b = b1
        elif _ALPHA_EPS < a2 < self.c - _ALPHA_EPS:
            new_b = b2
        else:
            new_b = (b1 + b2) / 2.0

        delta1 = y1 * (a1 - alph1)
        delta2 = y2 * (a2 - alph2)
        self.errors += delta1 * self.k[i1] + delta2 * self.k[i2] + (self.b - new_b)
        self.alphas[i1] = a1
        self.alphas[i2] = a2
        self.b = new_b
        self.steps += 1
        return True


def fit_platt_sigmoid(decision: np.ndarray, labels: np.ndarray) -> Tuple[float, float]:
    """Fit P(y=1 | f) = 1 / (1 + exp(A f + B)) by regularized Newton.

    Standard robust formulation: smoothed targets, backtracking line
    search, log-domain evaluation.
    """
    prior1 = int(np.sum(labels == 1))
    prior0 = labels.size - prior1
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(labels == 1, hi, lo)

    a, b = 0.0, math.log((prior0 + 1.0) / (prior1 + 1.0))
    sigma = 1e-12
    max_iter = 200
    min_step = 1e-10

    def objective(av: float, bv: float) -> float:
        fapb = decision * av + bv
        pos = fapb >= 0
        val = np.where(
            pos,
            t * fapb + np.log1p(np.exp(-fapb)),
            (t - 1.0) * fapb + np.log1p(np.exp(fapb)),
        )
        return float(val.sum())

    fval = objective(a, b)
    for _ in range(max_iter):
        fapb = decision * a + b
        pos = fapb >= 0
        p = np.where(pos, np.exp(-fapb) / (1.0 + np.exp(-fapb)), 1.0 / (1.0 + np.exp(fapb)))
        q = 1.0 - p
        d1 = t - p
        d2 = p * q
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(decision * d2))
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            new_a, new_b = a + step * da, b + step * db
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                a, b, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return a, b


@register
class SvmRbfLearner(TrainedLearner):
    """Soft-margin RBF SVM with sigmoid-calibrated probabilities."""

    KIND = "SvmRbf"
    BINARY_ONLY = True

    def __init__(self, spec):
        super().__init__(spec)
        self.support_vectors: np.ndarray = np.zeros((0, 0))
        self.dual_coef: np.ndarray = np.zeros(0)  # alpha_i * y_i at support vectors
        self.intercept: float = 0.0
        self.gamma_value: float = 1.0
        self.platt_a: float = 0.0
        self.platt_b: float = 0.0

    def _resolve_gamma(self, x: np.ndarray) -> float:
        gamma = self.spec["gamma"]
        if gamma == "scale":
            var = float(x.var())
            return 1.0 / (x.shape[1] * var) if var > 0 else 1.0
        return float(gamma)

    def _fit(self, x: np.ndarray, y01: np.ndarray) -> None:
        c = float(self.spec["c"])
        tol = float(self.spec["kkt_tol"])
        self.gamma_value = self._resolve_gamma(x)
        y = np.where(y01 == 1, 1.0, -1.0)
        kernel = _rbf_kernel(x, x, self.gamma_value)
        solver = _SmoSolver(kernel, y, c, tol, np.random.default_rng(self.spec.seed))
        alphas, b = solver.solve()

        support = alphas > _ALPHA_EPS
        self.support_vectors = x[support].copy()
        self.dual_coef = (alphas * y)[support]
        self.intercept = b
        decision = self.decision_function(x)
        self.platt_a, self.platt_b = fit_platt_sigmoid(decision, y01)

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        """u(x) = sum_i alpha_i y_i K(sv_i, x) - b."""
        if self.support_vectors.shape[0] == 0:
            return np.full(x.shape[0], -self.intercept)
        k = _rbf_kernel(np.asarray(x, dtype=np.float64), self.support_vectors, self.gamma_value)
        return k @ self.dual_coef - self.intercept

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        fapb = self.decision_function(x) * self.platt_a + self.platt_b
        p1 = np.where(
            fapb >= 0,
            np.exp(-fapb) / (1.0 + np.exp(-fapb)),
            1.0 / (1.0 + np.exp(fapb)),
        )
        return np.column_stack([1.0 - p1, p1])

    def _params_state(self) -> Dict[str, object]:
        return {
            "support_vectors": self.support_vectors,
            "dual_coef": self.dual_coef,
            "intercept": self.intercept,
            "gamma_value": self.gamma_value,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    def _load_params(self, params: Dict[str, object]) -> None:
        self.support_vectors = np.asarray(params["support_vectors"], dtype=np.float64)
        self.dual_coef = np.asarray(params["dual_coef"], dtype=np.float64)
        self.intercept = float(params["intercept"])
        self.gamma_value = float(params["gamma_value"])
        self.platt_a = float(params["platt_a"])
        self.platt_b = float(params["platt_b"])
