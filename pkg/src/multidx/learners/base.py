"""Learner specification, fitting entry points and shared machinery."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Type, Union

import numpy as np

from ..tabular import FeatureFrame

LEARNER_KINDS = (
    "LogisticRegression",
    "KNearestNeighbors",
    "SvmRbf",
    "GaussianNaiveBayes",
    "DecisionTree",
    "RandomForest",
    "GradientBoostedTrees",
)

# Paper-given defaults; anything not stated there is a documented choice.
DEFAULT_HYPERPARAMETERS: Dict[str, Dict[str, object]] = {
    "LogisticRegression": {"l2": 1.0, "max_iter": 10000, "tol": 1e-6},
    "KNearestNeighbors": {"k": 5, "p": 2},
    "SvmRbf": {"c": 1.0, "gamma": "scale", "kkt_tol": 1e-3},
    "GaussianNaiveBayes": {"var_floor": 1e-9},
    "DecisionTree": {"criterion": "entropy", "max_leaf_nodes": 300},
    "RandomForest": {"n_estimators": 1500, "criterion": "gini"},
    "GradientBoostedTrees": {
        "n_estimators": 25,
        "max_depth": 15,
        "subsample": 0.7,
        "learning_rate": 0.3,
        "reg_lambda": 1.0,
    },
}


class LearnerError(ValueError):
    """Raised for invalid learner configuration or unusable training data."""


@dataclass(frozen=True)
class LearnerSpec:
    """Which algorithm to fit, with what hyperparameters and seed."""

    kind: str
    hyperparameters: Dict[str, object] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in LEARNER_KINDS:
            raise LearnerError(f"unknown learner kind {self.kind!r}")
        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        for key, value in self.hyperparameters.items():
            if key not in merged:
                raise LearnerError(f"{self.kind} has no hyperparameter {key!r}")
            merged[key] = value
        object.__setattr__(self, "hyperparameters", merged)

    def __getitem__(self, key: str) -> object:
        return self.hyperparameters[key]

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, object]) -> "LearnerSpec":
        return cls(
            kind=str(d["kind"]),
            hyperparameters=dict(d["hyperparameters"]),
            seed=int(d["seed"]),
        )


Rows = Union[FeatureFrame, np.ndarray]


def as_matrix(rows: Rows) -> np.ndarray:
    if isinstance(rows, FeatureFrame):
        return rows.values
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    return x


class TrainedLearner:
    """A fitted classifier; immutable after fit.

    Subclasses implement _fit(X, y) and _predict_proba(X) on plain
    arrays; this base handles validation, shared bookkeeping and the
    binary one-vs-rest lift for learners that declare BINARY_ONLY.
    """

    KIND: str = ""
    BINARY_ONLY: bool = False

    def __init__(self, spec: LearnerSpec):
        self.spec = spec
        self.n_classes: int = 0
        self.n_features: int = 0
        self._ovr: Optional[List["TrainedLearner"]] = None

    # -- fitting ------------------------------------------------------------

    def fit(self, train: Rows, labels: Optional[np.ndarray] = None) -> "TrainedLearner":
        if isinstance(train, FeatureFrame):
            if train.labels is None:
                raise LearnerError("training frame must be labeled")
            x, y = train.values, train.labels
            n_classes = train.schema.n_classes
        else:
            if labels is None:
                raise LearnerError("labels required when fitting from arrays")
            x = as_matrix(train)
            y = np.asarray(labels, dtype=np.int64)
            n_classes = int(y.max()) + 1 if y.size else 0
        if np.isnan(x).any():
            raise LearnerError("training data must not contain missing cells")
        observed = np.unique(y)
        if observed.size < 2:
            raise LearnerError("degenerate labels: single-class training set")
        self.n_classes = max(n_classes, int(observed.max()) + 1)
        self.n_features = x.shape[1]
        if self.BINARY_ONLY and self.n_classes > 2:
            self._fit_ovr(x, y)
        else:
            self._fit(x, y)
        return self

    def _fit_ovr(self, x: np.ndarray, y: np.ndarray) -> None:
        self._ovr = []
        for c in range(self.n_classes):
            sub = type(self)(self.spec)
            sub.n_classes = 2
            sub.n_features = self.n_features
            sub._fit(x, (y == c).astype(np.int64))
            self._ovr.append(sub)

    # -- prediction ---------------------------------------------------------

    def predict_proba(self, rows: Rows) -> np.ndarray:
        x = as_matrix(rows)
        if x.shape[1] != self.n_features:
            raise LearnerError(
                f"width mismatch: model expects {self.n_features} features, got {x.shape[1]}"
            )
        if self._ovr is not None:
            scores = np.column_stack([sub._predict_proba(x)[:, 1] for sub in self._ovr])
            total = scores.sum(axis=1, keepdims=True)
            uniform = np.full_like(scores, 1.0 / self.n_classes)
            probs = np.where(total > 0, scores / np.where(total > 0, total, 1.0), uniform)
        else:
            probs = self._predict_proba(x)
        return probs

    def predict_label(self, rows: Rows) -> np.ndarray:
        return np.argmax(self.predict_proba(rows), axis=1)

    def _fit(self, x: np.ndarray, y: np.ndarray) -> None:
        raise NotImplementedError

    def _predict_proba(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- serialization ------------------------------------------------------

    def to_state(self) -> Dict[str, object]:
        state: Dict[str, object] = {
            "spec": self.spec.to_dict(),
            "n_classes": self.n_classes,
            "n_features": self.n_features,
        }
        if self._ovr is not None:
            state["ovr"] = [sub.to_state() for sub in self._ovr]
        else:
            state["params"] = self._params_state()
        return state

    @classmethod
    def from_state(cls, state: Dict[str, object]) -> "TrainedLearner":
        spec = LearnerSpec.from_dict(state["spec"])
        model = cls(spec)
        model.n_classes = int(state["n_classes"])
        model.n_features = int(state["n_features"])
        if "ovr" in state:
            model._ovr = [cls.from_state(s) for s in state["ovr"]]
        else:
            model._load_params(state["params"])
        return model

    def _params_state(self) -> Dict[str, object]:
        raise NotImplementedError

    def _load_params(self, params: Dict[str, object]) -> None:
        raise NotImplementedError


_REGISTRY: Dict[str, Type[TrainedLearner]] = {}


def register(cls: Type[TrainedLearner]) -> Type[TrainedLearner]:
    _REGISTRY[cls.KIND] = cls
    return cls


def make_learner(spec: LearnerSpec) -> TrainedLearner:
    from . import bayes, boosting, forest, linear, neighbors, svm, tree  # noqa: F401

    return _REGISTRY[spec.kind](spec)


def fit(spec: LearnerSpec, train: Rows, labels: Optional[np.ndarray] = None) -> TrainedLearner:
    """Fit the learner described by `spec` on a labeled frame (or arrays)."""
    return make_learner(spec).fit(train, labels)


def learner_from_state(state: Dict[str, object]) -> TrainedLearner:
    from . import bayes, boosting, forest, linear, neighbors, svm, tree  # noqa: F401

    kind = str(state["spec"]["kind"])
    return _REGISTRY[kind].from_state(state)


def predict_proba(model: TrainedLearner, rows: Rows) -> np.ndarray:
    return model.predict_proba(rows)


def predict_label(model: TrainedLearner, rows: Rows) -> np.ndarray:
    return model.predict_label(rows)
