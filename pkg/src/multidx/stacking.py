"""Two-layer stacked generalization.

Base learners produce out-of-fold probabilities over a stratified k-fold
of the training set; those probabilities (per-base positive-class
columns for binary tasks, classes 1..K-1 otherwise) train the
meta-learner. Bases are then refit on the full training set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .learners import LearnerError, LearnerSpec, TrainedLearner, fit, learner_from_state
from .tabular import DataError, FeatureFrame

STACK_PRESETS = {
    "exp1": (("RandomForest", "GradientBoostedTrees", "SvmRbf"), "GaussianNaiveBayes"),
    "exp2": (("RandomForest", "GradientBoostedTrees", "DecisionTree"), "LogisticRegression"),
    "exp31": (("RandomForest", "GradientBoostedTrees", "SvmRbf"), "GaussianNaiveBayes"),
    "exp32": (("RandomForest", "GradientBoostedTrees", "KNearestNeighbors"), "GaussianNaiveBayes"),
    "exp61": (("RandomForest", "GradientBoostedTrees", "SvmRbf"), "RandomForest"),
    "exp62": (("RandomForest", "GradientBoostedTrees", "SvmRbf"), "RandomForest"),
}


@dataclass(frozen=True)
class StackSpec:
    """Ordered base learner specs plus the meta-learner spec."""

    base_specs: Tuple[LearnerSpec, ...]
    meta_spec: LearnerSpec
    folds: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_specs", tuple(self.base_specs))
        if len(self.base_specs) < 2:
            raise DataError("a stack needs at least two base learners")
        if self.folds < 2:
            raise DataError("out-of-fold stacking needs at least 2 folds")

    def to_dict(self) -> Dict[str, object]:
        return {
            "base_specs": [s.to_dict() for s in self.base_specs],
            "meta_spec": self.meta_spec.to_dict(),
            "folds": self.folds,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, object]) -> "StackSpec":
        return cls(
            base_specs=tuple(LearnerSpec.from_dict(s) for s in d["base_specs"]),
            meta_spec=LearnerSpec.from_dict(d["meta_spec"]),
            folds=int(d["folds"]),
            seed=int(d["seed"]),
        )


def stack_preset(name: str, seed: int = 0, folds: int = 5) -> StackSpec:
    """Named base/meta configurations matching the published experiments."""
    if name not in STACK_PRESETS:
        raise DataError(f"unknown stack preset {name!r}; have {sorted(STACK_PRESETS)}")
    base_kinds, meta_kind = STACK_PRESETS[name]
    return StackSpec(
        base_specs=tuple(LearnerSpec(kind=k, seed=seed) for k in base_kinds),
        meta_spec=LearnerSpec(kind=meta_kind, seed=seed),
        folds=folds,
        seed=seed,
    )


@dataclass
class StackedModel:
    """Fitted bases (full-data refit) plus the fitted meta-learner."""

    spec: StackSpec
    fitted_bases: List[TrainedLearner]
    fitted_meta: TrainedLearner
    meta_feature_width: int
    n_classes: int

    def to_state(self) -> Dict[str, object]:
        return {
            "spec": self.spec.to_dict(),
            "bases": [b.to_state() for b in self.fitted_bases],
            "meta": self.fitted_meta.to_state(),
            "meta_feature_width": self.meta_feature_width,
            "n_classes": self.n_classes,
        }

    @classmethod
    def from_state(cls, state: Dict[str, object]) -> "StackedModel":
        return cls(
            spec=StackSpec.from_dict(state["spec"]),
            fitted_bases=[learner_from_state(s) for s in state["bases"]],
            fitted_meta=learner_from_state(state["meta"]),
            meta_feature_width=int(state["meta_feature_width"]),
            n_classes=int(state["n_classes"]),
        )


def stratified_fold_ids(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Per-row fold assignment, class-balanced and seed-deterministic."""
    rng = np.random.default_rng(seed)
    fold_ids = np.zeros(labels.size, dtype=np.int64)
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        members = members[rng.permutation(members.size)]
        fold_ids[members] = np.arange(members.size) % folds
    return fold_ids


def _meta_features(base_probs: Sequence[np.ndarray], n_classes: int) -> np.ndarray:
    """Concatenate per-base probability columns for classes 1..K-1."""
    return np.column_stack([p[:, 1:n_classes] for p in base_probs])


def fit_stack(spec: StackSpec, train: FeatureFrame) -> StackedModel:
    """Fit the two-layer stack on a labeled, preprocessed frame."""
    if train.labels is None:
        raise DataError("stacking requires a labeled frame")
    x, y = train.values, train.labels
    n_classes = train.schema.n_classes
    folds = min(spec.folds, int(np.bincount(y, minlength=n_classes)[np.unique(y)].min()))
    if folds < 2:
        raise DataError("not enough samples per class for out-of-fold stacking")

    fold_ids = stratified_fold_ids(y, folds, spec.seed)
    oof = [np.zeros((x.shape[0], n_classes)) for _ in spec.base_specs]
    filled = np.zeros(x.shape[0], dtype=bool)
    for f in range(folds):
        holdout = fold_ids == f
        for b, base_spec in enumerate(spec.base_specs):
            try:
                model = fit(base_spec, x[~holdout], y[~holdout])
            except LearnerError as exc:
                raise LearnerError(f"base {b} ({base_spec.kind}): {exc}") from exc
            oof[b][holdout] = model.predict_proba(x[holdout])
        filled |= holdout
    assert filled.all(), "out-of-fold matrix has gaps"

    meta_x = _meta_features(oof, n_classes)
    try:
        fitted_meta = fit(spec.meta_spec, meta_x, y)
    except LearnerError as exc:
        raise LearnerError(f"meta ({spec.meta_spec.kind}): {exc}") from exc

    fitted_bases: List[TrainedLearner] = []
    for b, base_spec in enumerate(spec.base_specs):
        try:
            fitted_bases.append(fit(base_spec, x, y))
        except LearnerError as exc:
            raise LearnerError(f"base {b} ({base_spec.kind}): {exc}") from exc

    return StackedModel(
        spec=spec,
        fitted_bases=fitted_bases,
        fitted_meta=fitted_meta,
        meta_feature_width=meta_x.shape[1],
        n_classes=n_classes,
    )


def stack_meta_features(model: StackedModel, x: np.ndarray) -> np.ndarray:
    base_probs = [base.predict_proba(x) for base in model.fitted_bases]
    return _meta_features(base_probs, model.n_classes)


def predict_stack(model: StackedModel, rows) -> Tuple[np.ndarray, np.ndarray]:
    """(probabilities, labels) for a frame or plain matrix."""
    x = rows.values if isinstance(rows, FeatureFrame) else np.asarray(rows, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    meta_x = stack_meta_features(model, x)
    probs = model.fitted_meta.predict_proba(meta_x)
    return probs, np.argmax(probs, axis=1)
