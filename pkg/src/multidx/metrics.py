"""Confusion-matrix statistics: accuracy, precision, recall, F1."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts for a designated positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")
        if self.total < 1:
            raise ValueError("confusion matrix must count at least one sample")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """Accuracy/precision/recall/F1 in [0, 1]; None marks an undefined metric.

    A metric is undefined when its denominator is zero (for instance
    precision with no positive predictions). Undefined values are carried
    as explicit None instead of NaN so downstream tables stay sane.
    """

    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]

    def to_json(self) -> str:
        """Serialize with the four fixed keys; undefined becomes null."""
        return json.dumps(
            {
                "accuracy": self.accuracy,
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
            }
        )


def confusion(
    labels_true: Sequence[int],
    labels_pred: Sequence[int],
    positive_class: int = 1,
) -> ConfusionMatrix:
    """Tally TP/TN/FP/FN of `labels_pred` against `labels_true`.

    Any class other than `positive_class` counts as negative, so the same
    tally works for binary and one-vs-rest multiclass evaluation.
    """
    if len(labels_true) != len(labels_pred):
        raise ValueError(
            f"length mismatch: {len(labels_true)} true vs {len(labels_pred)} predicted"
        )
    if len(labels_true) == 0:
        raise ValueError("cannot tally an empty label list")
    tp = tn = fp = fn = 0
    for t, p in zip(labels_true, labels_pred):
        t_pos = t == positive_class
        p_pos = p == positive_class
        if t_pos and p_pos:
            tp += 1
        elif t_pos:
            fn += 1
        elif p_pos:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Evaluate accuracy, precision, recall and F1 from confusion counts.

    accuracy = (TP+TN)/total, precision = TP/(TP+FP), recall = TP/(TP+FN),
    F1 = 2PR/(P+R). Zero denominators yield None rather than NaN.
    """
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if (cm.tp + cm.fp) > 0 else None
    recall = cm.tp / (cm.tp + cm.fn) if (cm.tp + cm.fn) > 0 else None
    f1: Optional[float]
    if precision is None or recall is None or (precision + recall) == 0.0:
        f1 = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricsReport(accuracy=accuracy, precision=precision, recall=recall, f1=f1)
