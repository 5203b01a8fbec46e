import json

import pytest
from hypothesis import given, strategies as st

from multidx.metrics import ConfusionMatrix, compute_metrics, confusion


def test_confusion_perfect_prediction_has_no_errors():
    cm = confusion([0, 1, 1, 0], [0, 1, 1, 0], positive_class=1)
    assert cm.fp == 0 and cm.fn == 0
    assert cm.tp == 2 and cm.tn == 2


def test_confusion_hand_tally():
    # true=[1,1,0,0], pred=[1,0,0,1]: one hit, one miss, one reject, one false alarm
    cm = confusion([1, 1, 0, 0], [1, 0, 0, 1], positive_class=1)
    assert (cm.tp, cm.fn, cm.tn, cm.fp) == (1, 1, 1, 1)


def test_confusion_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        confusion([], [], positive_class=1)
    with pytest.raises(ValueError, match="mismatch"):
        confusion([1, 0], [1], positive_class=1)


def test_metrics_hand_evaluation():
    # acc=(3+5)/10, P=3/4, R=3/4, F1=2*0.75*0.75/1.5
    report = compute_metrics(ConfusionMatrix(tp=3, fp=1, fn=1, tn=5))
    assert report.accuracy == pytest.approx(0.8, abs=1e-12)
    assert report.precision == pytest.approx(0.75, abs=1e-12)
    assert report.recall == pytest.approx(0.75, abs=1e-12)
    assert report.f1 == pytest.approx(0.75, abs=1e-12)


def test_metrics_perfect_classifier():
    report = compute_metrics(ConfusionMatrix(tp=7, fp=0, fn=0, tn=0))
    assert report.accuracy == report.precision == report.recall == report.f1 == 1.0


def test_metrics_undefined_precision_flag():
    report = compute_metrics(ConfusionMatrix(tp=0, fp=0, fn=3, tn=2))
    assert report.precision is None
    assert report.recall == 0.0
    assert report.f1 is None


def test_json_report_fixed_keys_with_null():
    report = compute_metrics(ConfusionMatrix(tp=0, fp=0, fn=3, tn=2))
    payload = json.loads(report.to_json())
    assert sorted(payload) == ["accuracy", "f1", "precision", "recall"]
    assert payload["precision"] is None


counts = st.integers(min_value=0, max_value=200)


@given(tp=counts, tn=counts, fp=counts, fn=counts)
def test_f1_between_precision_and_recall(tp, tn, fp, fn):
    if tp + tn + fp + fn == 0:
        return
    r = compute_metrics(ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn))
    if r.precision is None or r.recall is None or r.f1 is None:
        return
    assert min(r.precision, r.recall) - 1e-12 <= r.f1 <= max(r.precision, r.recall) + 1e-12
    assert r.f1 <= (r.precision + r.recall) / 2 + 1e-12


@given(
    st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=60),
    st.permutations([0, 1, 2]),
)
def test_metrics_invariant_under_label_permutation(pairs, perm):
    true = [t for t, _ in pairs]
    pred = [p for _, p in pairs]
    base = compute_metrics(confusion(true, pred, positive_class=1))
    remapped = compute_metrics(
        confusion([perm[t] for t in true], [perm[p] for p in pred], positive_class=perm[1])
    )
    assert base == remapped
