import numpy as np
import pytest

from multidx.learners import LearnerError, LearnerSpec
from multidx.stacking import (
    STACK_PRESETS,
    StackSpec,
    fit_stack,
    predict_stack,
    stack_preset,
    stratified_fold_ids,
)
from multidx.tabular import DataError, frame_from_arrays


def cheap_stack(base_kinds, meta_kind, seed=0, folds=5):
    fast = {
        "RandomForest": {"n_estimators": 15},
        "GradientBoostedTrees": {"n_estimators": 8, "max_depth": 3},
    }
    return StackSpec(
        base_specs=tuple(
            LearnerSpec(kind=k, hyperparameters=fast.get(k, {}), seed=seed)
            for k in base_kinds
        ),
        meta_spec=LearnerSpec(kind=meta_kind, hyperparameters=fast.get(meta_kind, {}), seed=seed),
        folds=folds,
        seed=seed,
    )


def blob_frame(n_per=30, separation=5.0, seed=0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(size=(n_per, 2)), rng.normal(size=(n_per, 2)) + separation])
    y = np.array([0] * n_per + [1] * n_per)
    return frame_from_arrays(x, labels=y)


class TestFitStack:
    def test_meta_width_three_binary_bases(self):
        frame = blob_frame()
        spec = cheap_stack(
            ["GaussianNaiveBayes", "KNearestNeighbors", "LogisticRegression"],
            "GaussianNaiveBayes",
        )
        model = fit_stack(spec, frame)
        assert model.meta_feature_width == 3

    def test_identical_bases_collapse_to_single_base_labels(self):
        frame = blob_frame(separation=2.0, seed=4)
        base = LearnerSpec(kind="GaussianNaiveBayes", seed=1)
        spec = StackSpec(base_specs=(base, base, base), meta_spec=base, folds=5, seed=1)
        model = fit_stack(spec, frame)
        _, stack_labels = predict_stack(model, frame)
        single = model.fitted_bases[0].predict_label(frame.values)
        assert np.array_equal(stack_labels, single)

    def test_base_error_carries_base_index(self):
        frame = blob_frame(n_per=4)
        bad = LearnerSpec(kind="SvmRbf")
        spec = StackSpec(base_specs=(bad, bad), meta_spec=bad, folds=2, seed=0)
        tiny = frame_from_arrays(frame.values[:3], labels=np.array([0, 1, 1]))
        with pytest.raises((LearnerError, DataError)):
            fit_stack(spec, tiny)

    def test_preset_exp31_configuration(self):
        spec = stack_preset("exp31", seed=0)
        kinds = [s.kind for s in spec.base_specs]
        assert kinds == ["RandomForest", "GradientBoostedTrees", "SvmRbf"]
        assert spec.meta_spec.kind == "GaussianNaiveBayes"

    def test_all_presets_resolvable(self):
        for name in STACK_PRESETS:
            spec = stack_preset(name)
            assert len(spec.base_specs) == 3

    def test_unknown_preset(self):
        with pytest.raises(DataError, match="unknown stack preset"):
            stack_preset("exp99")


class TestPredictStack:
    def test_linearly_separable_end_to_end(self):
        frame = blob_frame(separation=8.0, seed=2)
        spec = cheap_stack(
            ["LogisticRegression", "KNearestNeighbors", "DecisionTree"],
            "LogisticRegression",
        )
        model = fit_stack(spec, frame)
        _, labels = predict_stack(model, frame)
        assert np.array_equal(labels, frame.labels)

    def test_single_row_distribution(self):
        frame = blob_frame(seed=3)
        model = fit_stack(
            cheap_stack(["GaussianNaiveBayes", "KNearestNeighbors"], "LogisticRegression"),
            frame,
        )
        probs, labels = predict_stack(model, frame.values[:1])
        assert probs.shape == (1, 2)
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert labels.shape == (1,)

    def test_deterministic_predictions(self):
        frame = blob_frame(seed=6)
        model = fit_stack(
            cheap_stack(["GaussianNaiveBayes", "DecisionTree"], "GaussianNaiveBayes"),
            frame,
        )
        row = frame.values[5:6]
        p1, _ = predict_stack(model, row)
        p2, _ = predict_stack(model, row)
        assert np.array_equal(p1, p2)

    def test_width_mismatch_rejected(self):
        frame = blob_frame()
        model = fit_stack(
            cheap_stack(["GaussianNaiveBayes", "KNearestNeighbors"], "LogisticRegression"),
            frame,
        )
        with pytest.raises(LearnerError, match="width mismatch"):
            predict_stack(model, np.zeros((1, 9)))


class TestFoldAssignment:
    def test_every_row_held_out_exactly_once(self):
        labels = np.array([0] * 21 + [1] * 9)
        ids = stratified_fold_ids(labels, folds=5, seed=3)
        assert ids.size == 30
        assert set(ids.tolist()) == {0, 1, 2, 3, 4}
        for f in range(5):
            class1_in_fold = np.sum((ids == f) & (labels == 1))
            assert 1 <= class1_in_fold <= 2  # 9 positives over 5 folds

    def test_deterministic(self):
        labels = np.arange(40) % 2
        a = stratified_fold_ids(labels, 5, seed=1)
        b = stratified_fold_ids(labels, 5, seed=1)
        assert np.array_equal(a, b)


class TestStackingGain:
    def test_overlapping_gaussians_stack_close_to_best_base(self):
        # seed-swept mean: stacked test accuracy within 2 points of best base
        deltas = []
        for seed in range(10):
            rng = np.random.default_rng(seed)
            n = 300
            x = np.vstack([rng.normal(size=(n, 2)), rng.normal(size=(n, 2)) + 1.6])
            y = np.array([0] * n + [1] * n)
            order = rng.permutation(2 * n)
            x, y = x[order], y[order]
            x_train, y_train = x[:420], y[:420]
            x_test, y_test = x[420:], y[420:]
            spec = cheap_stack(
                ["RandomForest", "GradientBoostedTrees", "LogisticRegression"],
                "GaussianNaiveBayes",
                seed=seed,
            )
            frame = frame_from_arrays(x_train, labels=y_train)
            model = fit_stack(spec, frame)
            _, stack_labels = predict_stack(model, x_test)
            stack_acc = float((stack_labels == y_test).mean())
            base_accs = [
                float((b.predict_label(x_test) == y_test).mean())
                for b in model.fitted_bases
            ]
            deltas.append(stack_acc - max(base_accs))
        assert float(np.mean(deltas)) >= -0.02
