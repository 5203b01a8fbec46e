"""Tabular dataset handling: ingest, clean, balance, scale, split, analyze.

A FeatureFrame is a rectangular float64 matrix (NaN marks a missing cell)
plus a schema and optional integer class labels. All operations are pure:
they never mutate their inputs and are deterministic given their seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

FEATURE_KINDS = ("numeric", "categorical", "binary")


class DataError(ValueError):
    """Raised when a dataset violates a structural precondition."""


@dataclass(frozen=True)
class FeatureSchema:
    """Column names/kinds, the label column name and the class vocabulary."""

    feature_names: Tuple[str, ...]
    feature_kinds: Tuple[str, ...]
    label_name: str
    class_names: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "feature_kinds", tuple(self.feature_kinds))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if len(self.feature_names) != len(self.feature_kinds):
            raise DataError("feature_names and feature_kinds length differ")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DataError("feature names must be unique")
        for kind in self.feature_kinds:
            if kind not in FEATURE_KINDS:
                raise DataError(f"unknown feature kind {kind!r}")
        if self.label_name in self.feature_names:
            raise DataError("label column must not be among the features")
        if len(self.class_names) < 2:
            raise DataError("need at least two class names")
        if len(set(self.class_names)) != len(self.class_names):
            raise DataError("class names must be unique")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def to_dict(self) -> Dict[str, object]:
        return {
            "feature_names": list(self.feature_names),
            "feature_kinds": list(self.feature_kinds),
            "label_name": self.label_name,
            "class_names": list(self.class_names),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, object]) -> "FeatureSchema":
        return cls(
            feature_names=tuple(d["feature_names"]),
            feature_kinds=tuple(d["feature_kinds"]),
            label_name=str(d["label_name"]),
            class_names=tuple(d["class_names"]),
        )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeatureFrame:
    """Immutable sample matrix with schema and optional labels.

    `values` is row-major float64, one row per sample; NaN = missing.
    `labels`, when present, holds one class index per row.
    `categories` optionally maps a categorical column name to its category
    labels (first-appearance order), as recorded by the CSV reader.
    """

    schema: FeatureSchema
    values: np.ndarray
    labels: Optional[np.ndarray] = None
    categories: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError("values must be a 2-d matrix")
        if values.shape[1] != self.schema.n_features:
            raise DataError(
                f"row width {values.shape[1]} does not match schema width "
                f"{self.schema.n_features}"
            )
        object.__setattr__(self, "values", _frozen(values))
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (values.shape[0],):
                raise DataError("labels must have one entry per row")
            if labels.size and (labels.min() < 0 or labels.max() >= self.schema.n_classes):
                raise DataError("label index outside class_names range")
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.values.shape[1])

    def has_missing(self) -> bool:
        return bool(np.isnan(self.values).any())

    def take(self, indices: Sequence[int]) -> "FeatureFrame":
        idx = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx].copy()
        return replace(self, values=self.values[idx].copy(), labels=labels)

    def with_values(self, values: np.ndarray) -> "FeatureFrame":
        return replace(self, values=values)


def frame_from_arrays(
    values: np.ndarray,
    labels: Optional[np.ndarray] = None,
    feature_names: Optional[Sequence[str]] = None,
    class_names: Sequence[str] = ("0", "1"),
    label_name: str = "label",
) -> FeatureFrame:
    """Wrap a plain matrix in a FeatureFrame with an all-numeric schema."""
    values = np.asarray(values, dtype=np.float64)
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(values.shape[1]))
    schema = FeatureSchema(
        feature_names=tuple(feature_names),
        feature_kinds=tuple("numeric" for _ in feature_names),
        label_name=label_name,
        class_names=tuple(class_names),
    )
    return FeatureFrame(schema=schema, values=values, labels=labels)


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions plus seed; validation may be 0."""

    train_fraction: float
    validation_fraction: float = 0.0
    seed: int = 0
    stratified: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.train_fraction < 1.0):
            raise DataError("train_fraction must lie in (0, 1)")
        if not (0.0 <= self.validation_fraction < 1.0):
            raise DataError("validation_fraction must lie in [0, 1)")
        if self.train_fraction + self.validation_fraction >= 1.0:
            raise DataError("train + validation fractions must leave room for test")


# ---------------------------------------------------------------------------
# One-hot encoding
# ---------------------------------------------------------------------------

def encode_one_hot(frame: FeatureFrame) -> FeatureFrame:
    """Replace each categorical column with one binary column per category.

    Category order is first-appearance order down the rows. Missing
    categorical cells stay missing in every derived column.
    """
    if frame.n_rows == 0:
        raise DataError("empty dataset")
    if "categorical" not in frame.schema.feature_kinds:
        return frame

    new_names: List[str] = []
    new_kinds: List[str] = []
    new_cols: List[np.ndarray] = []
    new_categories: Dict[str, Tuple[str, ...]] = dict(frame.categories)
    for j, (name, kind) in enumerate(
        zip(frame.schema.feature_names, frame.schema.feature_kinds)
    ):
        col = frame.values[:, j]
        if kind != "categorical":
            new_names.append(name)
            new_kinds.append(kind)
            new_cols.append(col.copy())
            continue
        observed = col[~np.isnan(col)]
        if observed.size == 0:
            raise DataError(f"categorical column {name!r} has no observed values")
        cats: List[float] = []
        for v in observed:
            if v not in cats:
                cats.append(float(v))
        labels = frame.categories.get(name)
        for ci, cat in enumerate(cats):
            if labels is not None and 0 <= int(cat) < len(labels):
                cat_label = labels[int(cat)]
            else:
                cat_label = format(cat, "g")
            derived = np.where(col == cat, 1.0, 0.0)
            derived[np.isnan(col)] = np.nan
            new_names.append(f"{name}={cat_label}")
            new_kinds.append("binary")
            new_cols.append(derived)
        new_categories.pop(name, None)

    schema = FeatureSchema(
        feature_names=tuple(new_names),
        feature_kinds=tuple(new_kinds),
        label_name=frame.schema.label_name,
        class_names=frame.schema.class_names,
    )
    values = np.column_stack(new_cols) if new_cols else np.empty((frame.n_rows, 0))
    return FeatureFrame(
        schema=schema, values=values, labels=frame.labels, categories=new_categories
    )


# ---------------------------------------------------------------------------
# KNN imputation
# ---------------------------------------------------------------------------

def nan_euclidean_distances(values: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distance over mutually observed coordinates.

    The squared distance over observed coordinates is rescaled by
    total_features / observed_features; pairs with no mutually observed
    coordinate get +inf.
    """
    mask = (~np.isnan(values)).astype(np.float64)
    x0 = np.where(np.isnan(values), 0.0, values)
    sq = x0 * x0
    # sum over mutually observed c of (x_r - x_s)^2
    cross = x0 @ x0.T
    ss = sq @ mask.T
    dist_sq = ss + ss.T - 2.0 * cross
    overlap = mask @ mask.T
    d = values.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        dist_sq = np.where(overlap > 0, dist_sq * (d / overlap), np.inf)
    dist_sq = np.maximum(dist_sq, 0.0)  # guard fp cancellation
    return np.sqrt(dist_sq)


def impute_knn(frame: FeatureFrame, k: int = 5) -> FeatureFrame:
    """Fill missing cells with the mean of the k nearest donor rows.

    Distance is the NaN-aware Euclidean metric above, ties broken toward
    the lower row index. A donor must observe the target column and share
    at least one observed coordinate with the incomplete row; when fewer
    than k donors qualify, k is clamped. A cell with no donors at all
    falls back to its column mean.
    """
    if k < 1:
        raise DataError("k must be at least 1")
    values = frame.values
    if not np.isnan(values).any():
        return frame
    if np.all(np.isnan(values), axis=1).any():
        bad = int(np.flatnonzero(np.all(np.isnan(values), axis=1))[0])
        raise DataError(f"row unimputable: row {bad} has no observed values")
    col_all_nan = np.all(np.isnan(values), axis=0)
    if col_all_nan.any():
        name = frame.schema.feature_names[int(np.flatnonzero(col_all_nan)[0])]
        raise DataError(f"column {name!r} has no observed values")

    dist = nan_euclidean_distances(values)
    np.fill_diagonal(dist, np.inf)
    observed = ~np.isnan(values)
    col_means = np.nanmean(values, axis=0)

    out = values.copy()
    for r, c in zip(*np.where(~observed)):
        donors = np.flatnonzero(observed[:, c] & np.isfinite(dist[r]))
        if donors.size == 0:
            out[r, c] = col_means[c]
            continue
        order = donors[np.argsort(dist[r, donors], kind="stable")]
        chosen = order[: min(k, order.size)]
        out[r, c] = float(np.mean(values[chosen, c]))
    return frame.with_values(out)


def impute_row(row: np.ndarray, reference: np.ndarray, k: int = 5) -> np.ndarray:
    """Fill a single row's missing cells from a complete reference matrix.

    Same conventions as impute_knn: NaN-aware Euclidean distance to the
    reference rows, k nearest donors (ties toward the lower row index),
    column mean as last resort when the row observes nothing.
    """
    row = np.asarray(row, dtype=np.float64).copy()
    missing = np.isnan(row)
    if not missing.any():
        return row
    observed = ~missing
    col_means = reference.mean(axis=0)
    if not observed.any():
        row[missing] = col_means[missing]
        return row
    d = row.size
    diff = reference[:, observed] - row[observed]
    dist = np.sqrt(np.sum(diff * diff, axis=1) * (d / observed.sum()))
    order = np.argsort(dist, kind="stable")[: min(k, reference.shape[0])]
    row[missing] = reference[order][:, missing].mean(axis=0)
    return row


# ---------------------------------------------------------------------------
# SMOTE balancing
# ---------------------------------------------------------------------------

def smote_balance(frame: FeatureFrame, k: int = 5, seed: int = 0) -> FeatureFrame:
    """Oversample every under-represented class up to the modal class count.

    Each synthetic sample is x + u * (x_nn - x) with x a class member,
    x_nn one of its k nearest same-class neighbors (self excluded) and u
    uniform in [0, 1] from the seeded generator. Original rows are kept
    verbatim; synthetic rows are appended.
    """
    if frame.labels is None:
        raise DataError("smote_balance requires a labeled frame")
    if frame.has_missing():
        raise DataError("smote_balance requires a fully observed frame")
    labels = frame.labels
    counts = np.bincount(labels, minlength=frame.schema.n_classes)
    present = np.flatnonzero(counts)
    target = int(counts.max())
    if all(counts[c] == target for c in present):
        return frame

    rng = np.random.default_rng(seed)
    new_rows: List[np.ndarray] = []
    new_labels: List[int] = []
    for c in present:
        deficit = target - int(counts[c])
        if deficit == 0:
            continue
        members = np.flatnonzero(labels == c)
        if members.size < 2:
            raise DataError("insufficient minority samples")
        pts = frame.values[members]
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = np.sum(diff * diff, axis=2)
        np.fill_diagonal(d2, np.inf)
        k_eff = min(k, members.size - 1)
        # per-row neighbor lists, ties toward the lower member index
        neighbor_idx = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]
        for _ in range(deficit):
            i = int(rng.integers(0, members.size))
            nn = int(neighbor_idx[i, int(rng.integers(0, k_eff))])
            u = float(rng.random())
            new_rows.append(pts[i] + u * (pts[nn] - pts[i]))
            new_labels.append(int(c))

    values = np.vstack([frame.values, np.array(new_rows)])
    labels_out = np.concatenate([labels, np.array(new_labels, dtype=np.int64)])
    return replace(frame, values=values, labels=labels_out)


# ---------------------------------------------------------------------------
# Standard scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalerState:
    """Per-column mean and scale fitted on a training frame.

    Constant columns get std 1.0 so the inverse transform x*std+mean
    round-trips; their scaled training values are exactly zero.
    """

    mean: np.ndarray
    std: np.ndarray

    def transform(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) / self.std

    def inverse(self, values: np.ndarray) -> np.ndarray:
        return values * self.std + self.mean


def fit_scaler(train: FeatureFrame) -> ScalerState:
    if train.has_missing():
        raise DataError("scaling requires a fully observed frame")
    if train.n_rows == 0:
        raise DataError("empty dataset")
    mean = train.values.mean(axis=0)
    std = train.values.std(axis=0)  # population normalization
    constant = train.values.max(axis=0) == train.values.min(axis=0)
    std = np.where(constant, 1.0, std)
    return ScalerState(mean=_frozen(mean), std=_frozen(std))


def scale_standard(
    train: FeatureFrame, others: Sequence[FeatureFrame] = ()
) -> Tuple[List[FeatureFrame], ScalerState]:
    """Standardize `train` to zero mean / unit population std.

    Statistics come from `train` only and are applied unchanged to every
    frame in `others` (no test leakage). Returns the scaled frames in
    [train, *others] order plus the fitted state.
    """
    state = fit_scaler(train)
    constant = np.asarray(train.values.max(axis=0) == train.values.min(axis=0))
    scaled_train = state.transform(train.values)
    scaled_train[:, constant] = 0.0
    out = [train.with_values(scaled_train)]
    for other in others:
        if other.has_missing():
            raise DataError("scaling requires fully observed frames")
        if other.n_features != train.n_features:
            raise DataError("frame width mismatch")
        out.append(other.with_values(state.transform(other.values)))
    return out, state


# ---------------------------------------------------------------------------
# Pearson correlation
# ---------------------------------------------------------------------------

def pearson_matrix(frame: FeatureFrame) -> np.ndarray:
    """Pairwise Pearson r over features plus the label as a final column.

    Constant columns correlate 0 with everything by convention; the
    diagonal is exactly 1.
    """
    if frame.has_missing():
        raise DataError("correlation requires a fully observed frame")
    if frame.n_rows < 2:
        raise DataError("undefined correlation: need at least 2 rows")
    cols = frame.values
    if frame.labels is not None:
        cols = np.column_stack([cols, frame.labels.astype(np.float64)])
    centered = cols - cols.mean(axis=0)
    ss = np.sqrt(np.sum(centered * centered, axis=0))
    constant = ss == 0.0
    denom = np.where(constant, 1.0, ss)
    normalized = centered / denom
    r = normalized.T @ normalized
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


# ---------------------------------------------------------------------------
# Feature selection
# ---------------------------------------------------------------------------

def select_features(frame: FeatureFrame, keep: Sequence[str]) -> FeatureFrame:
    """Project the frame onto `keep`, in that order; labels are preserved."""
    if len(set(keep)) != len(keep):
        dupes = sorted({n for n in keep if list(keep).count(n) > 1})
        raise DataError(f"duplicate feature names in keep list: {dupes}")
    name_to_idx = {n: i for i, n in enumerate(frame.schema.feature_names)}
    missing = [n for n in keep if n not in name_to_idx]
    if missing:
        raise DataError(f"unknown feature names: {missing}")
    idx = [name_to_idx[n] for n in keep]
    schema = FeatureSchema(
        feature_names=tuple(keep),
        feature_kinds=tuple(frame.schema.feature_kinds[i] for i in idx),
        label_name=frame.schema.label_name,
        class_names=frame.schema.class_names,
    )
    categories = {n: v for n, v in frame.categories.items() if n in keep}
    return FeatureFrame(
        schema=schema,
        values=frame.values[:, idx].copy(),
        labels=frame.labels,
        categories=categories,
    )


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

def _largest_remainder(total: int, fractions: Sequence[float]) -> List[int]:
    """Integer allocation of `total` by the given fractions; exact sum."""
    quotas = [f * total for f in fractions]
    base = [math.floor(q) for q in quotas]
    short = total - sum(base)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:short]:
        base[i] += 1
    return base


def split_indices(
    labels: np.ndarray, n_rows: int, spec: SplitSpec
) -> Tuple[np.ndarray, Optional[np.ndarray], np.ndarray]:
    """Row-index partition for (train, validation?, test).

    Stratified mode allocates within each class by largest remainder, so
    class ratios hold within +/-1 per class. Identical spec => identical
    partition. Indices within each part are returned sorted.
    """
    fractions = [
        spec.train_fraction,
        spec.validation_fraction,
        1.0 - spec.train_fraction - spec.validation_fraction,
    ]
    rng = np.random.default_rng(spec.seed)
    parts: List[List[int]] = [[], [], []]
    if spec.stratified:
        if labels is None:
            raise DataError("stratified split requires labels")
        for c in np.unique(labels):
            members = np.flatnonzero(labels == c)
            members = members[rng.permutation(members.size)]
            counts = _largest_remainder(members.size, fractions)
            parts[0].extend(members[: counts[0]].tolist())
            parts[1].extend(members[counts[0] : counts[0] + counts[1]].tolist())
            parts[2].extend(members[counts[0] + counts[1] :].tolist())
    else:
        order = rng.permutation(n_rows)
        counts = _largest_remainder(n_rows, fractions)
        parts[0] = order[: counts[0]].tolist()
        parts[1] = order[counts[0] : counts[0] + counts[1]].tolist()
        parts[2] = order[counts[0] + counts[1] :].tolist()

    train_idx = np.sort(np.array(parts[0], dtype=np.int64))
    val_idx = np.sort(np.array(parts[1], dtype=np.int64))
    test_idx = np.sort(np.array(parts[2], dtype=np.int64))
    if train_idx.size == 0:
        raise DataError("split produced an empty training partition")
    if spec.validation_fraction > 0.0 and val_idx.size == 0:
        raise DataError("split produced an empty validation partition")
    if test_idx.size == 0:
        raise DataError("split produced an empty test partition")
    return train_idx, (val_idx if spec.validation_fraction > 0.0 else None), test_idx


def split(
    frame: FeatureFrame, spec: SplitSpec
) -> Tuple[FeatureFrame, Optional[FeatureFrame], FeatureFrame]:
    """Partition a labeled frame into (train, validation?, test)."""
    if frame.labels is None:
        raise DataError("split requires a labeled frame")
    train_idx, val_idx, test_idx = split_indices(frame.labels, frame.n_rows, spec)
    validation = None if val_idx is None else frame.take(val_idx)
    return frame.take(train_idx), validation, frame.take(test_idx)


# ---------------------------------------------------------------------------
# CSV + sidecar schema ingestion
# ---------------------------------------------------------------------------

def load_schema(path: str | Path) -> FeatureSchema:
    """Read a sidecar schema JSON (feature_names/kinds, label, classes)."""
    with open(path, "r", encoding="utf-8") as fh:
        return FeatureSchema.from_dict(json.load(fh))


def read_csv_frame(
    path: str | Path, schema: FeatureSchema, delimiter: str = ","
) -> FeatureFrame:
    """Load a UTF-8 CSV with a mandatory header row into a FeatureFrame.

    Empty cells are missing. Categorical cells are mapped to codes in
    first-appearance order (the labels are kept on the frame). Extra CSV
    columns are ignored; absent required columns are an error.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty dataset") from None
        rows = list(reader)
    if not rows:
        raise DataError("empty dataset")

    col_pos: Dict[str, int] = {}
    for name in (*schema.feature_names, schema.label_name):
        if name not in header:
            raise DataError(f"required column {name!r} not found in CSV header")
        col_pos[name] = header.index(name)

    n = len(rows)
    values = np.full((n, schema.n_features), np.nan)
    labels = np.zeros(n, dtype=np.int64)
    categories: Dict[str, List[str]] = {}
    class_index = {name: i for i, name in enumerate(schema.class_names)}

    for i, row in enumerate(rows):
        for j, (name, kind) in enumerate(
            zip(schema.feature_names, schema.feature_kinds)
        ):
            cell = row[col_pos[name]].strip() if col_pos[name] < len(row) else ""
            if cell == "":
                continue
            if kind == "categorical":
                cats = categories.setdefault(name, [])
                if cell not in cats:
                    cats.append(cell)
                values[i, j] = float(cats.index(cell))
            else:
                try:
                    values[i, j] = float(cell)
                except ValueError:
                    raise DataError(
                        f"column {name!r} row {i + 2}: not a number: {cell!r}"
                    ) from None
        label_cell = row[col_pos[schema.label_name]].strip()
        if label_cell not in class_index:
            raise DataError(
                f"label {label_cell!r} at row {i + 2} is not one of "
                f"{list(schema.class_names)}"
            )
        labels[i] = class_index[label_cell]

    return FeatureFrame(
        schema=schema,
        values=values,
        labels=labels,
        categories={k: tuple(v) for k, v in categories.items()},
    )
