"""Experiment presets and end-to-end train/infer pipelines.

Each preset fixes a diagnostic mode's feature set, class vocabulary,
split ratios and model configuration. Training runs the full
preprocessing chain (one-hot, KNN impute, split, SMOTE on the training
split, standard scaling) and produces a deployable ModelArtifact; the
single `infer` path below is used by both the CLI and the HTTP service,
so their outputs are identical by construction.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tabular
from .audio import AUDIO_FEATURE_NAMES, decode_wav, extract_features
from .cnn import TrainConfig, TrainHistory, default_custom_cnn, evaluate
from .cnn import train as train_cnn
from .imaging import (
    GrayImage,
    SpectralRecord,
    binarize,
    convex_hull_crop,
    rasterize_spectrum,
    read_png,
    resize,
)
from .metrics import MetricsReport, compute_metrics, confusion
from .modelstore import ModelArtifact
from .stacking import fit_stack, predict_stack, stack_preset
from .tabular import (
    DataError,
    FeatureFrame,
    FeatureSchema,
    SplitSpec,
    encode_one_hot,
    impute_knn,
    read_csv_frame,
    scale_standard,
    select_features,
    smote_balance,
    split,
)

COVID_CLASSES = ("COVID-negative", "COVID-positive")
MORTALITY_CLASSES = ("survived", "deceased")

BLOOD25_FEATURES = (
    "Age",
    "Hemoglobin",
    "RBC",
    "HCT",
    "MCV",
    "MCH",
    "MCHC",
    "RDW",
    "TWBC",
    "Neutrophils",
    "Eosinophils",
    "Basophils",
    "Lymphocytes",
    "Monocytes",
    "Platelets",
    "MPV",
    "Albumin",
    "Sodium",
    "Potassium",
    "Alanine transaminase",
    "Aspartate transaminase",
    "Hs-CRP",
    "Creatinine",
    "Urea",
    "PT",
)
BLOOD5_FEATURES = ("Age", "TWBC", "Eosinophils", "Monocytes", "Platelets")
SYMPTOM_FEATURES = ("Headache", "Fever", "Cough", "Sore throat", "Shortness of breath")
MORTALITY7_FEATURES = (
    "Neutrophils",
    "Lymphocytes",
    "Monocytes",
    "Platelets",
    "Albumin",
    "Hs-CRP",
    "PT",
)
MORTALITY9_FEATURES = ("Age", "MCHC", "RDW", "TWBC", "BE", "PT", "PTT", "RR", "SpO2")

RASTER_SWEEP = (32, 64, 128, 256, 512, 800)


@dataclass(frozen=True)
class ExperimentPreset:
    """One reproducible experiment: data schema + pipeline + model recipe."""

    preset_id: str
    mode: str
    model_kind: str  # "stacked" | "cnn"
    class_names: Tuple[str, ...]
    label_name: str = "Outcome"
    features: Optional[Tuple[str, ...]] = None
    feature_kinds: Optional[Tuple[str, ...]] = None
    train_fraction: float = 0.7
    validation_fraction: float = 0.0
    stack_name: Optional[str] = None
    input_kind: str = "csv"  # csv | audio | spectra | images
    resolution: int = 64

    def schema(self, class_names: Optional[Sequence[str]] = None) -> FeatureSchema:
        kinds = self.feature_kinds or tuple("numeric" for _ in self.features)
        return FeatureSchema(
            feature_names=self.features,
            feature_kinds=kinds,
            label_name=self.label_name,
            class_names=tuple(class_names or self.class_names),
        )


PRESETS: Dict[str, ExperimentPreset] = {
    "exp1": ExperimentPreset(
        preset_id="exp1",
        mode="symptoms",
        model_kind="stacked",
        class_names=COVID_CLASSES,
        features=SYMPTOM_FEATURES,
        feature_kinds=tuple("binary" for _ in SYMPTOM_FEATURES),
        stack_name="exp1",
    ),
    "exp2": ExperimentPreset(
        preset_id="exp2",
        mode="cough",
        model_kind="stacked",
        class_names=COVID_CLASSES,
        features=AUDIO_FEATURE_NAMES,
        stack_name="exp2",
        input_kind="audio",
    ),
    "exp31": ExperimentPreset(
        preset_id="exp31",
        mode="blood25",
        model_kind="stacked",
        class_names=COVID_CLASSES,
        features=BLOOD25_FEATURES,
        stack_name="exp31",
    ),
    "exp32": ExperimentPreset(
        preset_id="exp32",
        mode="blood5",
        model_kind="stacked",
        class_names=COVID_CLASSES,
        features=BLOOD5_FEATURES,
        stack_name="exp32",
    ),
    "exp4": ExperimentPreset(
        preset_id="exp4",
        mode="raman",
        model_kind="cnn",
        class_names=COVID_CLASSES,
        train_fraction=0.7,
        validation_fraction=0.2,
        input_kind="spectra",
        resolution=64,
    ),
    "exp5": ExperimentPreset(
        preset_id="exp5",
        mode="ecg",
        model_kind="cnn",
        class_names=("normal", "COVID-positive"),
        train_fraction=0.7,
        validation_fraction=0.2,
        input_kind="images",
        resolution=224,
    ),
    "exp61": ExperimentPreset(
        preset_id="exp61",
        mode="mortality7",
        model_kind="stacked",
        class_names=MORTALITY_CLASSES,
        features=MORTALITY7_FEATURES,
        train_fraction=0.8,
        stack_name="exp61",
    ),
    "exp62": ExperimentPreset(
        preset_id="exp62",
        mode="mortality9",
        model_kind="stacked",
        class_names=MORTALITY_CLASSES,
        features=MORTALITY9_FEATURES,
        train_fraction=0.8,
        stack_name="exp62",
    ),
}

MODE_TO_PRESET = {p.mode: p for p in PRESETS.values()}


def get_preset(preset_id: str) -> ExperimentPreset:
    if preset_id not in PRESETS:
        raise DataError(f"unknown experiment {preset_id!r}; have {sorted(PRESETS)}")
    return PRESETS[preset_id]


# ---------------------------------------------------------------------------
# Dataset ingestion
# ---------------------------------------------------------------------------

def _sidecar_schema(data_path: Path) -> Optional[dict]:
    sidecar = data_path.with_suffix(data_path.suffix + ".schema.json")
    if sidecar.exists():
        import json

        with open(sidecar, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return None


def load_tabular_dataset(preset: ExperimentPreset, data_path: str | Path) -> FeatureFrame:
    """Read the preset's feature columns from a CSV.

    A sidecar <data>.schema.json may override label_name/class_names for
    datasets whose label vocabulary differs from the preset default.
    """
    data_path = Path(data_path)
    sidecar = _sidecar_schema(data_path)
    label_name = preset.label_name
    class_names: Sequence[str] = preset.class_names
    if sidecar is not None:
        label_name = sidecar.get("label_name", label_name)
        class_names = sidecar.get("class_names", class_names)
    kinds = preset.feature_kinds or tuple("numeric" for _ in preset.features)
    schema = FeatureSchema(
        feature_names=preset.features,
        feature_kinds=kinds,
        label_name=label_name,
        class_names=tuple(class_names),
    )
    return read_csv_frame(data_path, schema)


def load_audio_dataset(preset: ExperimentPreset, data_path: str | Path) -> FeatureFrame:
    """Cough data: either a features CSV or a directory of <class>/*.wav."""
    data_path = Path(data_path)
    if data_path.is_file():
        return load_tabular_dataset(preset, data_path)
    if not data_path.is_dir():
        raise DataError(f"no such dataset: {data_path}")
    rows: List[np.ndarray] = []
    labels: List[int] = []
    class_dirs = sorted(d for d in data_path.iterdir() if d.is_dir())
    found = {d.name for d in class_dirs}
    expected = set(preset.class_names)
    if not found or not found.issubset(expected):
        raise DataError(
            f"audio directory must hold class subdirectories named from "
            f"{sorted(expected)}; found {sorted(found)}"
        )
    class_index = {name: i for i, name in enumerate(preset.class_names)}
    for class_dir in class_dirs:
        for wav_path in sorted(class_dir.glob("*.wav")):
            clip = decode_wav(wav_path.read_bytes())
            rows.append(extract_features(clip).as_vector())
            labels.append(class_index[class_dir.name])
    if not rows:
        raise DataError(f"no .wav files under {data_path}")
    return FeatureFrame(
        schema=preset.schema(),
        values=np.array(rows),
        labels=np.array(labels, dtype=np.int64),
    )


def load_spectra_dataset(
    preset: ExperimentPreset, data_path: str | Path
) -> Tuple[List[SpectralRecord], np.ndarray, Tuple[str, ...]]:
    """Spectral CSV: every non-label column is an intensity sample."""
    import csv as _csv

    data_path = Path(data_path)
    sidecar = _sidecar_schema(data_path)
    label_name = preset.label_name
    class_names: Sequence[str] = preset.class_names
    if sidecar is not None:
        label_name = sidecar.get("label_name", label_name)
        class_names = tuple(sidecar.get("class_names", class_names))
    with open(data_path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty dataset") from None
        if label_name not in header:
            raise DataError(f"required column {label_name!r} not found in CSV header")
        label_pos = header.index(label_name)
        class_index = {name: i for i, name in enumerate(class_names)}
        records: List[SpectralRecord] = []
        labels: List[int] = []
        for i, row in enumerate(reader):
            cells = [c for j, c in enumerate(row) if j != label_pos]
            try:
                intensities = np.array([float(c) for c in cells])
            except ValueError:
                raise DataError(f"row {i + 2}: spectral cells must be numeric") from None
            label_cell = row[label_pos].strip()
            if label_cell not in class_index:
                raise DataError(
                    f"label {label_cell!r} at row {i + 2} is not one of {list(class_names)}"
                )
            records.append(SpectralRecord(intensities=intensities))
            labels.append(class_index[label_cell])
    if not records:
        raise DataError("empty dataset")
    return records, np.array(labels, dtype=np.int64), tuple(class_names)


def load_image_dataset(
    preset: ExperimentPreset, data_path: str | Path
) -> Tuple[List[GrayImage], np.ndarray, Tuple[str, ...]]:
    """Report images laid out as <class>/*.png under the data directory."""
    data_path = Path(data_path)
    if not data_path.is_dir():
        raise DataError(f"no such dataset directory: {data_path}")
    class_dirs = sorted(d for d in data_path.iterdir() if d.is_dir())
    found = {d.name for d in class_dirs}
    expected = set(preset.class_names)
    if not found or not found.issubset(expected):
        raise DataError(
            f"image directory must hold class subdirectories named from "
            f"{sorted(expected)}; found {sorted(found)}"
        )
    class_index = {name: i for i, name in enumerate(preset.class_names)}
    images: List[GrayImage] = []
    labels: List[int] = []
    for class_dir in class_dirs:
        for png_path in sorted(class_dir.glob("*.png")):
            images.append(read_png(png_path))
            labels.append(class_index[class_dir.name])
    if not images:
        raise DataError(f"no .png files under {data_path}")
    return images, np.array(labels, dtype=np.int64), preset.class_names


# ---------------------------------------------------------------------------
# Image preprocessing per mode
# ---------------------------------------------------------------------------

def preprocess_report_image(img: GrayImage, resolution: int) -> GrayImage:
    """Report-image chain: binarize, hull-crop, rescale."""
    cropped = convex_hull_crop(binarize(img))
    return resize(cropped, resolution, resolution)


def preprocess_trace_image(img: GrayImage, resolution: int) -> GrayImage:
    """Trace images only need rescaling to the trained resolution."""
    return resize(img, resolution, resolution)


def _stack_images(images: Sequence[GrayImage]) -> np.ndarray:
    return np.stack([img.pixels[..., None] for img in images])


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class StackedEvaluation:
    """Table-shaped metrics: one column per base learner plus the meta."""

    columns: List[str]
    reports: List[MetricsReport]


@dataclass
class TrainResult:
    preset: ExperimentPreset
    artifact: ModelArtifact
    evaluation: Optional[StackedEvaluation] = None
    history: Optional[TrainHistory] = None
    pearson: Optional[np.ndarray] = None
    pearson_names: Optional[List[str]] = None
    cnn_report: Optional[MetricsReport] = None
    resolution: Optional[int] = None
    test_accuracy: Optional[float] = None


def train_stacked_experiment(
    preset: ExperimentPreset,
    frame: FeatureFrame,
    seed: int = 0,
    folds: int = 5,
    leaky_smote: bool = False,
    smote_seed_offset: int = 1,
    stack_spec=None,
) -> TrainResult:
    """Full tabular pipeline: clean, balance, scale, stack, evaluate.

    Default order is one-hot -> impute -> split -> SMOTE(train) -> scale.
    leaky_smote reproduces the published order (SMOTE before the split).
    stack_spec overrides the preset's stack configuration (desk-scale
    runs with cheaper ensembles).
    """
    if frame.labels is None:
        raise DataError("training data must be labeled")
    frame = encode_one_hot(frame)
    frame = impute_knn(frame, k=5)
    pearson = tabular.pearson_matrix(frame)
    pearson_names = list(frame.schema.feature_names) + [frame.schema.label_name]

    split_spec = SplitSpec(
        train_fraction=preset.train_fraction,
        validation_fraction=preset.validation_fraction,
        seed=seed,
        stratified=True,
    )
    if leaky_smote:
        balanced = smote_balance(frame, k=5, seed=seed + smote_seed_offset)
        train_frame, _, test_frame = split(balanced, split_spec)
    else:
        train_frame, _, test_frame = split(frame, split_spec)
        train_frame = smote_balance(train_frame, k=5, seed=seed + smote_seed_offset)

    imputer_reference = frame.values.copy()  # complete (post-impute), unscaled
    (scaled_train, scaled_test), scaler = scale_standard(train_frame, [test_frame])

    if stack_spec is None:
        stack_spec = stack_preset(preset.stack_name, seed=seed, folds=folds)
    model = fit_stack(stack_spec, scaled_train)

    columns: List[str] = []
    reports: List[MetricsReport] = []
    y_test = scaled_test.labels
    for base_spec, base in zip(stack_spec.base_specs, model.fitted_bases):
        pred = base.predict_label(scaled_test.values)
        columns.append(base_spec.kind)
        reports.append(compute_metrics(confusion(y_test, pred, positive_class=1)))
    _, stack_pred = predict_stack(model, scaled_test)
    columns.append(f"Stacked[{stack_spec.meta_spec.kind}]")
    stacked_report = compute_metrics(confusion(y_test, stack_pred, positive_class=1))
    reports.append(stacked_report)

    artifact = ModelArtifact.for_stacked(
        preset.mode,
        model,
        descriptor={"kind": "tabular", "schema": frame.schema.to_dict()},
        preprocessing={
            "keep": list(preset.features) if preset.features else list(frame.schema.feature_names),
            "imputer_matrix": imputer_reference,
            "imputer_k": 5,
            "scaler": {"mean": np.asarray(scaler.mean), "std": np.asarray(scaler.std)},
        },
    )
    acc = stacked_report.accuracy
    return TrainResult(
        preset=preset,
        artifact=artifact,
        evaluation=StackedEvaluation(columns=columns, reports=reports),
        pearson=pearson,
        pearson_names=pearson_names,
        test_accuracy=acc,
    )


def train_cnn_experiment(
    preset: ExperimentPreset,
    images: Sequence[GrayImage],
    labels: np.ndarray,
    seed: int = 0,
    resolution: Optional[int] = None,
    epochs: int = 25,
    batch_size: int = 16,
    class_names: Optional[Tuple[str, ...]] = None,
) -> TrainResult:
    """Image pipeline: per-mode preprocessing, CNN training, test metrics."""
    resolution = resolution or preset.resolution
    class_names = class_names or preset.class_names
    if preset.mode == "ecg":
        processed = [preprocess_report_image(img, resolution) for img in images]
    else:
        processed = [preprocess_trace_image(img, resolution) for img in images]
    x = _stack_images(processed)
    labels = np.asarray(labels, dtype=np.int64)

    model = default_custom_cnn((resolution, resolution, 1), len(class_names), seed=seed)
    config = TrainConfig(
        epochs=epochs,
        batch_size=batch_size,
        seed=seed,
        train_fraction=preset.train_fraction,
        validation_fraction=preset.validation_fraction,
    )
    model, history = train_cnn(model, x, labels, config)

    # recover the internal split to evaluate on the held-out test partition
    _, _, test_idx = tabular.split_indices(
        labels,
        labels.size,
        SplitSpec(
            train_fraction=config.train_fraction,
            validation_fraction=config.validation_fraction,
            seed=seed,
            stratified=True,
        ),
    )
    pred = model.predict_label(x[test_idx])
    report = compute_metrics(confusion(labels[test_idx], pred, positive_class=1))
    _, test_acc = evaluate(model, x[test_idx], labels[test_idx])

    artifact = ModelArtifact.for_cnn(
        preset.mode,
        model,
        descriptor={
            "kind": "image",
            "resolution": resolution,
            "apply_hull": preset.mode == "ecg",
            "class_names": list(class_names),
        },
    )
    return TrainResult(
        preset=preset,
        artifact=artifact,
        history=history,
        cnn_report=report,
        resolution=resolution,
        test_accuracy=test_acc,
    )


def rasterize_records(records: Sequence[SpectralRecord], resolution: int) -> List[GrayImage]:
    return [rasterize_spectrum(rec, resolution) for rec in records]


# ---------------------------------------------------------------------------
# Inference (shared by CLI and service)
# ---------------------------------------------------------------------------

def decode_base64(text: str) -> bytes:
    """Strict standard-alphabet base64 with mandatory padding."""
    if not isinstance(text, str):
        raise DataError("base64 payload must be a string")
    if len(text) % 4 != 0:
        raise DataError("invalid base64: length must be a multiple of 4")
    try:
        return base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise DataError(f"invalid base64: {exc}") from None


def _label_vocabulary(mode: str, class_names: Sequence[str]) -> Tuple[str, str]:
    """(negative, positive) label texts for a mode."""
    if mode.startswith("mortality"):
        return ("low-risk", "high-risk")
    return (class_names[0], class_names[1])


def tabular_input_vector(artifact: ModelArtifact, inputs: Dict[str, object]) -> np.ndarray:
    """Validate a keyed numeric map against the artifact schema.

    Exactly the schema keys must be present; null values are allowed and
    imputed against the stored training matrix.
    """
    schema = artifact.descriptor["schema"]
    names = list(schema["feature_names"])
    if not isinstance(inputs, dict):
        raise DataError("inputs must be a JSON object keyed by feature name")
    missing = [n for n in names if n not in inputs]
    if missing:
        raise DataError(f"missing input keys: {missing}")
    extras = [k for k in inputs if k not in names]
    if extras:
        raise DataError(f"unexpected input keys: {extras}")
    row = np.full(len(names), np.nan)
    for j, name in enumerate(names):
        value = inputs[name]
        if value is None:
            continue
        if isinstance(value, bool):
            row[j] = 1.0 if value else 0.0
        elif isinstance(value, (int, float)):
            row[j] = float(value)
        else:
            raise DataError(f"input {name!r} must be numeric, got {type(value).__name__}")
    if np.isnan(row).any():
        reference = np.asarray(artifact.preprocessing["imputer_matrix"], dtype=np.float64)
        k = int(artifact.preprocessing.get("imputer_k", 5))
        row = tabular.impute_row(row, reference, k)
    return row


def _apply_scaler(artifact: ModelArtifact, row: np.ndarray) -> np.ndarray:
    scaler = artifact.preprocessing.get("scaler")
    if scaler is None:
        return row
    mean = np.asarray(scaler["mean"], dtype=np.float64)
    std = np.asarray(scaler["std"], dtype=np.float64)
    return (row - mean) / std


def infer(artifact: ModelArtifact, model, inputs: Dict[str, object]) -> Dict[str, object]:
    """Run one prediction for any mode; returns the result fields.

    `inputs` is the mode's keyed map: feature values for tabular modes,
    {"wav_base64": ...} for cough, {"png_base64": ...} for raman/ecg.
    """
    mode = artifact.mode
    if mode == "cough":
        payload = _single_key(inputs, "wav_base64")
        clip = decode_wav(decode_base64(payload))
        row = extract_features(clip).as_vector()
        x = _apply_scaler(artifact, row).reshape(1, -1)
        probs, _ = predict_stack(model, x)
    elif mode in ("raman", "ecg"):
        payload = _single_key(inputs, "png_base64")
        img = read_png(decode_base64(payload))
        resolution = int(artifact.descriptor["resolution"])
        if artifact.descriptor.get("apply_hull"):
            img = preprocess_report_image(img, resolution)
        else:
            img = preprocess_trace_image(img, resolution)
        probs = model.predict_proba(img.pixels[None, :, :, None])
    else:
        row = tabular_input_vector(artifact, inputs)
        x = _apply_scaler(artifact, row).reshape(1, -1)
        probs, _ = predict_stack(model, x)

    probability_positive = float(probs[0, 1])
    if artifact.descriptor.get("kind") == "tabular":
        class_names = list(artifact.descriptor["schema"]["class_names"])
    else:
        class_names = list(artifact.descriptor.get("class_names", ["negative", "positive"]))
    neg_label, pos_label = _label_vocabulary(mode, class_names)
    label = pos_label if probability_positive >= 0.5 else neg_label
    return {
        "mode": mode,
        "probability_positive": probability_positive,
        "label": label,
        "model_version": artifact.version_label,
    }


def _single_key(inputs: Dict[str, object], key: str) -> str:
    if not isinstance(inputs, dict):
        raise DataError("inputs must be a JSON object")
    if key not in inputs:
        raise DataError(f"missing input keys: [{key!r}]")
    extras = [k for k in inputs if k != key]
    if extras:
        raise DataError(f"unexpected input keys: {extras}")
    value = inputs[key]
    if not isinstance(value, str):
        raise DataError(f"input {key!r} must be a base64 string")
    return value
