"""Synthetic desk-scale datasets and cheap trained artifacts for tests."""

import csv
from pathlib import Path

import numpy as np

from multidx.audio import AudioClip, encode_wav
from multidx.imaging import GrayImage, write_png
from multidx.learners import LearnerSpec
from multidx.modelstore import save
from multidx.pipelines import (
    PRESETS,
    load_audio_dataset,
    load_image_dataset,
    load_spectra_dataset,
    load_tabular_dataset,
    rasterize_records,
    train_cnn_experiment,
    train_stacked_experiment,
)
from multidx.stacking import StackSpec

CHEAP_STACK = StackSpec(
    base_specs=(
        LearnerSpec(kind="GaussianNaiveBayes", seed=0),
        LearnerSpec(kind="KNearestNeighbors", seed=0),
        LearnerSpec(kind="RandomForest", hyperparameters={"n_estimators": 12}, seed=0),
    ),
    meta_spec=LearnerSpec(kind="LogisticRegression", seed=0),
    folds=3,
    seed=0,
)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _tabular_rows(features, class_names, n=60, seed=0, missing_rate=0.04, imbalance=0.6):
    """Separable synthetic rows: class shifts the first two features."""
    rng = np.random.default_rng(seed)
    rows = []
    n_pos = int(n * (1 - imbalance))
    labels = [0] * (n - n_pos) + [1] * n_pos
    for i, label in enumerate(labels):
        base = rng.normal(loc=3.0 * label, scale=1.0, size=len(features))
        base += rng.normal(scale=0.3, size=len(features))
        cells = []
        for j, v in enumerate(base):
            if i > 4 and rng.random() < missing_rate:
                cells.append("")
            else:
                cells.append(f"{v:.4f}")
        cells.append(class_names[label])
        rows.append(cells)
    return rows


def make_tabular_csv(tmp_path: Path, preset_id: str, n=60, seed=0) -> Path:
    preset = PRESETS[preset_id]
    path = tmp_path / f"{preset_id}.csv"
    if preset_id == "exp1":
        rng = np.random.default_rng(seed)
        rows = []
        for i in range(n):
            label = i % 2
            flags = [
                int(rng.random() < (0.75 if label else 0.2)) for _ in preset.features
            ]
            rows.append([str(f) for f in flags] + [preset.class_names[label]])
        _write_csv(path, list(preset.features) + [preset.label_name], rows)
        return path
    rows = _tabular_rows(preset.features, preset.class_names, n=n, seed=seed)
    _write_csv(path, list(preset.features) + [preset.label_name], rows)
    return path


def make_audio_dir(tmp_path: Path, per_class=8, seed=0) -> Path:
    """Two tone classes: 300 Hz vs 900 Hz with seeded noise."""
    rng = np.random.default_rng(seed)
    root = tmp_path / "cough"
    preset = PRESETS["exp2"]
    freqs = {preset.class_names[0]: 300.0, preset.class_names[1]: 900.0}
    t = np.arange(4000) / 8000.0
    for class_name, freq in freqs.items():
        class_dir = root / class_name
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            wobble = 1.0 + 0.02 * rng.standard_normal()
            samples = 0.6 * np.sin(2 * np.pi * freq * wobble * t)
            samples += 0.05 * rng.standard_normal(t.size)
            clip = AudioClip(samples=np.clip(samples, -1, 1), sample_rate=8000)
            (class_dir / f"clip{i}.wav").write_bytes(encode_wav(clip))
    return root


def make_spectra_csv(tmp_path: Path, per_class=12, length=120, seed=0) -> Path:
    """Gaussian bumps at two positions; easy two-class spectra."""
    rng = np.random.default_rng(seed)
    preset = PRESETS["exp4"]
    path = tmp_path / "spectra.csv"
    xs = np.arange(length)
    rows = []
    for label, center in ((0, length * 0.25), (1, length * 0.75)):
        for _ in range(per_class):
            c = center + rng.normal(scale=3.0)
            spectrum = np.exp(-0.5 * ((xs - c) / (length * 0.06)) ** 2)
            spectrum += 0.05 * rng.random(length)
            rows.append([f"{v:.5f}" for v in spectrum] + [preset.class_names[label]])
    header = [f"w{i}" for i in range(length)] + [preset.label_name]
    _write_csv(path, header, rows)
    return path


def trace_image(freq: float, size=64, phase=0.0, noise_rng=None) -> GrayImage:
    """White report-like image with a dark sine trace (binarize-friendly)."""
    pixels = np.ones((size, size))
    pixels[::8, :] = 0.85  # pale gridlines
    pixels[:, ::8] = 0.85
    cols = np.arange(size)
    rows = (size / 2 + (size / 3) * np.sin(2 * np.pi * freq * cols / size + phase)).astype(int)
    rows = np.clip(rows, 0, size - 1)
    for c in cols:
        pixels[rows[c], c] = 0.05
        if c:
            lo, hi = sorted((rows[c - 1], rows[c]))
            pixels[lo : hi + 1, c] = 0.05
    if noise_rng is not None:
        jitter = noise_rng.random((size, size)) * 0.03
        pixels = np.clip(pixels - jitter, 0.0, 1.0)
    return GrayImage(pixels=pixels)


def make_ecg_dir(tmp_path: Path, per_class=8, seed=0) -> Path:
    rng = np.random.default_rng(seed)
    preset = PRESETS["exp5"]
    root = tmp_path / "ecg"
    freqs = {preset.class_names[0]: 2.0, preset.class_names[1]: 5.0}
    for class_name, freq in freqs.items():
        class_dir = root / class_name
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            img = trace_image(freq, phase=rng.random() * 3.0, noise_rng=rng)
            write_png(img, class_dir / f"report{i}.png")
    return root


def build_toy_registry(target_dir: Path, data_dir: Path) -> dict:
    """Train one cheap artifact per mode; returns {mode: artifact_path}."""
    target_dir.mkdir(parents=True, exist_ok=True)
    paths = {}

    for preset_id in ("exp1", "exp31", "exp32", "exp61", "exp62"):
        preset = PRESETS[preset_id]
        frame = load_tabular_dataset(preset, make_tabular_csv(data_dir, preset_id))
        result = train_stacked_experiment(preset, frame, seed=0, stack_spec=CHEAP_STACK)
        path = target_dir / f"{preset.mode}.mdx"
        save(result.artifact, path)
        paths[preset.mode] = path

    preset = PRESETS["exp2"]
    frame = load_audio_dataset(preset, make_audio_dir(data_dir))
    result = train_stacked_experiment(preset, frame, seed=0, stack_spec=CHEAP_STACK)
    paths["cough"] = target_dir / "cough.mdx"
    save(result.artifact, paths["cough"])

    preset = PRESETS["exp4"]
    records, labels, class_names = load_spectra_dataset(preset, make_spectra_csv(data_dir))
    images = rasterize_records(records, 32)
    result = train_cnn_experiment(
        preset, images, labels, seed=0, resolution=32, epochs=4, batch_size=4,
        class_names=class_names,
    )
    paths["raman"] = target_dir / "raman.mdx"
    save(result.artifact, paths["raman"])

    preset = PRESETS["exp5"]
    images, labels, class_names = load_image_dataset(preset, make_ecg_dir(data_dir))
    result = train_cnn_experiment(
        preset, images, labels, seed=0, resolution=32, epochs=4, batch_size=4,
        class_names=class_names,
    )
    paths["ecg"] = target_dir / "ecg.mdx"
    save(result.artifact, paths["ecg"])

    return paths


def sample_inputs(mode: str, data_dir: Path) -> dict:
    """A valid request `inputs` map per mode (deterministic)."""
    import base64

    if mode == "symptoms":
        preset = PRESETS["exp1"]
        return {name: (1 if i % 2 == 0 else 0) for i, name in enumerate(preset.features)}
    if mode in ("blood25", "blood5", "mortality7", "mortality9"):
        preset = {p.mode: p for p in PRESETS.values()}[mode]
        rng = np.random.default_rng(hash(mode) % (2**32))
        return {name: round(float(v), 4) for name, v in zip(preset.features, rng.normal(1.5, 1.0, len(preset.features)))}
    if mode == "cough":
        t = np.arange(4000) / 8000.0
        clip = AudioClip(samples=0.5 * np.sin(2 * np.pi * 440.0 * t), sample_rate=8000)
        return {"wav_base64": base64.b64encode(encode_wav(clip)).decode()}
    if mode == "raman":
        xs = np.arange(120)
        spectrum = np.exp(-0.5 * ((xs - 30) / 7.0) ** 2)
        from multidx.imaging import SpectralRecord, png_bytes, rasterize_spectrum

        img = rasterize_spectrum(SpectralRecord(intensities=spectrum), 48)
        return {"png_base64": base64.b64encode(png_bytes(img)).decode()}
    if mode == "ecg":
        from multidx.imaging import png_bytes

        img = trace_image(3.0)
        return {"png_base64": base64.b64encode(png_bytes(img)).decode()}
    raise ValueError(mode)
