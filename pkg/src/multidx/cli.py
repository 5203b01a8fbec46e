"""Reproduction CLI: train experiment presets, predict, serve.

Exit codes: 0 ok, 1 usage, 2 data error, 3 internal.
"""

from __future__ import annotations

import base64
import json
import os
import sys
import time
from pathlib import Path

import click

from . import pipelines, reporting, service
from .audio import AudioError
from .imaging import ImagingError
from .learners import LearnerError
from .modelstore import StoreError, load as load_artifact, save as save_artifact
from .pipelines import (
    PRESETS,
    RASTER_SWEEP,
    get_preset,
    load_audio_dataset,
    load_image_dataset,
    load_spectra_dataset,
    load_tabular_dataset,
    rasterize_records,
    train_cnn_experiment,
    train_stacked_experiment,
)
from .tabular import DataError

DATA_ERRORS = (DataError, StoreError, AudioError, ImagingError, LearnerError, OSError)


@click.group()
def cli() -> None:
    """Multimodal diagnostic toolkit."""


def _parse_resolutions(value: str | None, preset) -> list[int]:
    if value is None:
        return [preset.resolution]
    if value == "sweep":
        return list(RASTER_SWEEP)
    try:
        return [int(v) for v in value.split(",")]
    except ValueError:
        raise click.UsageError(
            "--resolution takes an integer, a comma list (32,64) or 'sweep'"
        ) from None


@cli.command("train")
@click.option("--experiment", required=True, help=f"preset id, one of {sorted(PRESETS)}")
@click.option("--data", "data_path", required=True, help="CSV file or image/audio directory")
@click.option("--out", "out_path", required=True, help="artifact output path (.mdx)")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--folds", default=5, show_default=True, type=int, help="out-of-fold folds")
@click.option(
    "--leaky-smote",
    is_flag=True,
    help="reproduce the published order: balance before splitting",
)
@click.option("--resolution", default=None, help="CNN input px: int, comma list or 'sweep'")
@click.option("--epochs", default=25, show_default=True, type=int, help="CNN epochs")
@click.option("--report-dir", default=None, help="where to write tables/figures (default: out dir)")
def cmd_train(experiment, data_path, out_path, seed, folds, leaky_smote, resolution, epochs, report_dir):
    """Train a preset end to end; write the artifact, tables and figures."""
    preset = get_preset(experiment)
    out_path = Path(out_path)
    report_dir = Path(report_dir) if report_dir else out_path.parent
    report_dir.mkdir(parents=True, exist_ok=True)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    if preset.model_kind == "stacked":
        if preset.input_kind == "audio":
            frame = load_audio_dataset(preset, data_path)
        else:
            frame = load_tabular_dataset(preset, data_path)
        result = train_stacked_experiment(
            preset, frame, seed=seed, folds=folds, leaky_smote=leaky_smote
        )
        table = reporting.metrics_table_text(result.evaluation.columns, result.evaluation.reports)
        click.echo(f"== {experiment} ({preset.mode}) ==")
        click.echo(table)
        csv_path = report_dir / f"{experiment}_metrics.csv"
        csv_path.write_text(
            reporting.metrics_table_csv(result.evaluation.columns, result.evaluation.reports),
            encoding="utf-8",
        )
        heatmap_path = report_dir / f"{experiment}_pearson.png"
        reporting.save_pearson_heatmap(result.pearson, result.pearson_names, heatmap_path)
        save_artifact(result.artifact, out_path)
        click.echo(f"artifact: {out_path}")
        click.echo(f"report: {csv_path}, {heatmap_path}")
        return

    # CNN presets
    resolutions = _parse_resolutions(resolution, preset)
    if preset.input_kind == "spectra":
        records, labels, class_names = load_spectra_dataset(preset, data_path)
        sweep_rows = []
        best = None
        for res in resolutions:
            images = rasterize_records(records, res)
            result = train_cnn_experiment(
                preset, images, labels, seed=seed, resolution=res,
                epochs=epochs, class_names=class_names,
            )
            r = result.cnn_report
            sweep_rows.append(
                {
                    "resolution": res,
                    "accuracy": r.accuracy,
                    "precision": r.precision,
                    "recall": r.recall,
                    "f1": r.f1,
                }
            )
            click.echo(
                f"{experiment} @ {res}x{res}: "
                + ", ".join(
                    f"{k}={reporting._fmt_cell(v)}"
                    for k, v in zip(
                        ("accuracy", "precision", "recall", "f1"),
                        (r.accuracy, r.precision, r.recall, r.f1),
                    )
                )
            )
            if best is None or (result.test_accuracy or 0.0) > (best.test_accuracy or 0.0):
                best = result
        csv_path = report_dir / f"{experiment}_metrics.csv"
        csv_path.write_text(reporting.sweep_table_csv(sweep_rows), encoding="utf-8")
        if len(sweep_rows) > 1:
            reporting.save_sweep_figure(sweep_rows, report_dir / f"{experiment}_sweep.png")
        result = best
    else:
        images, labels, class_names = load_image_dataset(preset, data_path)
        result = train_cnn_experiment(
            preset, images, labels, seed=seed, resolution=resolutions[0],
            epochs=epochs, class_names=class_names,
        )
        r = result.cnn_report
        click.echo(f"== {experiment} ({preset.mode}) @ {result.resolution}px ==")
        click.echo(
            reporting.metrics_table_text([f"CNN@{result.resolution}"], [r])
        )
        csv_path = report_dir / f"{experiment}_metrics.csv"
        csv_path.write_text(
            reporting.metrics_table_csv([f"CNN@{result.resolution}"], [r]), encoding="utf-8"
        )

    history_path = report_dir / f"{experiment}_history.csv"
    history_path.write_text(result.history.to_csv(), encoding="utf-8")
    reporting.save_history_curves(result.history, report_dir / f"{experiment}_curves.png")
    save_artifact(result.artifact, out_path)
    click.echo(f"artifact: {out_path} (resolution {result.resolution})")
    click.echo(f"report: {csv_path}, {history_path}")


@cli.command("predict")
@click.option("--model", "model_path", required=True, help="artifact path (.mdx)")
@click.option("--input", "input_path", required=True, help=".json, .wav or .png input")
def cmd_predict(model_path, input_path):
    """Run one prediction; print the PredictionResult JSON on stdout."""
    artifact = load_artifact(model_path)
    model = artifact.build_model()
    input_path = Path(input_path)
    suffix = input_path.suffix.lower()
    if artifact.mode == "cough":
        if suffix != ".wav":
            raise DataError(f"mode 'cough' expects a .wav input, got {input_path.name}")
        inputs = {"wav_base64": base64.b64encode(input_path.read_bytes()).decode()}
    elif artifact.mode in ("raman", "ecg"):
        if suffix != ".png":
            raise DataError(f"mode {artifact.mode!r} expects a .png input, got {input_path.name}")
        inputs = {"png_base64": base64.b64encode(input_path.read_bytes()).decode()}
    else:
        if suffix != ".json":
            raise DataError(
                f"mode {artifact.mode!r} expects a .json keyed-value input, got {input_path.name}"
            )
        inputs = json.loads(input_path.read_text(encoding="utf-8"))
    start = time.perf_counter()
    result = pipelines.infer(artifact, model, inputs)
    result["latency_ms"] = (time.perf_counter() - start) * 1000.0
    click.echo(json.dumps(result))


@cli.command("serve")
@click.option(
    "--model-dir",
    default=lambda: os.environ.get("MULTIDX_MODEL_DIR", "models"),
    help="directory of .mdx artifacts [env MULTIDX_MODEL_DIR]",
)
@click.option(
    "--port",
    default=lambda: int(os.environ.get("MULTIDX_PORT", service.DEFAULT_PORT)),
    type=int,
    help="listen port [env MULTIDX_PORT]",
)
def cmd_serve(model_dir, port):
    """Serve the loaded artifacts over HTTP until interrupted."""
    cors = os.environ.get("MULTIDX_CORS_ORIGIN", "*")
    registry = service.load_registry(model_dir)
    click.echo(f"serving {sorted(registry)} from {model_dir} on port {port}")
    service.serve(model_dir, port=port, cors_origin=cors)


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {exc}", file=sys.stderr)
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
