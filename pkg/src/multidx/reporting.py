"""Evaluation tables and report figures.

The CLI's report path writes a delimited metrics table next to the
trained artifact and renders the matching figures (feature-correlation
heatmap for tabular runs, loss/accuracy curves for CNN runs) as PNGs.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cnn import TrainHistory
from .metrics import MetricsReport

METRIC_ROWS = ("Accuracy", "Precision", "Recall", "F1-Score")


def _metric_values(report: MetricsReport) -> List[Optional[float]]:
    return [report.accuracy, report.precision, report.recall, report.f1]


def _fmt_cell(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{100.0 * value:.2f}%"


def metrics_table_text(columns: Sequence[str], reports: Sequence[MetricsReport]) -> str:
    """Fixed-width table, one column per learner, one row per metric."""
    width = max(12, *(len(c) for c in columns)) + 2
    head = "Metric".ljust(12) + "".join(c.rjust(width) for c in columns)
    lines = [head, "-" * len(head)]
    for row_name, idx in zip(METRIC_ROWS, range(4)):
        cells = [_fmt_cell(_metric_values(r)[idx]) for r in reports]
        lines.append(row_name.ljust(12) + "".join(c.rjust(width) for c in cells))
    return "\n".join(lines)


def metrics_table_csv(columns: Sequence[str], reports: Sequence[MetricsReport]) -> str:
    """Delimited table with full-precision values (None -> empty cell)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", *columns])
    for row_name, idx in zip(METRIC_ROWS, range(4)):
        cells = [
            "" if _metric_values(r)[idx] is None else repr(_metric_values(r)[idx])
            for r in reports
        ]
        writer.writerow([row_name, *cells])
    return buf.getvalue()


def sweep_table_csv(rows: Sequence[dict]) -> str:
    """One row per image resolution: resolution + the four metrics."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["resolution", "accuracy", "precision", "recall", "f1"])
    for row in rows:
        writer.writerow(
            [
                row["resolution"],
                *(
                    "" if row[k] is None else repr(row[k])
                    for k in ("accuracy", "precision", "recall", "f1")
                ),
            ]
        )
    return buf.getvalue()


def save_pearson_heatmap(
    matrix: np.ndarray, names: Sequence[str], path: str | Path
) -> None:
    """Correlation heatmap over features plus the label column."""
    n = len(names)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * n + 2), max(3.5, 0.5 * n + 1.5)))
    im = ax.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="coolwarm")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_yticklabels(names, fontsize=7)
    if n <= 12:
        for i in range(n):
            for j in range(n):
                ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center", fontsize=6)
    fig.colorbar(im, ax=ax, fraction=0.046)
    ax.set_title("Pearson correlation")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_history_curves(history: TrainHistory, path: str | Path) -> None:
    """Loss and accuracy per epoch for the train/validation partitions."""
    fig, (ax_loss, ax_acc) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_loss.plot(history.epochs, history.train_loss, label="train")
    if not all(np.isnan(history.val_loss)):
        ax_loss.plot(history.epochs, history.val_loss, label="validation")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("cross-entropy")
    ax_loss.legend()
    ax_acc.plot(history.epochs, history.train_acc, label="train")
    if not all(np.isnan(history.val_acc)):
        ax_acc.plot(history.epochs, history.val_acc, label="validation")
    ax_acc.set_xlabel("epoch")
    ax_acc.set_ylabel("accuracy")
    ax_acc.set_ylim(0.0, 1.02)
    ax_acc.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows: Sequence[dict], path: str | Path) -> None:
    """Accuracy against input resolution for the sweep runs."""
    resolutions = [row["resolution"] for row in rows]
    accuracy = [row["accuracy"] for row in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(resolutions, accuracy, marker="o")
    ax.set_xscale("log", base=2)
    ax.set_xticks(resolutions)
    ax.set_xticklabels([str(r) for r in resolutions])
    ax.set_xlabel("input resolution (px)")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0.0, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
