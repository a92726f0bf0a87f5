"""Figure rendering for run reports.

Renders the benchmark's standard figures from the delimited outputs of a
run: learning curves per network method (MSE and MAE panels), predicted vs
observed scatter per method, and the method comparison bars. Files are
written as PNG next to the CSVs; all functions are side-effect free apart
from the file they save.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_loss_curves(history, method: str, path: str | Path) -> Path:
    """Learning curves: mean train/validation MSE and MAE per epoch.

    `history` is a sequence of (seed, fold, epoch, train_mse, val_mse,
    train_mae, val_mae) rows for one method; curves are averaged over seeds
    and folds.
    """
    rows = np.array([r[2:] for r in history], dtype=float)
    epochs = rows[:, 0].astype(int)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for panel, (title, cols) in enumerate([("MSE", (1, 2)), ("MAE", (3, 4))]):
        ax = axes[panel]
        for col, name in zip(cols, ("training", "validation")):
            means = [rows[epochs == e, col].mean() for e in np.unique(epochs)]
            ax.plot(np.unique(epochs), means, label=name)
        ax.set_xlabel("epoch")
        ax.set_ylabel(title)
        ax.set_title(f"{method}: {title} per epoch")
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_scatter(y_true, y_pred, method: str, path: str | Path,
                 annotation: str = "") -> Path:
    """Predicted vs observed scatter with the identity line."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(y_true, y_pred, s=18, alpha=0.7, edgecolors="none")
    lo = min(y_true.min(), y_pred.min())
    hi = max(y_true.max(), y_pred.max())
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    line = (lo - pad, hi + pad)
    ax.plot(line, line, color="gray", linestyle="--", linewidth=1)
    ax.set_xlim(line)
    ax.set_ylim(line)
    ax.set_xlabel("observed")
    ax.set_ylabel("predicted")
    ax.set_title(method)
    if annotation:
        ax.text(
            0.03, 0.97, annotation, transform=ax.transAxes,
            va="top", ha="left", fontsize=9,
            bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8},
        )
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_comparison(rows, path: str | Path) -> Path:
    """Grouped bars of train/test R² and sMAPE per method.

    `rows` is a sequence of (method, train_r2, test_r2, train_smape,
    test_smape) tuples in display order.
    """
    methods = [r[0] for r in rows]
    values = np.array([r[1:] for r in rows], dtype=float)
    x = np.arange(len(methods))
    width = 0.38
    fig, axes = plt.subplots(1, 2, figsize=(12, 4.5))
    for panel, (title, cols) in enumerate([("R²", (0, 1)), ("sMAPE", (2, 3))]):
        ax = axes[panel]
        ax.bar(x - width / 2, values[:, cols[0]], width, label="training")
        ax.bar(x + width / 2, values[:, cols[1]], width, label="testing")
        ax.set_xticks(x)
        ax.set_xticklabels(methods, rotation=20, ha="right")
        ax.set_ylabel(title)
        ax.set_title(f"Method comparison: {title}")
        ax.axhline(0.0, color="black", linewidth=0.6)
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
