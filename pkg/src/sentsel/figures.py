"""Figure rendering for the report pipeline.

Everything draws through the Agg backend into PNG files next to the CSV
series they visualise. Figures carry no timestamps or software metadata, so
re-rendering the same data yields the same bytes on a given toolchain.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .report import REFERENCE_CONSTANTS  # noqa: E402

_DPI = 120
_SAVE = {"dpi": _DPI, "metadata": {"Software": None}}


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_curve(curve, accuracy_path, loss_path):
    """Accuracy-vs-epochs and loss-vs-epochs panels from a LearningCurve."""
    epochs = list(curve.epochs)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, curve.train_accuracy, label="train")
    ax.plot(epochs, curve.test_accuracy, label="test")
    ax.set_xlabel("epoch")
    ax.set_ylabel("accuracy")
    ax.set_title("accuracy vs epochs")
    ax.legend()
    ax.grid(True, alpha=0.3)
    acc = _finish(fig, accuracy_path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, curve.train_loss, label="train")
    ax.plot(epochs, curve.test_loss, label="test")
    ax.set_xlabel("epoch")
    ax.set_ylabel("cross-entropy loss")
    ax.set_title("loss vs epochs")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return acc, _finish(fig, loss_path)


def render_eigspectrum(eigenvalues, path):
    values = np.asarray(list(eigenvalues), dtype=np.float64)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(values.shape[0]), values, marker="o", markersize=3)
    ax.set_xlabel("component index")
    ax.set_ylabel("eigenvalue")
    ax.set_title("covariance eigen spectrum")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def render_variance(points, path):
    ks = [k for k, _ in points]
    fr = [f for _, f in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, fr, marker="o", markersize=3)
    ax.set_xlabel("number of components")
    ax.set_ylabel("cumulative explained variance")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("explained variance")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def render_gmm_scatter(points, clusters, path):
    points = np.asarray(points, dtype=np.float64)
    clusters = np.asarray(clusters, dtype=np.int64)
    fig, ax = plt.subplots(figsize=(6, 5))
    cmap = plt.get_cmap("tab10")
    for c in np.unique(clusters):
        mask = clusters == c
        ax.scatter(
            points[mask, 0],
            points[mask, 1],
            s=6,
            color=cmap(int(c) % 10),
            label=f"cluster {c}",
            alpha=0.6,
            linewidths=0,
        )
    ax.set_xlabel("euclidean distance (slot 0)")
    ax.set_ylabel("cosine similarity (slot 0)")
    ax.set_title("mixture clusters on the first slot pair")
    ax.legend(fontsize=7, markerscale=2)
    return _finish(fig, path)


def render_lltrace(values, path):
    values = [float(v) for v in values]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(values)), values, marker="o", markersize=3)
    ax.set_xlabel("EM iteration")
    ax.set_ylabel("log-likelihood")
    ax.set_title("EM convergence")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def render_comparison(report, path):
    """Grouped bars of measured accuracy/macro-F1 with reference lines."""
    results = sorted(report.results, key=lambda r: r.name)
    names = [r.name for r in results]
    acc = [r.accuracy for r in results]
    f1 = [r.macro_f1 for r in results]
    x = np.arange(len(names))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(x - 0.18, acc, width=0.36, label="test accuracy")
    ax.bar(x + 0.18, f1, width=0.36, label="macro F1")
    ax.axhline(
        REFERENCE_CONSTANTS["bert_test_accuracy"],
        color="tab:red",
        linestyle="--",
        linewidth=1,
        label="bert accuracy (reference)",
    )
    ax.axhline(
        REFERENCE_CONSTANTS["human_f1"],
        color="tab:green",
        linestyle=":",
        linewidth=1,
        label="human F1 (reference)",
    )
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("score")
    ax.set_title("model comparison")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _finish(fig, path)
