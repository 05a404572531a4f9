"""Evaluation metrics and deterministic result artifacts.

evaluate() computes accuracy and macro-F1 (averaged over the classes that
actually occur in the reference labels). emit_report() writes the combined
JSON report plus a Markdown comparison table that includes fixed
paper-reported reference rows; emit_plot_data() writes the CSV series the
figures are drawn from. All output is byte-deterministic: sorted keys,
fixed float formatting, newline-terminated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError

# Paper-reported baselines shown alongside measured results.
REFERENCE_CONSTANTS = {
    "bert_test_accuracy": 0.77,
    "human_f1": 0.87,
    "paper_lr_f1": 0.525,
}
REFERENCE_SOURCE = "paper-reported"


def evaluate(predictions, labels) -> dict:
    """Accuracy and macro-F1 of predictions against reference labels.

    Macro-F1 averages per-class F1 over the classes present in labels; a
    class with zero precision+recall contributes 0. Raises on length
    mismatch or empty input.
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.shape != labels.shape or predictions.ndim != 1:
        raise DataError(
            f"prediction/label shape mismatch: {predictions.shape} vs {labels.shape}"
        )
    if predictions.shape[0] == 0:
        raise DataError("cannot evaluate zero predictions")

    accuracy = float(np.mean(predictions == labels))
    f1s = []
    for c in np.unique(labels):
        tp = np.sum((predictions == c) & (labels == c))
        fp = np.sum((predictions == c) & (labels != c))
        fn = np.sum((predictions != c) & (labels == c))
        denom = 2 * tp + fp + fn
        f1s.append(2.0 * tp / denom if denom else 0.0)
    return {"accuracy": accuracy, "macro_f1": float(np.mean(f1s))}


@dataclass(frozen=True)
class ModelResult:
    name: str
    accuracy: float
    macro_f1: float
    train_accuracy: float
    wall_time_seconds: float
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        for fname in ("accuracy", "macro_f1", "train_accuracy"):
            v = getattr(self, fname)
            if not (0.0 <= v <= 1.0):
                raise DataError(f"{self.name}: {fname}={v} outside [0, 1]")
        if self.wall_time_seconds < 0:
            raise DataError(f"{self.name}: negative wall time")


@dataclass(frozen=True)
class EvalReport:
    results: tuple                      # of ModelResult
    dataset_meta: dict = field(default_factory=dict)
    reference: dict = field(default_factory=lambda: dict(REFERENCE_CONSTANTS))


def _round6(obj):
    if isinstance(obj, float):
        return round(obj, 6)
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round6(v) for v in obj]
    return obj


REPORT_SCHEMA_VERSION = 1


def report_to_dict(report: EvalReport) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "dataset": report.dataset_meta,
        "models": {
            r.name: {
                "accuracy": r.accuracy,
                "macro_f1": r.macro_f1,
                "train_accuracy": r.train_accuracy,
                "wall_time_seconds": r.wall_time_seconds,
                "hyperparameters": r.hyperparameters,
            }
            for r in report.results
        },
        "reference": {k: {"value": v, "source": REFERENCE_SOURCE}
                      for k, v in report.reference.items()},
    }


def emit_report(report: EvalReport, json_path) -> Path:
    """Write <json_path> and a sibling .md comparison table.

    Returns the Markdown path. Floats are fixed at 6 decimals and keys
    sorted, so identical inputs give identical bytes.
    """
    json_path = Path(json_path)
    payload = _round6(report_to_dict(report))
    json_path.write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )

    lines = [
        "| model | test accuracy | macro F1 | train accuracy | wall time (s) | source |",
        "|---|---|---|---|---|---|",
    ]
    for r in sorted(report.results, key=lambda r: r.name):
        lines.append(
            f"| {r.name} | {r.accuracy:.6f} | {r.macro_f1:.6f} "
            f"| {r.train_accuracy:.6f} | {r.wall_time_seconds:.6f} | measured |"
        )
    ref = report.reference
    lines.append(
        f"| bert (reference) | {ref['bert_test_accuracy']:.6f} | - | - | - "
        f"| {REFERENCE_SOURCE} |"
    )
    lines.append(
        f"| human (reference) | - | {ref['human_f1']:.6f} | - | - | {REFERENCE_SOURCE} |"
    )
    lines.append(
        f"| logistic (reference) | - | {ref['paper_lr_f1']:.6f} | - | - "
        f"| {REFERENCE_SOURCE} |"
    )
    md_path = json_path.with_suffix(".md")
    md_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return md_path


PLOT_KINDS = ("curve", "eigspectrum", "variance", "gmmscatter", "lltrace")


def emit_plot_data(kind: str, payload, path) -> None:
    """Write one plottable series as CSV with a header row.

    curve:       LearningCurve
    eigspectrum: descending eigenvalues
    variance:    (k, cumulative fraction) pairs
    gmmscatter:  (points (N, 2), cluster ids (N,))
    lltrace:     log-likelihood values per EM iteration
    """
    path = Path(path)
    if kind == "curve":
        need = ("epochs", "train_accuracy", "test_accuracy", "train_loss", "test_loss")
        if not all(hasattr(payload, a) for a in need):
            raise DataError("curve payload must be a LearningCurve")
        lines = ["epoch,train_accuracy,test_accuracy,train_loss,test_loss"]
        for i in range(len(payload.epochs)):
            lines.append(
                f"{payload.epochs[i]},{payload.train_accuracy[i]!r},"
                f"{payload.test_accuracy[i]!r},{payload.train_loss[i]!r},"
                f"{payload.test_loss[i]!r}"
            )
    elif kind == "eigspectrum":
        values = [float(v) for v in payload]
        if not values:
            raise DataError("empty eigen spectrum")
        lines = ["index,eigenvalue"]
        lines += [f"{i},{v!r}" for i, v in enumerate(values)]
    elif kind == "variance":
        pairs = [(int(k), float(f)) for k, f in payload]
        if not pairs:
            raise DataError("empty variance curve")
        lines = ["k,cumulative_fraction"]
        lines += [f"{k},{f!r}" for k, f in pairs]
    elif kind == "gmmscatter":
        points, clusters = payload
        points = np.asarray(points, dtype=np.float64)
        clusters = np.asarray(clusters, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] != clusters.shape[0]:
            raise DataError("gmmscatter payload must be ((N, 2) points, (N,) clusters)")
        lines = ["euclid,cosine,cluster"]
        lines += [
            f"{float(points[i, 0])!r},{float(points[i, 1])!r},{int(clusters[i])}"
            for i in range(points.shape[0])
        ]
    elif kind == "lltrace":
        values = [float(v) for v in payload]
        if not values:
            raise DataError("empty log-likelihood trace")
        lines = ["iteration,log_likelihood"]
        lines += [f"{i},{v!r}" for i, v in enumerate(values)]
    else:
        raise DataError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_plot_data(kind: str, path):
    """Parse a file written by emit_plot_data back into its payload shape."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [line.split(",") for line in text.strip().split("\n")[1:]]
    if kind == "curve":
        from .classifiers.base import LearningCurve

        return LearningCurve(
            epochs=tuple(int(r[0]) for r in rows),
            train_accuracy=tuple(float(r[1]) for r in rows),
            test_accuracy=tuple(float(r[2]) for r in rows),
            train_loss=tuple(float(r[3]) for r in rows),
            test_loss=tuple(float(r[4]) for r in rows),
        )
    if kind == "eigspectrum":
        return [float(r[1]) for r in rows]
    if kind == "variance":
        return [(int(r[0]), float(r[1])) for r in rows]
    if kind == "gmmscatter":
        points = np.array([[float(r[0]), float(r[1])] for r in rows])
        clusters = np.array([int(r[2]) for r in rows], dtype=np.int64)
        return points, clusters
    if kind == "lltrace":
        return [float(r[1]) for r in rows]
    raise DataError(f"unknown plot kind {kind!r}")


def load_external_predictions(path) -> dict:
    """Read qa_id,predicted_slot lines (optional header) into a dict."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or (lineno == 1 and line.lower().startswith("qa_id")):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"line {lineno}: expected qa_id,predicted_slot")
        qa_id, slot = parts[0].strip(), parts[1].strip()
        try:
            slot_i = int(slot)
        except ValueError as exc:
            raise DataError(f"line {lineno}: bad slot {slot!r}") from exc
        if slot_i < 0:
            raise DataError(f"line {lineno}: negative slot")
        if qa_id in out:
            raise DataError(f"line {lineno}: duplicate qa_id {qa_id!r}")
        out[qa_id] = slot_i
    if not out:
        raise DataError(f"no predictions found in {path}")
    return out
