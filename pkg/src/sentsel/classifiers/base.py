"""Shared classifier interface: prediction dispatch and JSON persistence.

Every model kind exposes predict_scores(X) -> (N, n_classes) and a payload
round-trip; predict() and save/load work uniformly on top of that. Saved
files are versioned JSON with full-precision floats, so a load followed by
predict reproduces the original predictions bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataError

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LearningCurve:
    """Per-epoch training trajectory (accuracy and loss on both splits)."""

    epochs: tuple
    train_accuracy: tuple
    test_accuracy: tuple
    train_loss: tuple
    test_loss: tuple

    def __post_init__(self):
        n = len(self.epochs)
        for name in ("train_accuracy", "test_accuracy", "train_loss", "test_loss"):
            if len(getattr(self, name)) != n:
                raise DataError(f"learning curve field {name} has length != {n}")
        if list(self.epochs) != sorted(set(self.epochs)):
            raise DataError("learning curve epochs must be strictly increasing")

    def __len__(self) -> int:
        return len(self.epochs)


def _feature_array(features) -> np.ndarray:
    """Accept a FeatureMatrix or a bare 2-D array."""
    X = getattr(features, "X", features)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"expected a 2-D feature array, got shape {X.shape}")
    return X


def predict(model, features) -> np.ndarray:
    """Predicted class per row: argmax of scores, ties to the lowest index."""
    X = _feature_array(features)
    if X.shape[1] != model.n_features:
        raise DataError(
            f"model expects {model.n_features} features, got {X.shape[1]}"
        )
    scores = model.predict_scores(X)
    return np.argmax(scores, axis=1)


def predict_proba(model, features) -> np.ndarray:
    """Per-class probabilities for kinds that define them."""
    X = _feature_array(features)
    if X.shape[1] != model.n_features:
        raise DataError(
            f"model expects {model.n_features} features, got {X.shape[1]}"
        )
    proba = getattr(model, "predict_proba_scores", None)
    if proba is None:
        raise DataError(f"model kind {model.kind!r} does not define probabilities")
    return proba(X)


def _model_classes() -> dict:
    # imported lazily so base does not depend on the concrete modules at import time
    from .forest import ForestModel
    from .gbt import GbtModel
    from .logistic import LogisticModel
    from .svm import SvmModel

    return {
        cls.kind: cls for cls in (LogisticModel, SvmModel, ForestModel, GbtModel)
    }


def save_model(model, path) -> None:
    record = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "payload": model.to_payload(),
    }
    Path(path).write_text(
        json.dumps(record, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def load_model(path):
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(record, dict) or "kind" not in record:
        raise DataError(f"{path} is not a model file")
    version = record.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version!r}")
    classes = _model_classes()
    kind = record["kind"]
    if kind not in classes:
        raise DataError(f"unknown model kind {kind!r}")
    return classes[kind].from_payload(record["payload"])
