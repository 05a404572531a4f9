"""Gradient boosting for multiclass classification.

Boosts shallow regression trees on the multinomial deviance: per round, one
tree per class is fit to the residual (one-hot minus softmax), and leaves
carry plain mean residuals. Scores start at zero, so a zero-round model
predicts the uniform distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError, NumericError
from .logistic import softmax
from .tree import Tree, grow_tree, tree_values


@dataclass(frozen=True)
class GbtModel:
    rounds: tuple         # rounds[r][k] is the Tree for class k at round r
    learning_rate: float
    n_classes_: int
    n_features_: int
    training_meta: dict = field(default_factory=dict, compare=False)

    kind = "gbt"

    @property
    def n_classes(self) -> int:
        return self.n_classes_

    @property
    def n_features(self) -> int:
        return self.n_features_

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        F = np.zeros((X.shape[0], self.n_classes_))
        for stage in self.rounds:
            for k, tree in enumerate(stage):
                F[:, k] += self.learning_rate * tree_values(tree, X)[:, 0]
        return F

    def predict_proba_scores(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.predict_scores(X))

    def to_payload(self) -> dict:
        return {
            "rounds": [[t.to_payload() for t in stage] for stage in self.rounds],
            "learning_rate": self.learning_rate,
            "n_classes": self.n_classes_,
            "n_features": self.n_features_,
            "training_meta": self.training_meta,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "GbtModel":
        return cls(
            rounds=tuple(
                tuple(Tree.from_payload(t) for t in stage)
                for stage in payload["rounds"]
            ),
            learning_rate=float(payload["learning_rate"]),
            n_classes_=int(payload["n_classes"]),
            n_features_=int(payload["n_features"]),
            training_meta=payload.get("training_meta", {}),
        )


def _deviance(F: np.ndarray, y: np.ndarray) -> float:
    p = softmax(F)[np.arange(F.shape[0]), y]
    return float(-np.mean(np.log(np.maximum(p, 1e-300))))


def fit_gbt(
    train,
    n_estimators: int = 50,
    learning_rate: float = 0.1,
    max_depth: int = 4,
    min_samples_leaf: int = 1,
    seed: int = 0,
) -> GbtModel:
    """Boost n_estimators rounds. The fit itself is deterministic; seed is
    recorded for provenance only. training_meta keeps the deviance trace
    (initial value plus one entry per round)."""
    if n_estimators < 1:
        raise ConfigError(f"n_estimators must be >= 1, got {n_estimators}")
    if not (0 < learning_rate <= 1):
        raise ConfigError(f"learning_rate must be in (0, 1], got {learning_rate}")
    if max_depth < 0:
        raise ConfigError(f"max_depth must be >= 0, got {max_depth}")
    X = np.asarray(train.X, dtype=np.float64)
    y = np.asarray(train.labels, dtype=np.int64)
    n, d = X.shape
    if n == 0:
        raise DataError("empty training matrix")
    K = int(train.max_slots)
    onehot = np.zeros((n, K))
    onehot[np.arange(n), y] = 1.0

    F = np.zeros((n, K))
    trace = [_deviance(F, y)]
    rounds = []
    for r in range(1, n_estimators + 1):
        probs = softmax(F)
        residual = onehot - probs
        if not np.all(np.isfinite(residual)):
            raise NumericError(f"non-finite residuals at round {r}")
        stage = []
        for k in range(K):
            tree = grow_tree(
                X,
                residual[:, k],
                criterion="mse",
                max_depth=max_depth,
                min_samples_leaf=min_samples_leaf,
            )
            F[:, k] += learning_rate * tree_values(tree, X)[:, 0]
            stage.append(tree)
        rounds.append(tuple(stage))
        trace.append(_deviance(F, y))

    meta = {
        "n_estimators": n_estimators,
        "learning_rate": learning_rate,
        "max_depth": max_depth,
        "min_samples_leaf": min_samples_leaf,
        "seed": seed,
        "deviance_trace": trace,
    }
    return GbtModel(tuple(rounds), learning_rate, K, d, meta)
