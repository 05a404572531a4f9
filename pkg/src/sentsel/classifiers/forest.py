"""Random forest: bootstrap-sampled Gini trees with majority voting.

Each tree gets its own RandomState derived from the master seed, draws a
bootstrap of the training rows, and considers floor(sqrt(d)) features per
split by default. Prediction is the plain vote count, argmax with ties to
the lowest class index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError
from .tree import Tree, grow_tree, tree_values


@dataclass(frozen=True)
class ForestModel:
    trees: tuple          # of Tree
    n_classes_: int
    n_features_: int
    training_meta: dict = field(default_factory=dict, compare=False)

    kind = "forest"

    @property
    def n_classes(self) -> int:
        return self.n_classes_

    @property
    def n_features(self) -> int:
        return self.n_features_

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        """Vote fraction per class; rows sum to 1."""
        X = np.asarray(X, dtype=np.float64)
        votes = np.zeros((X.shape[0], self.n_classes_))
        for tree in self.trees:
            counts = tree_values(tree, X)
            picked = np.argmax(counts, axis=1)
            votes[np.arange(X.shape[0]), picked] += 1.0
        return votes / len(self.trees)

    def predict_proba_scores(self, X: np.ndarray) -> np.ndarray:
        return self.predict_scores(X)

    def to_payload(self) -> dict:
        return {
            "trees": [t.to_payload() for t in self.trees],
            "n_classes": self.n_classes_,
            "n_features": self.n_features_,
            "training_meta": self.training_meta,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ForestModel":
        return cls(
            trees=tuple(Tree.from_payload(t) for t in payload["trees"]),
            n_classes_=int(payload["n_classes"]),
            n_features_=int(payload["n_features"]),
            training_meta=payload.get("training_meta", {}),
        )


def fit_forest(
    train,
    n_estimators: int = 60,
    min_samples_leaf: int = 8,
    max_features="sqrt",
    max_depth: int | None = None,
    seed: int = 0,
) -> ForestModel:
    if n_estimators < 1:
        raise ConfigError(f"n_estimators must be >= 1, got {n_estimators}")
    if min_samples_leaf < 1:
        raise ConfigError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
    X = np.asarray(train.X, dtype=np.float64)
    y = np.asarray(train.labels, dtype=np.int64)
    n, d = X.shape
    if n == 0:
        raise DataError("empty training matrix")
    n_distinct = np.unique(X, axis=0).shape[0]
    if n_distinct < min_samples_leaf:
        raise DataError(
            f"only {n_distinct} distinct samples for min_samples_leaf={min_samples_leaf}"
        )

    if max_features == "sqrt":
        mf = max(1, int(math.floor(math.sqrt(d))))
    elif max_features in ("all", None):
        mf = d
    elif isinstance(max_features, int):
        mf = max_features
    else:
        raise ConfigError(f"bad max_features {max_features!r}")

    n_classes = int(train.max_slots)
    master = np.random.RandomState(seed)
    tree_seeds = master.randint(0, 2**31 - 1, size=n_estimators)
    trees = []
    for s in tree_seeds:
        rng = np.random.RandomState(s)
        boot = rng.randint(0, n, size=n)
        trees.append(
            grow_tree(
                X[boot],
                y[boot],
                criterion="gini",
                n_classes=n_classes,
                max_depth=max_depth,
                min_samples_leaf=min_samples_leaf,
                max_features=mf,
                rng=rng,
            )
        )

    meta = {
        "n_estimators": n_estimators,
        "min_samples_leaf": min_samples_leaf,
        "max_features": mf,
        "max_depth": max_depth,
        "seed": seed,
    }
    return ForestModel(tuple(trees), n_classes, d, meta)
