"""Multinomial logistic regression trained by full-batch gradient descent.

The loss/gradient pair is exposed as a pure function so it can be checked
against finite differences. Training records a per-epoch learning curve on
both splits, which is what the accuracy/loss-versus-epochs plots are drawn
from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError, NumericError
from .base import LearningCurve


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_gradient(weights, bias, X, y, l2):
    """Mean cross-entropy plus 0.5 * l2 * ||W||^2, with gradients.

    Returns (loss, grad_weights, grad_bias). y holds integer labels.
    """
    n = X.shape[0]
    probs = softmax(X @ weights.T + bias)
    picked = probs[np.arange(n), y]
    loss = -np.mean(np.log(np.maximum(picked, 1e-300)))
    loss += 0.5 * l2 * float(np.sum(weights * weights))
    delta = probs
    delta[np.arange(n), y] -= 1.0
    grad_w = delta.T @ X / n + l2 * weights
    grad_b = delta.mean(axis=0)
    return float(loss), grad_w, grad_b


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray  # n_classes x n_features
    bias: np.ndarray     # n_classes
    training_meta: dict = field(default_factory=dict, compare=False)

    kind = "logistic"

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights.T + self.bias

    def predict_proba_scores(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.predict_scores(X))

    def to_payload(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "training_meta": self.training_meta,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
            training_meta=payload.get("training_meta", {}),
        )


def _accuracy(scores: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.argmax(scores, axis=1) == y))


def fit_logistic(
    train,
    test,
    learning_rate: float = 0.5,
    epochs: int = 300,
    l2: float = 1e-4,
    seed: int = 0,
):
    """Train on the train split, tracking the curve on train and test.

    train/test carry .X, .labels and .max_slots (the class count). Returns
    (model, curve); the curve's losses are unregularised cross-entropy.
    """
    if learning_rate <= 0:
        raise ConfigError(f"learning_rate must be > 0, got {learning_rate}")
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")
    if l2 < 0:
        raise ConfigError(f"l2 must be >= 0, got {l2}")
    X, y = np.asarray(train.X, dtype=np.float64), np.asarray(train.labels)
    Xt, yt = np.asarray(test.X, dtype=np.float64), np.asarray(test.labels)
    if X.shape[0] == 0 or Xt.shape[0] == 0:
        raise DataError("empty training or test matrix")
    K = int(train.max_slots)

    rng = np.random.RandomState(seed)
    weights = rng.normal(0.0, 0.01, size=(K, X.shape[1]))
    bias = np.zeros(K)

    rows = ([], [], [], [], [])
    for epoch in range(1, epochs + 1):
        # overflow surfaces as the explicit non-finite check below
        with np.errstate(over="ignore", invalid="ignore"):
            loss, grad_w, grad_b = loss_and_gradient(weights, bias, X, y, l2)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad_w))):
            raise NumericError(f"non-finite loss or gradient at epoch {epoch}")
        weights = weights - learning_rate * grad_w
        bias = bias - learning_rate * grad_b

        train_scores = X @ weights.T + bias
        test_scores = Xt @ weights.T + bias
        train_p = softmax(train_scores)[np.arange(X.shape[0]), y]
        test_p = softmax(test_scores)[np.arange(Xt.shape[0]), yt]
        rows[0].append(epoch)
        rows[1].append(_accuracy(train_scores, y))
        rows[2].append(_accuracy(test_scores, yt))
        rows[3].append(float(-np.mean(np.log(np.maximum(train_p, 1e-300)))))
        rows[4].append(float(-np.mean(np.log(np.maximum(test_p, 1e-300)))))

    meta = {
        "learning_rate": learning_rate,
        "epochs": epochs,
        "l2": l2,
        "seed": seed,
        "final_train_loss": rows[3][-1],
    }
    curve = LearningCurve(*(tuple(r) for r in rows))
    return LogisticModel(weights, bias, meta), curve
