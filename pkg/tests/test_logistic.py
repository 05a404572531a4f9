"""Multinomial logistic regression trained by full-batch gradient descent."""

import numpy as np
import pytest

from oracles import central_diff
from sentsel.classifiers import fit_logistic, load_model, predict, predict_proba, save_model
from sentsel.classifiers.logistic import LogisticModel, loss_and_gradient, softmax
from sentsel.errors import ConfigError, DataError, NumericError
from sentsel.features import FeatureMatrix


def matrix(X, y, k):
    return FeatureMatrix(np.asarray(X, float), np.asarray(y, np.int64), k)


SEPARABLE = matrix([[0.0, 0.0], [0.0, 1.0], [4.0, 3.0], [4.0, 4.0]],
                   [0, 0, 1, 1], 2)


def test_softmax_rows_sum_to_one(rng):
    probs = softmax(rng.standard_normal((6, 4)) * 50)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(probs >= 0)


def test_gradient_matches_finite_differences(rng):
    X = rng.standard_normal((8, 20))
    y = rng.randint(0, 3, size=8)
    W = rng.standard_normal((3, 20)) * 0.3
    b = rng.standard_normal(3) * 0.1
    l2 = 0.01

    _, grad_w, grad_b = loss_and_gradient(W.copy(), b.copy(), X, y, l2)
    analytic = np.concatenate([grad_w.ravel(), grad_b])

    def f(flat):
        w = flat[:60].reshape(3, 20)
        return loss_and_gradient(w, flat[60:], X, y, l2)[0]

    numeric = central_diff(f, np.concatenate([W.ravel(), b]))
    rel = np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(numeric)))
    assert rel < 1e-5


def test_separable_toy_reaches_full_accuracy():
    model, curve = fit_logistic(SEPARABLE, SEPARABLE, learning_rate=0.5,
                                epochs=200, l2=0.0, seed=0)
    assert curve.train_accuracy[-1] == 1.0
    assert np.array_equal(predict(model, SEPARABLE), SEPARABLE.labels)


def test_loss_is_monotone_for_small_lr():
    _, curve = fit_logistic(SEPARABLE, SEPARABLE, learning_rate=0.1,
                            epochs=150, l2=0.0, seed=1)
    losses = np.array(curve.train_loss)
    assert np.all(np.diff(losses) <= 1e-12)


def test_curve_shape_and_bounds():
    _, curve = fit_logistic(SEPARABLE, SEPARABLE, epochs=40, seed=0)
    assert len(curve) == 40
    assert curve.epochs == tuple(range(1, 41))
    for acc in (curve.train_accuracy, curve.test_accuracy):
        assert all(0.0 <= a <= 1.0 for a in acc)
    for loss in (curve.train_loss, curve.test_loss):
        assert all(v >= 0.0 for v in loss)


def test_l2_shrinks_weights():
    loose, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=120, l2=0.0, seed=0)
    tight, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=120, l2=1.0, seed=0)
    assert np.linalg.norm(tight.weights) < np.linalg.norm(loose.weights)


def test_numeric_blowup_names_the_epoch():
    with pytest.raises(NumericError, match="epoch"):
        fit_logistic(SEPARABLE, SEPARABLE, learning_rate=1e200, epochs=5,
                     l2=1e-4, seed=0)


def test_validation_errors():
    with pytest.raises(ConfigError):
        fit_logistic(SEPARABLE, SEPARABLE, learning_rate=0.0)
    with pytest.raises(ConfigError):
        fit_logistic(SEPARABLE, SEPARABLE, epochs=0)
    with pytest.raises(ConfigError):
        fit_logistic(SEPARABLE, SEPARABLE, l2=-0.1)
    empty = matrix(np.zeros((0, 2)), np.zeros(0, np.int64), 2)
    with pytest.raises(DataError):
        fit_logistic(SEPARABLE, empty)


def test_tie_prediction_picks_lowest_class():
    model = LogisticModel(weights=np.zeros((3, 2)), bias=np.zeros(3))
    X = np.array([[1.0, -2.0], [0.5, 0.5]])
    assert np.array_equal(predict(model, X), [0, 0])


def test_proba_rows_normalized():
    model, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=50, seed=0)
    probs = predict_proba(model, SEPARABLE)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


def test_serialization_round_trip(tmp_path):
    model, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=60, seed=3)
    path = tmp_path / "logistic.json"
    save_model(model, path)
    back = load_model(path)
    assert back.kind == "logistic"
    assert np.array_equal(
        model.predict_scores(SEPARABLE.X), back.predict_scores(SEPARABLE.X)
    )


def test_seed_controls_init():
    a, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=5, seed=0)
    b, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=5, seed=0)
    c, _ = fit_logistic(SEPARABLE, SEPARABLE, epochs=5, seed=4)
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.weights, c.weights)
