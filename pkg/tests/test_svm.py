"""Kernel SVM: the SMO solver against a QP oracle, and the OVR wrapper."""

import numpy as np
import pytest

from oracles import qp_svm_dual
from sentsel.classifiers import fit_svm, load_model, predict, save_model
from sentsel.classifiers.svm import (
    GAMMA_GRID,
    dual_objective,
    kernel_matrix,
    smo_solve,
)
from sentsel.errors import ConfigError, DataError, NumericError
from sentsel.features import FeatureMatrix


def matrix(X, y, k):
    return FeatureMatrix(np.asarray(X, float), np.asarray(y, np.int64), k)


XOR = matrix([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]],
             [0, 0, 1, 1], 2)


def test_gamma_grid_constant():
    assert GAMMA_GRID == (0.0001, 0.001, 0.005, 0.1, 1.0, 3.0, 5.0)


def test_rbf_kernel_is_psd(rng):
    X = rng.standard_normal((30, 4))
    K = kernel_matrix("rbf", X, X, gamma=0.7, degree=3)
    assert np.allclose(K, K.T, atol=1e-12)
    assert np.allclose(np.diag(K), 1.0, atol=1e-12)
    eigvals = np.linalg.eigvalsh(K)
    assert eigvals.min() >= -1e-8


def test_kernel_kinds(rng):
    A = rng.standard_normal((5, 3))
    B = rng.standard_normal((4, 3))
    lin = kernel_matrix("linear", A, B, gamma=1.0, degree=3)
    assert np.allclose(lin, A @ B.T)
    poly = kernel_matrix("poly", A, B, gamma=0.5, degree=2)
    assert np.allclose(poly, (0.5 * (A @ B.T) + 1.0) ** 2)


def test_xor_with_rbf_is_learnable():
    model = fit_svm(XOR, kernel="rbf", gamma=1.0, C=100.0)
    assert np.array_equal(predict(model, XOR), XOR.labels)


def test_smo_matches_qp_oracle_linear_separable():
    # the spec-style hand case: clearly separable in 2-D, linear kernel
    X = np.array([[0.0, 0.0], [0.2, 0.3], [2.0, 2.0], [2.2, 1.8]])
    y = np.array([-1.0, -1.0, 1.0, 1.0])
    K = kernel_matrix("linear", X, X, gamma=1.0, degree=3)
    alpha, bias, info = smo_solve(K, y, C=10.0, tol=1e-6)
    assert info["converged"]
    got = dual_objective(K, y, alpha)
    want = qp_svm_dual(K, y, 10.0)
    assert got == pytest.approx(want, abs=1e-3)


def test_smo_matches_qp_oracle_random(rng):
    for trial in range(6):
        n = int(rng.randint(6, 21))
        X = rng.standard_normal((n, 3))
        y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
        if np.all(y > 0) or np.all(y < 0):
            y[0] = -y[0]
        K = kernel_matrix("rbf", X, X, gamma=0.5, degree=3)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        alpha, _, info = smo_solve(K, y, C, tol=1e-7)
        got = dual_objective(K, y, alpha)
        want = qp_svm_dual(K, y, C)
        assert got == pytest.approx(want, abs=1e-3)
        # box and equality constraints hold
        assert np.all(alpha >= -1e-12)
        assert np.all(alpha <= C + 1e-12)
        assert abs(alpha @ y) < 1e-9


def test_kkt_certificate_reported():
    K = kernel_matrix("rbf", XOR.X, XOR.X, gamma=1.0, degree=3)
    y = np.where(XOR.labels == 0, 1.0, -1.0)
    _, _, info = smo_solve(K, y, C=100.0, tol=1e-4)
    assert info["converged"]
    assert info["gap"] <= 1e-4


def test_iteration_cap_raises_with_violation_count():
    X = np.array([[0.0], [0.3], [1.1], [2.0], [2.4], [3.3]])
    y = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    K = kernel_matrix("rbf", X, X, gamma=2.0, degree=3)
    with pytest.raises(NumericError, match="violation"):
        smo_solve(K, y, C=1000.0, tol=1e-9, max_iter=1)


def test_support_vectors_only_are_stored():
    X = np.vstack([np.random.RandomState(0).standard_normal((20, 2)) - 3,
                   np.random.RandomState(1).standard_normal((20, 2)) + 3])
    m = matrix(X, [0] * 20 + [1] * 20, 2)
    model = fit_svm(m, kernel="rbf", gamma=0.5, C=10.0)
    coef, sv, _ = model.machines[0]
    assert sv.shape[0] < 40  # interior points were dropped
    assert sv.shape[0] == coef.shape[0]
    assert np.array_equal(predict(model, m), m.labels)


def test_degenerate_class_machines():
    m = matrix([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1, 1, 1], 3)
    model = fit_svm(m, kernel="rbf", gamma=0.1, C=10.0)
    assert np.array_equal(predict(model, m), [1, 1, 1])
    scores = model.predict_scores(m.X)
    assert np.all(scores[:, 1] == 1.0)   # the only populated class
    assert np.all(scores[:, 0] == -1.0)  # absent classes score -1
    assert np.all(scores[:, 2] == -1.0)


def test_fit_validation():
    with pytest.raises(ConfigError):
        fit_svm(XOR, kernel="sigmoid")
    with pytest.raises(ConfigError):
        fit_svm(XOR, kernel="rbf", gamma=0.0)
    with pytest.raises(ConfigError):
        fit_svm(XOR, C=0.0)
    empty = matrix(np.zeros((0, 2)), np.zeros(0, np.int64), 2)
    with pytest.raises(DataError):
        fit_svm(empty)


def test_predict_dimension_mismatch():
    model = fit_svm(XOR, kernel="rbf", gamma=1.0, C=100.0)
    with pytest.raises(DataError):
        predict(model, np.zeros((3, 5)))


def test_serialization_round_trip(tmp_path):
    model = fit_svm(XOR, kernel="rbf", gamma=1.0, C=100.0)
    path = tmp_path / "svm.json"
    save_model(model, path)
    back = load_model(path)
    assert np.array_equal(
        model.predict_scores(XOR.X), back.predict_scores(XOR.X)
    )
