"""Principal component analysis on the feature matrix.

Covariance eigendecomposition via cyclic Jacobi rotations (the matrix is
20x20, so a dependency-free symmetric solver is plenty), plus projection,
reconstruction error, and the eigen-spectrum / cumulative-variance
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError


def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns,
    unsorted. Rotations zero one off-diagonal pair at a time; convergence is
    quadratic once the off-diagonal mass is small.
    """
    A = np.array(A, dtype=np.float64)
    d = A.shape[0]
    if A.shape != (d, d):
        raise DataError(f"expected square matrix, got {A.shape}")
    V = np.eye(d)
    if d == 1:
        return np.diag(A).copy(), V

    scale = np.sqrt(np.sum(A * A))
    if scale == 0.0:
        return np.zeros(d), V
    for _ in range(max_sweeps):
        # cancellation can push the difference a hair below zero
        off = np.sqrt(max(0.0, np.sum(A * A) - np.sum(np.diag(A) ** 2)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # Rutishauser rotation: smaller root keeps |t| <= 1 for stability
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau  # asymptotic form; tau*tau would overflow
                elif tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- J^T A J and V <- V J applied as column then row updates
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    return np.diag(A).copy(), V


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # d
    components: np.ndarray    # d x d, rows are principal directions, descending
    eigenvalues: np.ndarray   # d, sorted descending

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def fit_pca(X: np.ndarray) -> PcaModel:
    """Fit PCA: sample covariance (N-1 denominator), full eigendecomposition.

    Input is expected already z-scored by the caller. Components are sorted by
    descending eigenvalue and sign-fixed so each row's largest-magnitude entry
    is positive, making outputs reproducible across runs.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise DataError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise DataError(f"need at least 2 rows to fit PCA, got {n}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = (Xc.T @ Xc) / (n - 1)
    cov = 0.5 * (cov + cov.T)

    eigvals, eigvecs = jacobi_eigh(cov)
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    components = eigvecs[:, order].T
    for i in range(d):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    return PcaModel(mean, components, eigvals)


def _check_k(model: PcaModel, k: int) -> None:
    if not (1 <= k <= model.dim):
        raise ConfigError(f"k must be in [1, {model.dim}], got {k}")


def project(model: PcaModel, X: np.ndarray, k: int) -> np.ndarray:
    """Coordinates of X in the first k principal directions."""
    _check_k(model, k)
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.dim:
        raise DataError(f"expected {model.dim} columns, got {X.shape[1]}")
    return (X - model.mean) @ model.components[:k].T


def reconstruct(model: PcaModel, P: np.ndarray, k: int) -> np.ndarray:
    """Inverse of project: back to the original space from k coordinates."""
    _check_k(model, k)
    return np.asarray(P) @ model.components[:k] + model.mean


def reconstruction_error(model: PcaModel, X: np.ndarray, k: int) -> float:
    """Mean squared entry-wise error of project-then-reconstruct at k."""
    _check_k(model, k)
    rec = reconstruct(model, project(model, X, k), k)
    return float(np.mean((np.asarray(X) - rec) ** 2))


def variance_curve(model: PcaModel) -> list[tuple[int, float]]:
    """(k, cumulative explained-variance fraction) for k = 1..d.

    Eigenvalues are clamped at zero (tiny negatives are rounding) so the curve
    is monotone non-decreasing and ends at exactly 1.0.
    """
    lam = np.maximum(model.eigenvalues, 0.0)
    total = lam.sum()
    if total <= 0.0:
        return [(k + 1, 1.0) for k in range(model.dim)]
    fractions = np.cumsum(lam) / total
    fractions[-1] = 1.0
    return [(k + 1, float(fractions[k])) for k in range(model.dim)]
