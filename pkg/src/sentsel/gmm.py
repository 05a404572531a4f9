"""Gaussian mixture model with full covariances, fit by EM.

The E-step runs entirely in the log domain (log-sum-exp) and covariances get
a 1e-6 diagonal floor in every M-step, so the fit is numerically stable even
on the min-max-scaled distance pairs it is normally applied to. Components
whose responsibility mass collapses are re-seeded on the worst-explained
points and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, NumericError

COV_FLOOR = 1e-6
COLLAPSE_FRACTION = 1e-6  # component weight below this fraction of N counts as collapsed


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray       # K, sums to 1
    means: np.ndarray         # K x d
    covariances: np.ndarray   # K x d x d, symmetric positive definite
    log_likelihood_trace: tuple = ()
    n_reinits: int = 0
    seed: int = 0

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _data_covariance(data: np.ndarray) -> np.ndarray:
    n, d = data.shape
    centered = data - data.mean(axis=0)
    if n > 1:
        cov = (centered.T @ centered) / (n - 1)
    else:
        cov = np.zeros((d, d))
    return 0.5 * (cov + cov.T) + COV_FLOOR * np.eye(d)


def init_gmm(data: np.ndarray, n_components: int, seed: int = 0) -> GmmModel:
    """Seeded k-means++ style initialisation.

    Means are distinct data points chosen with probability proportional to
    squared distance from the already-chosen set; covariances start at the
    data covariance and weights uniform. A single component centres on the
    data mean directly.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ConfigError(f"expected a 2-D matrix, got shape {data.shape}")
    n, d = data.shape
    if n_components < 1:
        raise ConfigError(f"n_components must be >= 1, got {n_components}")
    if n_components > n:
        raise ConfigError(f"n_components ({n_components}) exceeds data size ({n})")

    base_cov = _data_covariance(data)
    if n_components == 1:
        means = data.mean(axis=0, keepdims=True)
    else:
        rng = np.random.RandomState(seed)
        chosen = [int(rng.randint(n))]
        d2 = np.sum((data - data[chosen[0]]) ** 2, axis=1)
        for _ in range(n_components - 1):
            total = d2.sum()
            if total > 0:
                idx = int(rng.choice(n, p=d2 / total))
            else:
                # all remaining points coincide with a chosen one
                remaining = sorted(set(range(n)) - set(chosen))
                idx = remaining[0]
            chosen.append(idx)
            d2 = np.minimum(d2, np.sum((data - data[idx]) ** 2, axis=1))
        means = data[np.array(chosen)]

    weights = np.full(n_components, 1.0 / n_components)
    covariances = np.repeat(base_cov[None, :, :], n_components, axis=0)
    return GmmModel(weights, means.copy(), covariances, (), 0, seed)


def _log_joint(model: GmmModel, data: np.ndarray) -> np.ndarray:
    """log( weight_k * N(x_n | mu_k, Sigma_k) ), shape (N, K)."""
    n, d = data.shape
    K = model.n_components
    out = np.empty((n, K))
    for k in range(K):
        try:
            chol = np.linalg.cholesky(model.covariances[k])
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"component {k} covariance is not positive definite") from exc
        # log|Sigma| = 2 sum(log diag L), quad form via triangular solve
        half_logdet = np.sum(np.log(np.diag(chol)))
        diff = data - model.means[k]
        solved = np.linalg.solve(chol, diff.T)
        quad = np.sum(solved * solved, axis=0)
        out[:, k] = (
            np.log(model.weights[k])
            - 0.5 * (d * np.log(2.0 * np.pi) + quad)
            - half_logdet
        )
    return out


def _logsumexp_rows(m: np.ndarray) -> np.ndarray:
    peak = m.max(axis=1, keepdims=True)
    return (peak + np.log(np.sum(np.exp(m - peak), axis=1, keepdims=True)))[:, 0]


def log_likelihood(model: GmmModel, data: np.ndarray) -> float:
    """Total log-likelihood of data under the mixture."""
    data = np.asarray(data, dtype=np.float64)
    return float(np.sum(_logsumexp_rows(_log_joint(model, data))))


def responsibilities(model: GmmModel, data: np.ndarray) -> np.ndarray:
    """Posterior component probabilities, shape (N, K); rows sum to 1."""
    data = np.asarray(data, dtype=np.float64)
    lj = _log_joint(model, data)
    return np.exp(lj - _logsumexp_rows(lj)[:, None])


def em_step(model: GmmModel, data: np.ndarray):
    """One EM iteration.

    Returns (updated model, responsibilities, log-likelihood of the *input*
    model). Collapsed components are re-seeded on the currently
    worst-explained points and tallied in n_reinits.
    """
    data = np.asarray(data, dtype=np.float64)
    n, d = data.shape
    K = model.n_components

    lj = _log_joint(model, data)
    log_norm = _logsumexp_rows(lj)
    ll = float(np.sum(log_norm))
    if not np.isfinite(ll):
        raise NumericError("log-likelihood is not finite")
    resp = np.exp(lj - log_norm[:, None])

    counts = resp.sum(axis=0)
    collapsed = np.flatnonzero(counts < COLLAPSE_FRACTION * n)

    weights = np.empty(K)
    means = np.empty((K, d))
    covariances = np.empty((K, d, d))
    eye = COV_FLOOR * np.eye(d)
    for k in range(K):
        if k in collapsed:
            continue
        nk = counts[k]
        weights[k] = nk / n
        mu = resp[:, k] @ data / nk
        centered = data - mu
        cov = (resp[:, k] * centered.T) @ centered / nk
        means[k] = mu
        covariances[k] = 0.5 * (cov + cov.T) + eye

    if collapsed.size:
        base_cov = _data_covariance(data)
        worst = np.argsort(log_norm, kind="stable")  # ascending: worst explained first
        for j, k in enumerate(collapsed):
            means[k] = data[worst[j % n]]
            covariances[k] = base_cov
            weights[k] = 1.0 / n
        weights = weights / weights.sum()

    updated = replace(
        model,
        weights=weights,
        means=means,
        covariances=covariances,
        n_reinits=model.n_reinits + int(collapsed.size),
    )
    return updated, resp, ll


def fit_gmm(
    data: np.ndarray,
    n_components: int,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> GmmModel:
    """Fit the mixture by EM until the mean log-likelihood moves < tol.

    The trace records total log-likelihood of the initial model and after
    every iteration; EM guarantees it is non-decreasing (up to the collapse
    re-seeds, which restart the affected component).
    """
    data = np.asarray(data, dtype=np.float64)
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    model = init_gmm(data, n_components, seed)
    n = data.shape[0]
    trace = [log_likelihood(model, data)]
    for _ in range(max_iter):
        model, _, _ = em_step(model, data)
        trace.append(log_likelihood(model, data))
        if abs(trace[-1] - trace[-2]) / n < tol:
            break
    return replace(model, log_likelihood_trace=tuple(trace))


def predict_cluster(model: GmmModel, points: np.ndarray) -> np.ndarray:
    """Most probable component per point; ties resolve to the lowest index."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[None, :]
    return np.argmax(_log_joint(model, points), axis=1)
