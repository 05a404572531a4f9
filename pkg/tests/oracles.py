"""Independent reference implementations used to check the real code.

Everything here is deliberately written with different algorithms than the
package: eigenpairs come from power iteration with deflation instead of
Jacobi sweeps, gradients from central differences instead of calculus, SVM
duals from a general-purpose QP solver instead of SMO, and F1 from plain
dict counting instead of vectorised masks.
"""

import numpy as np


def power_eigh(S, n_iter=20000, tol=1e-14):
    """All eigenpairs of a symmetric PSD matrix, eigenvalues descending.

    Power iteration on the deflated matrix; each found vector is projected
    out of the iterate every step so rounding cannot reintroduce it.
    """
    S = np.asarray(S, dtype=np.float64)
    d = S.shape[0]
    eigvals = np.zeros(d)
    eigvecs = np.zeros((d, d))
    work = S.copy()
    for j in range(d):
        rng = np.random.RandomState(j + 1)
        v = rng.standard_normal(d)
        if j:
            v -= eigvecs[:, :j] @ (eigvecs[:, :j].T @ v)
        v /= np.linalg.norm(v)
        for _ in range(n_iter):
            w = work @ v
            if j:
                w -= eigvecs[:, :j] @ (eigvecs[:, :j].T @ w)
            norm = np.linalg.norm(w)
            if norm < 1e-300:
                # deflated matrix is (numerically) zero: eigenvalue 0
                w = v
                norm = 1.0
            w /= norm
            if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < tol:
                v = w
                break
            v = w
        lam = float(v @ S @ v)
        eigvals[j] = lam
        eigvecs[:, j] = v
        work = work - lam * np.outer(v, v)
    order = np.argsort(eigvals, kind="stable")[::-1]
    return eigvals[order], eigvecs[:, order]


def central_diff(f, x, eps=1e-6):
    """Central-difference gradient of scalar f at flat array x."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        bump = np.zeros_like(x)
        bump[i] = eps
        g[i] = (f(x + bump) - f(x - bump)) / (2.0 * eps)
    return g


def qp_svm_dual(K, y, C):
    """Optimal soft-margin dual value via cvxopt's interior-point QP.

    maximise  sum(a) - 0.5 a'Qa   s.t. 0 <= a <= C,  y'a = 0,
    with Q = (yy') * K. Returns the maximised objective.
    """
    from cvxopt import matrix, solvers

    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    Q = np.outer(y, y) * K
    # regularise: cvxopt wants P strictly feasible-friendly; tiny ridge
    P = matrix(Q + 1e-10 * np.eye(n))
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), C * np.ones(n)]))
    A = matrix(y.reshape(1, n))
    b = matrix(np.zeros(1))
    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-10
    solvers.options["reltol"] = 1e-10
    sol = solvers.qp(P, q, G, h, A, b)
    a = np.asarray(sol["x"]).ravel()
    return float(a.sum() - 0.5 * a @ Q @ a)


def macro_f1_reference(predictions, labels):
    """Macro F1 over classes present in labels, by plain counting."""
    tp, fp, fn = {}, {}, {}
    for p, t in zip(predictions, labels):
        if p == t:
            tp[t] = tp.get(t, 0) + 1
        else:
            fp[p] = fp.get(p, 0) + 1
            fn[t] = fn.get(t, 0) + 1
    scores = []
    for c in sorted(set(labels)):
        denom = 2 * tp.get(c, 0) + fp.get(c, 0) + fn.get(c, 0)
        scores.append(2.0 * tp.get(c, 0) / denom if denom else 0.0)
    return sum(scores) / len(scores)
