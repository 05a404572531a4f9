"""Decision tree grown by exhaustive threshold search.

One builder serves both uses: Gini impurity with class-count leaves for the
random forest, squared error with mean-value leaves for boosting. Nodes are
stored flat in preorder arrays, which keeps prediction a tight vectorised
loop and makes serialisation trivial.

Tie-breaking is fixed everywhere (first candidate wins, features scanned in
ascending index order) so a seeded build is exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

LEAF = -1


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray    # int per node, LEAF marks a leaf
    threshold: np.ndarray  # float per node, x <= threshold goes left
    left: np.ndarray       # int child ids
    right: np.ndarray
    value: np.ndarray      # (n_nodes, value_dim): class counts or [mean]

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def to_payload(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Tree":
        return cls(
            feature=np.asarray(payload["feature"], dtype=np.int64),
            threshold=np.asarray(payload["threshold"], dtype=np.float64),
            left=np.asarray(payload["left"], dtype=np.int64),
            right=np.asarray(payload["right"], dtype=np.int64),
            value=np.asarray(payload["value"], dtype=np.float64),
        )


def _gini_cost(counts: np.ndarray) -> np.ndarray:
    """Size-weighted Gini impurity n * (1 - sum p^2), given per-class counts."""
    n = counts.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = n - np.where(n > 0, (counts * counts).sum(axis=-1) / n, 0.0)
    return cost


def _best_split_gini(X, y_onehot, sample_idx, features, min_leaf):
    best = None  # (cost, feature, threshold)
    m = sample_idx.shape[0]
    total = y_onehot[sample_idx].sum(axis=0)
    for f in features:
        xs = X[sample_idx, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        cum = np.cumsum(y_onehot[sample_idx][order], axis=0)
        sizes = np.arange(1, m)
        ok = (
            (xs_sorted[:-1] < xs_sorted[1:])
            & (sizes >= min_leaf)
            & (m - sizes >= min_leaf)
        )
        if not ok.any():
            continue
        left_counts = cum[:-1][ok]
        right_counts = total - left_counts
        cost = _gini_cost(left_counts) + _gini_cost(right_counts)
        i = int(np.argmin(cost))
        if best is None or cost[i] < best[0]:
            pos = np.flatnonzero(ok)[i]
            thr = 0.5 * (xs_sorted[pos] + xs_sorted[pos + 1])
            best = (float(cost[i]), int(f), float(thr))
    return best, float(_gini_cost(total[None, :])[0])


def _best_split_mse(X, y, sample_idx, features, min_leaf):
    best = None
    ys = y[sample_idx]
    m = sample_idx.shape[0]
    total_sum = ys.sum()
    total_sq = (ys * ys).sum()
    parent_cost = float(total_sq - total_sum * total_sum / m)
    for f in features:
        xs = X[sample_idx, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        y_sorted = ys[order]
        cum_y = np.cumsum(y_sorted)
        cum_y2 = np.cumsum(y_sorted * y_sorted)
        sizes = np.arange(1, m)
        ok = (
            (xs_sorted[:-1] < xs_sorted[1:])
            & (sizes >= min_leaf)
            & (m - sizes >= min_leaf)
        )
        if not ok.any():
            continue
        nl = sizes[ok].astype(np.float64)
        sl = cum_y[:-1][ok]
        ql = cum_y2[:-1][ok]
        # sum of squared errors decomposes into per-side sum(y^2) - (sum y)^2 / n
        cost = (ql - sl * sl / nl) + ((total_sq - ql) - (total_sum - sl) ** 2 / (m - nl))
        i = int(np.argmin(cost))
        if best is None or cost[i] < best[0]:
            pos = np.flatnonzero(ok)[i]
            thr = 0.5 * (xs_sorted[pos] + xs_sorted[pos + 1])
            best = (float(cost[i]), int(f), float(thr))
    return best, parent_cost


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    criterion: str,
    n_classes: int | None = None,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.RandomState | None = None,
) -> Tree:
    """Fit a single tree. criterion is "gini" (int labels) or "mse" (real y).

    max_features < d draws a fresh random feature subset at every node, which
    requires rng. max_depth of None means grow until pure or unsplittable.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if criterion not in ("gini", "mse"):
        raise ConfigError(f"unknown tree criterion {criterion!r}")
    if min_samples_leaf < 1:
        raise ConfigError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
    if max_features is not None and not (1 <= max_features <= d):
        raise ConfigError(f"max_features must be in [1, {d}], got {max_features}")
    if max_features is not None and max_features < d and rng is None:
        raise ConfigError("feature subsampling requires an rng")

    if criterion == "gini":
        y = np.asarray(y, dtype=np.int64)
        if n_classes is None:
            n_classes = int(y.max()) + 1 if n else 1
        y_onehot = np.zeros((n, n_classes))
        y_onehot[np.arange(n), y] = 1.0
    else:
        y = np.asarray(y, dtype=np.float64)

    feature, threshold, left, right, value = [], [], [], [], []
    all_features = np.arange(d)

    def leaf_value(idx):
        if criterion == "gini":
            return y_onehot[idx].sum(axis=0)
        return np.array([y[idx].mean()])

    # explicit stack, preorder: deep trees must not hit the recursion limit
    stack = [(np.arange(n), 0, LEAF, "")]
    while stack:
        idx, depth, parent, side = stack.pop()
        node = len(feature)
        if parent != LEAF:
            (left if side == "l" else right)[parent] = node

        m = idx.shape[0]
        pure = np.all(y[idx] == y[idx[0]])
        best = None
        if not (
            (max_depth is not None and depth >= max_depth)
            or m < 2 * min_samples_leaf
            or pure
        ):
            if max_features is not None and max_features < d:
                cand = np.sort(rng.choice(d, size=max_features, replace=False))
            else:
                cand = all_features
            if criterion == "gini":
                best, parent_cost = _best_split_gini(
                    X, y_onehot, idx, cand, min_samples_leaf
                )
            else:
                best, parent_cost = _best_split_mse(X, y, idx, cand, min_samples_leaf)
            if best is not None and not best[0] < parent_cost:
                best = None

        value.append(leaf_value(idx))
        if best is None:
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            continue
        _, f, thr = best
        feature.append(f)
        threshold.append(thr)
        left.append(LEAF)   # patched when the child is emitted
        right.append(LEAF)
        go_left = X[idx, f] <= thr
        # push right first so the left child is emitted (and numbered) first
        stack.append((idx[~go_left], depth + 1, node, "r"))
        stack.append((idx[go_left], depth + 1, node, "l"))
    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
    )


def tree_values(tree: Tree, X: np.ndarray) -> np.ndarray:
    """Leaf value for every row of X, shape (N, value_dim)."""
    X = np.asarray(X, dtype=np.float64)
    node = np.zeros(X.shape[0], dtype=np.int64)
    while True:
        internal = tree.feature[node] >= 0
        if not internal.any():
            break
        rows = np.flatnonzero(internal)
        cur = node[rows]
        go_left = X[rows, tree.feature[cur]] <= tree.threshold[cur]
        node[rows] = np.where(go_left, tree.left[cur], tree.right[cur])
    return tree.value[node]
