"""Single CART trees: split correctness, bounds, and the flat layout."""

import numpy as np
import pytest

from sentsel.classifiers.tree import LEAF, Tree, grow_tree, tree_values
from sentsel.errors import ConfigError


def leaf_assignments(tree, X):
    """Row index of the leaf each sample lands in, by walking the arrays."""
    out = np.zeros(X.shape[0], dtype=np.int64)
    for i, x in enumerate(X):
        node = 0
        while tree.feature[node] != LEAF:
            if x[tree.feature[node]] <= tree.threshold[node]:
                node = tree.left[node]
            else:
                node = tree.right[node]
        out[i] = node
    return out


def test_fully_grown_tree_memorizes():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 0, 1])
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    preds = np.argmax(tree_values(tree, X), axis=1)
    assert np.array_equal(preds, y)


def test_gini_split_hand_case():
    # one clean boundary: cost drops to zero on either side of 1.5
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    assert tree.n_nodes == 3
    assert tree.feature[0] == 0
    assert tree.threshold[0] == pytest.approx(1.5)  # midpoint, not a data value


def test_mse_split_hand_case():
    X = np.array([[0.0], [1.0]])
    y = np.array([0.0, 1.0])
    tree = grow_tree(X, y, "mse", min_samples_leaf=1)
    assert tree.threshold[0] == pytest.approx(0.5)
    vals = tree_values(tree, X)[:, 0]
    assert np.allclose(vals, [0.0, 1.0])


def test_x_equal_to_threshold_goes_left():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    at_threshold = tree_values(tree, np.array([[1.5]]))
    assert np.argmax(at_threshold) == 0  # ties on the boundary go left


def test_min_samples_leaf_is_respected(rng):
    X = rng.standard_normal((60, 3))
    y = rng.randint(0, 3, size=60)
    tree = grow_tree(X, y, "gini", n_classes=3, min_samples_leaf=5)
    leaves = leaf_assignments(tree, X)
    _, counts = np.unique(leaves, return_counts=True)
    assert counts.min() >= 5


def test_max_depth_is_respected(rng):
    X = rng.standard_normal((80, 4))
    y = rng.randint(0, 2, size=80)
    tree = grow_tree(X, y, "gini", n_classes=2, max_depth=3, min_samples_leaf=1)
    # depth of every node by walking down from the root
    depth = {0: 0}
    max_seen = 0
    for node in range(tree.n_nodes):
        d = depth[node]
        max_seen = max(max_seen, d)
        if tree.feature[node] != LEAF:
            depth[tree.left[node]] = d + 1
            depth[tree.right[node]] = d + 1
    assert max_seen <= 3


def test_max_depth_zero_is_a_single_leaf(rng):
    X = rng.standard_normal((10, 2))
    y = rng.randint(0, 2, size=10)
    tree = grow_tree(X, y, "gini", n_classes=2, max_depth=0)
    assert tree.n_nodes == 1
    assert tree.feature[0] == LEAF


def test_pure_node_stops_splitting():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([1, 1, 1])
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    assert tree.n_nodes == 1


def test_deep_chain_does_not_hit_recursion_limit():
    # worst case: every split peels off one sample
    n = 2500
    X = np.arange(n, dtype=np.float64).reshape(-1, 1)
    y = (np.arange(n) % 2).astype(np.int64)
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    preds = np.argmax(tree_values(tree, X), axis=1)
    assert np.array_equal(preds, y)


def test_preorder_layout():
    X = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]])
    y = np.array([0, 1, 0, 1, 0, 1])
    tree = grow_tree(X, y, "gini", n_classes=2, min_samples_leaf=1)
    assert tree.feature[0] != LEAF or tree.n_nodes == 1
    for node in range(tree.n_nodes):
        if tree.feature[node] != LEAF:
            assert tree.left[node] > node
            assert tree.right[node] > node
            assert tree.left[node] != tree.right[node]


def test_feature_subsampling_needs_rng(rng):
    X = rng.standard_normal((20, 5))
    y = rng.randint(0, 2, size=20)
    with pytest.raises(ConfigError):
        grow_tree(X, y, "gini", n_classes=2, max_features=2)
    a = grow_tree(X, y, "gini", n_classes=2, max_features=2,
                  rng=np.random.RandomState(3))
    b = grow_tree(X, y, "gini", n_classes=2, max_features=2,
                  rng=np.random.RandomState(3))
    assert a.to_payload() == b.to_payload()


def test_unknown_criterion_rejected(rng):
    X = rng.standard_normal((4, 2))
    with pytest.raises(ConfigError):
        grow_tree(X, np.zeros(4, dtype=np.int64), "entropy")


def test_payload_round_trip(rng):
    X = rng.standard_normal((30, 3))
    y = rng.randint(0, 3, size=30)
    tree = grow_tree(X, y, "gini", n_classes=3, min_samples_leaf=2)
    back = Tree.from_payload(tree.to_payload())
    assert np.array_equal(tree_values(back, X), tree_values(tree, X))
