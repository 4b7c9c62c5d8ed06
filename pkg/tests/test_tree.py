import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from damvi.dataset import Dataset, EmptyDatasetError
from damvi.tree import Leaf, Split, Tree, TreeParams, fit_tree, predict_tree


def _gini_split_cost(x, y, t):
    """Weighted Gini of the split x <= t, computed from scratch."""
    cost = 0.0
    for side in (x <= t, x > t):
        if side.sum() == 0:
            return np.inf
        p = np.mean(y[side] == 1)
        cost += side.sum() * (1 - p ** 2 - (1 - p) ** 2)
    return cost / len(y)


ONE_D = Dataset(np.array([[0.0], [1.0], [2.0], [3.0]]), np.array([-1, -1, 1, 1]))
XOR = Dataset(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]), np.array([-1, -1, 1, 1]))


def test_pure_node_is_leaf():
    t = fit_tree(Dataset(np.arange(6.0).reshape(3, 2), [1, 1, 1]))
    assert isinstance(t.root, Leaf) and t.root.label == 1 and t.root.positive_fraction == 1.0


def test_one_d_threshold():
    tree = fit_tree(ONE_D)
    # brute force over a fine grid: zero-cost thresholds form exactly the interval [1, 2)
    grid = np.linspace(-0.5, 3.5, 801)
    costs = np.array([_gini_split_cost(ONE_D.X[:, 0], ONE_D.y, t) for t in grid])
    optimal = grid[costs == costs.min()]
    assert optimal.min() == pytest.approx(1.0) and optimal.max() < 2.0
    assert isinstance(tree.root, Split) and 1.0 < tree.root.threshold < 2.0
    assert tree.depth() == 1
    assert np.all(tree.predict(ONE_D.X) == ONE_D.y)


def test_one_d_predictions():
    tree = fit_tree(ONE_D)
    assert predict_tree(tree, [0.5]) == -1
    assert predict_tree(tree, [2.5]) == 1


def test_threshold_boundary_goes_left():
    tree = Tree(Split(0, 1.5, Leaf(-1, 0.0), Leaf(1, 1.0)), 1)
    assert predict_tree(tree, [1.5]) == -1
    assert predict_tree(tree, [np.nextafter(1.5, 2)]) == 1


def test_xor_depth():
    # every depth-1 split on XOR leaves half the examples misclassified
    for f in range(2):
        for t in (0.5,):
            for left_label, right_label in itertools.product((-1, 1), repeat=2):
                pred = np.where(XOR.X[:, f] <= t, left_label, right_label)
                assert np.mean(pred != XOR.y) == 0.5
    stump = fit_tree(XOR, TreeParams(max_depth=1))
    assert np.mean(stump.predict(XOR.X) != XOR.y) == 0.5
    deep = fit_tree(XOR, TreeParams(max_depth=2))
    assert np.all(deep.predict(XOR.X) == XOR.y)


def test_empty_rejected():
    with pytest.raises(EmptyDatasetError):
        fit_tree(Dataset(np.zeros((0, 2)), np.zeros(0, int)))


def test_dimension_mismatch():
    tree = fit_tree(ONE_D)
    with pytest.raises(ValueError):
        predict_tree(tree, [1.0, 2.0])
    with pytest.raises(ValueError):
        tree.predict(np.zeros((3, 2)))


def test_tie_break_lowest_feature():
    # both features separate the data perfectly: feature 0 must win
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    tree = fit_tree(Dataset(X, [-1, 1]))
    assert tree.root.feature == 0


def test_min_samples_leaf_respected():
    ds = Dataset(np.arange(10.0)[:, None], [1, -1] * 5)
    tree = fit_tree(ds, TreeParams(min_samples_leaf=3))

    def leaf_sizes(node, idx):
        if isinstance(node, Leaf):
            return [idx.size]
        m = ds.X[idx, node.feature] <= node.threshold
        return leaf_sizes(node.left, idx[m]) + leaf_sizes(node.right, idx[~m])
    assert min(leaf_sizes(tree.root, np.arange(10))) >= 3


def test_json_round_trip():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.standard_normal((60, 3)), rng.choice([-1, 1], 60))
    tree = fit_tree(ds)
    back = Tree.from_dict(json.loads(json.dumps(tree.to_dict())))
    assert back.root == tree.root and back.n_features == tree.n_features
    np.testing.assert_array_equal(back.predict(ds.X), tree.predict(ds.X))


@given(arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(1, 4)),
              elements=st.floats(-100, 100, allow_nan=False)),
       st.integers(0, 2**31))
def test_fully_grown_fits_training_data(X, seed):
    rng = np.random.default_rng(seed)
    y = rng.choice([-1, 1], X.shape[0])
    # drop label conflicts on duplicate feature vectors
    _, first = np.unique(X, axis=0, return_index=True)
    X, y = X[first], y[first]
    ds = Dataset(X, y)
    tree = fit_tree(ds)
    assert np.all(tree.predict(X) == y)
    assert all(predict_tree(tree, x) in (-1, 1) for x in X)
    np.testing.assert_array_equal(tree.predict(X), [predict_tree(tree, x) for x in X])


@given(st.integers(0, 2**31), st.integers(1, 6))
def test_max_depth_respected(seed, depth):
    rng = np.random.default_rng(seed)
    ds = Dataset(rng.standard_normal((50, 2)), rng.choice([-1, 1], 50))
    assert fit_tree(ds, TreeParams(max_depth=depth)).depth() <= depth


@given(st.integers(0, 2**31))
def test_order_invariance(seed):
    rng = np.random.default_rng(seed)
    # continuous random data: impurity ties have probability zero
    X = rng.standard_normal((30, 3))
    y = np.where(X[:, 0] + 0.5 * rng.standard_normal(30) > 0, 1, -1)
    perm = rng.permutation(30)
    a = fit_tree(Dataset(X, y))
    b = fit_tree(Dataset(X[perm], y[perm]))
    assert a.root == b.root


def test_seed_does_not_change_fit():
    rng = np.random.default_rng(1)
    ds = Dataset(rng.integers(0, 3, (40, 2)).astype(float), rng.choice([-1, 1], 40))
    assert fit_tree(ds, seed=1).root == fit_tree(ds, seed=2).root
