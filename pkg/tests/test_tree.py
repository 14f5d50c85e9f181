import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from budgetqa.errors import MissingFeature, NoTrainingData, SchemaMismatch
from budgetqa.tree import (
    DecisionTree,
    Leaf,
    TrainingCase,
    TreeConfig,
    load_tree,
    predict,
    save_tree,
    train_tree,
    tree_to_dict,
)

from oracles import route_cases


def _case(label, **features):
    return TrainingCase(features, label)


def test_uninformative_data_gives_single_laplace_leaf():
    cases = [_case(True, x=1.0)] * 3 + [_case(False, x=1.0)]
    tree = train_tree(cases)
    assert isinstance(tree.root, Leaf)
    assert tree.root.probability == pytest.approx(4 / 6)


def test_perfectly_separable_binary_feature():
    cases = [_case(True, flag=1.0) for _ in range(6)] + [_case(False, flag=0.0) for _ in range(4)]
    tree = train_tree(cases, TreeConfig(min_leaf=2))
    assert tree.depth() == 1
    pos_leaf = tree.predict({"flag": 1.0})
    neg_leaf = tree.predict({"flag": 0.0})
    assert pos_leaf == pytest.approx(7 / 8)  # (6+1)/(6+2)
    assert neg_leaf == pytest.approx(1 / 6)  # (0+1)/(4+2)


def test_categorical_one_vs_rest_split():
    cases = [_case(True, color="red") for _ in range(5)] + [
        _case(False, color=c) for c in ["blue"] * 3 + ["green"] * 2
    ]
    tree = train_tree(cases, TreeConfig(min_leaf=2))
    assert tree.predict({"color": "red"}) > 0.5
    assert tree.predict({"color": "blue"}) < 0.5


def test_empty_cases_raise():
    with pytest.raises(NoTrainingData):
        train_tree([])


def test_schema_mismatch_on_differing_names():
    with pytest.raises(SchemaMismatch):
        train_tree([_case(True, a=1.0), _case(False, b=1.0)])


def test_schema_mismatch_on_mixed_kinds():
    with pytest.raises(SchemaMismatch):
        train_tree([_case(True, a=1.0), _case(False, a="one")])


def test_missing_feature_on_predict():
    cases = [_case(True, x=1.0) for _ in range(5)] + [_case(False, x=0.0) for _ in range(5)]
    tree = train_tree(cases, TreeConfig(min_leaf=2))
    with pytest.raises(MissingFeature):
        tree.predict({"y": 1.0})


def _random_cases(rng, n, n_features=3):
    cases = []
    for _ in range(n):
        feats = {f"f{i}": rng.choice([0.0, 1.0, 2.0]) for i in range(n_features)}
        feats["cat"] = rng.choice(["a", "b"])
        # label correlates with f0 so the tree has something to learn
        label = rng.random() < (0.2 + 0.3 * feats["f0"])
        cases.append(TrainingCase(feats, label))
    return cases


@pytest.mark.parametrize("seed", range(5))
def test_leaves_match_laplace_rate_of_routed_cases(seed):
    rng = random.Random(seed)
    cases = _random_cases(rng, 200)
    tree = train_tree(cases)
    buckets = route_cases(tree, cases)
    leaves = {id(l): l for l in _leaf_nodes(tree)}
    assert set(buckets) == set(leaves)
    for leaf_id, routed in buckets.items():
        leaf = leaves[leaf_id]
        pos = sum(1 for c in routed if c.label)
        assert leaf.support == len(routed)
        assert leaf.positives == pos
        assert leaf.probability == pytest.approx((pos + 1) / (len(routed) + 2))


def _leaf_nodes(tree: DecisionTree):
    out, stack = [], [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node)
        else:
            stack.extend([node.left, node.right])
    return out


@pytest.mark.parametrize("seed", range(4))
def test_leaf_probabilities_strictly_inside_unit_interval(seed):
    rng = random.Random(100 + seed)
    cases = _random_cases(rng, 80)
    for leaf in _leaf_nodes(train_tree(cases)):
        assert 0.0 < leaf.probability < 1.0


def test_training_is_deterministic():
    rng = random.Random(7)
    cases = _random_cases(rng, 150)
    assert tree_to_dict(train_tree(cases)) == tree_to_dict(train_tree(cases))


def _empirical_loglik(tree, cases):
    buckets = route_cases(tree, cases)
    leaves = {id(l): l for l in _leaf_nodes(tree)}
    total = 0.0
    for leaf_id, routed in buckets.items():
        leaf = leaves[leaf_id]
        if not routed:
            continue
        rate = leaf.positives / leaf.support
        for case in routed:
            p = rate if case.label else 1 - rate
            total += math.log(p) if p > 0 else float("-inf")
    return total


@pytest.mark.parametrize("seed", range(4))
def test_deeper_config_never_decreases_training_loglik(seed):
    rng = random.Random(200 + seed)
    cases = _random_cases(rng, 120)
    shallow = train_tree(cases, TreeConfig(min_gain=0.05, min_leaf=20))
    deep = train_tree(cases, TreeConfig(min_gain=1e-6, min_leaf=2))
    assert _empirical_loglik(deep, cases) >= _empirical_loglik(shallow, cases) - 1e-9


def test_round_trip_is_bit_exact(tmp_path):
    rng = random.Random(11)
    cases = _random_cases(rng, 90)
    tree = train_tree(cases)
    path = tmp_path / "tree.json"
    save_tree(tree, str(path))
    loaded = load_tree(str(path))
    assert tree_to_dict(loaded) == tree_to_dict(tree)
    for _ in range(20):
        feats = {f"f{i}": rng.choice([0.0, 1.0, 2.0]) for i in range(3)}
        feats["cat"] = rng.choice(["a", "b"])
        assert loaded.predict(feats) == tree.predict(feats)


@given(st.lists(st.booleans(), min_size=1, max_size=30))
def test_single_leaf_probability_formula(labels):
    cases = [TrainingCase({"x": 0.0}, lab) for lab in labels]
    tree = train_tree(cases)
    pos = sum(labels)
    assert isinstance(tree.root, Leaf)
    assert tree.root.probability == (pos + 1) / (len(labels) + 2)
    assert predict(tree, {"x": 0.0}) == tree.root.probability
