from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdforest.cdt import LeafNode, TreeConfig, predict_tree
from cdforest.dataset import Dataset, DataError, stratified_split
from cdforest.forest import (Forest, ForestConfig, derive_seed, predict, predict_batch,
                             predict_votes, splitmix64, train_forest, vote_counts)
from cdforest.harness import make_blobs
from cdforest.model_io import dumps


def _stub_forest(votes, K=2):
    trees = tuple(LeafNode(v, {v: 1}) for v in votes)
    return Forest(trees, ForestConfig(n_trees=len(votes)), tuple("abc"[:K]), 3)


def test_splitmix_reference_value():
    # first output of the reference splitmix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(7, 1) != derive_seed(7, 2) != derive_seed(8, 1)


def test_vote_rules():
    x = np.zeros(3)
    assert predict(_stub_forest([1, 1, 0]), x) == 1
    assert predict(_stub_forest([0, 1]), x) == 0
    assert predict_votes(_stub_forest([0, 0, 1, 1]), x) == {0: 0.5, 1: 0.5}
    assert predict_votes(_stub_forest([1]), x) == {0: 0.0, 1: 1.0}


def test_length_mismatch():
    f = _stub_forest([0])
    with pytest.raises(ValueError, match="mismatch"):
        predict(f, np.zeros(4))
    with pytest.raises(ValueError, match="mismatch"):
        predict_votes(f, np.zeros(2))


def test_single_tree_forest_equals_tree():
    d = make_blobs(20, 2, 30, 3, 1.5, seed=4)
    f = train_forest(d, ForestConfig(n_trees=1, seed=9))
    probe = np.random.default_rng(0).normal(size=(50, 30))
    assert predict_batch(f, probe).tolist() == [predict_tree(f.trees[0], x) for x in probe]


def test_separable_blobs_held_out_accuracy():
    d = make_blobs(30, 2, 10, 10, 10.0, 1.0, seed=2)
    s = stratified_split(d, 0.7, 1)
    f = train_forest(s.train, ForestConfig(n_trees=25, seed=3))
    assert (predict_batch(f, s.test) == s.test.labels).all()


def test_same_seed_byte_identical_and_parallel():
    d = make_blobs(15, 3, 40, 4, 2.0, seed=5)
    cfg = ForestConfig(n_trees=12, tree=TreeConfig(m_try_fraction=0.3), seed=11)
    serial = dumps(train_forest(d, cfg))
    assert dumps(train_forest(d, cfg)) == serial
    assert dumps(train_forest(d, cfg, n_jobs=3)) == serial
    assert dumps(train_forest(d, replace(cfg, seed=12))) != serial


def test_single_class_rejected():
    d = Dataset(np.ones((5, 2)), [1] * 5, ("a", "b"))
    with pytest.raises(DataError, match="2 classes"):
        train_forest(d, ForestConfig(n_trees=2))


def test_predict_batch_edge_cases():
    d = make_blobs(10, 2, 8, 2, 3.0, seed=1)
    f = train_forest(d, ForestConfig(n_trees=5))
    assert predict_batch(f, np.empty((0, 8))).tolist() == []
    assert predict_batch(f, d.features[:1]).tolist() == [predict(f, d.features[0])]


def test_standardized_forest_applies_training_stats():
    d = make_blobs(20, 2, 6, 2, 4.0, seed=3)
    shifted = d.with_features(d.features * 100 + 1e4)
    f = train_forest(shifted, ForestConfig(n_trees=9), standardize=True)
    mean, scale = f.standardizer
    np.testing.assert_allclose(mean, shifted.features.mean(axis=0))
    assert (predict_batch(f, shifted) == d.labels).mean() > 0.9


@settings(max_examples=15)
@given(st.integers(0, 2**32))
def test_vote_properties(seed):
    r = np.random.default_rng(seed)
    d = make_blobs(12, 3, 15, 3, float(r.uniform(0, 3)), seed=seed)
    f = train_forest(d, ForestConfig(n_trees=7, seed=seed))
    probe = r.normal(size=(20, 15)) * 2
    counts = vote_counts(f, probe)
    assert (counts.sum(axis=1) == 7).all()
    pred = predict_batch(f, probe)
    for i, x in enumerate(probe):
        v = predict_votes(f, x)
        assert sum(v.values()) == pytest.approx(1.0)
        assert pred[i] == max(sorted(v), key=lambda c: v[c]) == predict(f, x)
    reordered = replace(f, trees=f.trees[::-1])
    doubled = replace(f, trees=f.trees + f.trees, config=replace(f.config, n_trees=14))
    assert predict_batch(reordered, probe).tolist() == pred.tolist()
    assert predict_batch(doubled, probe).tolist() == pred.tolist()
