"""Bagged ensembles of centroid decision trees with majority voting."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cdt import TreeConfig, TreeNode, build_tree, predict_tree_batch, resolve_m
from .dataset import Dataset, DataError, apply_standardizer, bootstrap_indices, fit_standardizer

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    """Child seed ``index`` of ``master``; independent of execution order."""
    return splitmix64(splitmix64(master & _MASK64) ^ (index & _MASK64))


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 500
    tree: TreeConfig = field(default_factory=TreeConfig)
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")


@dataclass(frozen=True, eq=False)
class Forest:
    trees: tuple[TreeNode, ...]
    config: ForestConfig
    label_names: tuple[str, ...]
    p: int
    # (mean, scale) fitted on the training rows, applied before every query
    standardizer: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    @property
    def m(self) -> int:
        return resolve_m(self.config.tree.m_rule, self.p)


def _build_one(X: np.ndarray, y: np.ndarray, label_names, tree_config: TreeConfig,
               master: int, index: int) -> TreeNode:
    rng = np.random.default_rng(derive_seed(master, index))
    rows = bootstrap_indices(X.shape[0], rng)
    sample = Dataset(X[rows], y[rows], label_names)
    return build_tree(sample, tree_config, rng)


def _build_chunk(args):
    X, y, label_names, tree_config, master, indices = args
    return [_build_one(X, y, label_names, tree_config, master, b) for b in indices]


def _resolve_jobs(n_jobs: int | None) -> int:
    if n_jobs is None or n_jobs == 0:
        return 1
    if n_jobs < 0:
        return max(1, (os.cpu_count() or 1) + 1 + n_jobs)
    return n_jobs


def train_forest(data: Dataset, config: ForestConfig = ForestConfig(),
                 standardize: bool = False, n_jobs: int | None = 1) -> Forest:
    """Fit ``config.n_trees`` trees, tree ``b`` on a bootstrap drawn from seed ``(seed, b)``.

    The result depends only on ``data`` and ``config``; ``n_jobs`` (``-1``
    for all cores) changes wall time, never the model.
    """
    if data.n == 0:
        raise DataError("cannot train on empty data")
    if np.count_nonzero(data.class_counts()) < 2:
        raise DataError("need >= 2 classes in training data")
    standardizer = None
    X = data.features
    if standardize:
        standardizer = fit_standardizer(X)
        X = apply_standardizer(X, *standardizer)
    tc, master, B = config.tree, config.seed, config.n_trees
    jobs = min(_resolve_jobs(n_jobs), B)
    if jobs == 1:
        trees = [_build_one(X, data.labels, data.label_names, tc, master, b) for b in range(B)]
    else:
        chunks = [list(range(B))[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_build_chunk, [(X, data.labels, data.label_names, tc, master, c)
                                                   for c in chunks]))
        trees = [None] * B
        for chunk, built in zip(chunks, results):
            for b, t in zip(chunk, built):
                trees[b] = t
    return Forest(tuple(trees), config, data.label_names, data.p, standardizer)


def _as_matrix(forest: Forest, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != forest.p:
        raise ValueError(f"feature count mismatch: expected {forest.p}, got {X.shape[-1]}")
    if forest.standardizer is not None:
        X = apply_standardizer(X, *forest.standardizer)
    return X


def vote_counts(forest: Forest, features) -> np.ndarray:
    """``(rows, K)`` matrix of how many trees voted for each class."""
    X = _as_matrix(forest, features)
    counts = np.zeros((X.shape[0], forest.n_classes), dtype=np.int64)
    rows = np.arange(X.shape[0])
    for tree in forest.trees:
        np.add.at(counts, (rows, predict_tree_batch(tree, X)), 1)
    return counts


def predict_votes(forest: Forest, x) -> dict[int, float]:
    counts = vote_counts(forest, np.asarray(x, dtype=np.float64)[None, :])[0]
    return {c: counts[c] / len(forest.trees) for c in range(forest.n_classes)}


def predict(forest: Forest, x) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("predict takes a single feature vector")
    return int(np.argmax(vote_counts(forest, x[None, :])[0]))


def predict_batch(forest: Forest, data) -> np.ndarray:
    """Majority-vote labels for every row of ``data`` (a Dataset or matrix)."""
    features = data.features if isinstance(data, Dataset) else data
    features = np.asarray(features, dtype=np.float64)
    if features.size == 0 and features.ndim < 2:
        return np.empty(0, dtype=np.int64)
    # argmax takes the first maximum: vote ties go to the lower class index
    return np.argmax(vote_counts(forest, features), axis=1).astype(np.int64)
