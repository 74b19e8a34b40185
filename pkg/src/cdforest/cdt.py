"""Centroid decision trees: CSS-guided nearest-centroid splits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .css import DEFAULT_EPSILON, score_features, select_top_m
from .dataset import Dataset


def resolve_m(rule: str | int, p: int) -> int:
    """Number of CSS-selected features for ``p`` total features.

    ``"2ln"`` gives ceil(2 ln p), ``"2log2"`` ceil(2 log2 p), ``"int:k"`` or a
    bare int gives k. Never below 1.
    """
    if isinstance(rule, (int, np.integer)):
        m = int(rule)
    elif rule == "2ln":
        m = math.ceil(2.0 * math.log(p)) if p > 1 else 1
    elif rule == "2log2":
        m = math.ceil(2.0 * math.log2(p)) if p > 1 else 1
    elif isinstance(rule, str) and rule.startswith("int:"):
        try:
            m = int(rule[4:])
        except ValueError:
            raise ValueError(f"bad m rule {rule!r}") from None
    else:
        raise ValueError(f"unknown m rule {rule!r} (expected 2ln, 2log2 or int:<k>)")
    if m < 1:
        raise ValueError(f"m rule {rule!r} yields m={m}; must be >= 1")
    return m


def resolve_mtry(fraction: float, p: int) -> int:
    # guard against 0.2 * 1000 = 200.00000000000003 style rounding
    return min(p, max(1, math.ceil(fraction * p - 1e-9)))


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 3
    min_samples: int = 3
    m_try_fraction: float = 0.2
    m_rule: str = "2ln"
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        if not 0.0 < self.m_try_fraction <= 1.0:
            raise ValueError("m_try_fraction must lie in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        resolve_m(self.m_rule, 2)


@dataclass(frozen=True, eq=False)
class LeafNode:
    label: int
    class_counts: Mapping[int, int]

    @property
    def n(self) -> int:
        return sum(self.class_counts.values())


@dataclass(frozen=True, eq=False)
class SplitNode:
    """Internal node routing a sample to the child of its nearest centroid.

    ``centroids[k]`` is the centroid of class ``classes[k]`` over
    ``selected_features``; ``children[k]`` is the subtree it leads to.
    """

    selected_features: tuple[int, ...]
    classes: tuple[int, ...]
    centroids: np.ndarray
    children: tuple["TreeNode", ...]

    @property
    def centroid_map(self) -> dict[int, np.ndarray]:
        return dict(zip(self.classes, self.centroids))

    @property
    def child_map(self) -> dict[int, "TreeNode"]:
        return dict(zip(self.classes, self.children))


TreeNode = Union[LeafNode, SplitNode]


def compute_centroids(features, labels) -> dict[int, np.ndarray]:
    """Per-class mean row, for each class present in ``labels``."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("compute_centroids needs at least one row")
    return {int(c): X[y == c].mean(axis=0) for c in np.unique(y)}


def euclidean_distance(x, c) -> float:
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if x.shape != c.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {c.shape}")
    return float(np.sqrt(np.sum((x - c) ** 2)))


def nearest_centroid(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Row-wise position of the nearest centroid; first (lowest) wins ties.

    Squared distances give the same arg-min as Euclidean ones.
    """
    diff = features[:, None, :] - centroids[None, :, :]
    return np.argmin(np.einsum("ikj,ikj->ik", diff, diff), axis=1)


def partition(features, centroids: Mapping[int, np.ndarray]) -> np.ndarray:
    """Class key of the nearest centroid for every row."""
    if not centroids:
        raise ValueError("no centroids")
    keys = sorted(centroids)
    C = np.vstack([np.asarray(centroids[k], dtype=np.float64) for k in keys])
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != C.shape[1]:
        raise ValueError(f"dimension mismatch: rows have {X.shape[1]}, centroids {C.shape[1]}")
    return np.asarray(keys, dtype=np.int64)[nearest_centroid(X, C)]


def majority_class(labels) -> int:
    y = np.asarray(labels, dtype=np.int64)
    if y.size == 0:
        raise ValueError("majority_class of empty labels")
    return int(np.argmax(np.bincount(y)))


def _leaf(y: np.ndarray) -> LeafNode:
    counts = np.bincount(y)
    return LeafNode(int(np.argmax(counts)),
                    {int(c): int(counts[c]) for c in np.flatnonzero(counts)})


def build_tree(data: Dataset, config: TreeConfig = TreeConfig(),
               rng: np.random.Generator | None = None) -> TreeNode:
    """Grow one tree on ``data``.

    A node becomes a leaf at ``depth >= max_depth`` (root is depth 0), when it
    holds ``<= min_samples`` rows, when it is pure, or when every row lands on
    the same centroid. Otherwise ``ceil(m_try_fraction * p)`` features are
    drawn from ``rng``, the best ``m`` by CSS on the node's rows are kept, and
    rows are routed to the nearest class centroid.
    """
    if data.n == 0:
        raise ValueError("cannot build a tree on empty data")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    X, y, K, p = data.features, data.labels, data.n_classes, data.p
    m_try = resolve_mtry(config.m_try_fraction, p)
    m = resolve_m(config.m_rule, p)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        y_node = y[rows]
        if (depth >= config.max_depth or rows.size <= config.min_samples
                or np.all(y_node == y_node[0])):
            return _leaf(y_node)
        candidates = rng.choice(p, size=m_try, replace=False)
        scores = score_features(X[np.ix_(rows, candidates)], y_node, K, config.epsilon)
        selected = select_top_m(scores, candidates, m)
        Xs = X[np.ix_(rows, selected)]
        cents = compute_centroids(Xs, y_node)
        classes = tuple(sorted(cents))
        C = np.vstack([cents[c] for c in classes])
        assign = nearest_centroid(Xs, C)
        if np.all(assign == assign[0]):
            return _leaf(y_node)
        children = []
        for k, c in enumerate(classes):
            part = rows[assign == k]
            # an unreached centroid region still predicts its own class
            children.append(grow(part, depth + 1) if part.size else LeafNode(c, {}))
        C.setflags(write=False)
        return SplitNode(tuple(selected), classes, C, tuple(children))

    return grow(np.arange(data.n), 0)


def predict_tree_batch(tree: TreeNode, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be 2-D")
    out = np.empty(X.shape[0], dtype=np.int64)

    def route(node: TreeNode, rows: np.ndarray):
        if isinstance(node, LeafNode):
            out[rows] = node.label
            return
        assign = nearest_centroid(X[np.ix_(rows, node.selected_features)], node.centroids)
        for k, child in enumerate(node.children):
            sub = rows[assign == k]
            if sub.size:
                route(child, sub)

    if X.shape[0]:
        route(tree, np.arange(X.shape[0]))
    return out


def predict_tree(tree: TreeNode, x) -> int:
    return int(predict_tree_batch(tree, np.asarray(x, dtype=np.float64)[None, :])[0])


def iter_nodes(tree: TreeNode, depth: int = 0):
    """Yield ``(node, depth)`` pairs, pre-order."""
    yield tree, depth
    if isinstance(tree, SplitNode):
        for child in tree.children:
            yield from iter_nodes(child, depth + 1)


def tree_depth(tree: TreeNode) -> int:
    return max(d for _, d in iter_nodes(tree))
