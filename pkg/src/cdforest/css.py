"""Class separability score (CSS) and top-m feature selection."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

DEFAULT_EPSILON = 1e-7


@dataclass(frozen=True, eq=False)
class ClassStats:
    """Per-class, per-feature means and population standard deviations.

    Rows of ``means``/``stds`` for classes with ``counts[c] == 0`` are NaN and
    ``present[c]`` is False; they never enter a score.
    """

    means: np.ndarray
    stds: np.ndarray
    counts: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return self.counts > 0


@dataclass(frozen=True, eq=False)
class CssScore:
    scores: np.ndarray
    epsilon: float


def class_stats(features, labels, n_classes: int | None = None) -> ClassStats:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(labels, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("class_stats needs at least one row")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must align with feature rows")
    K = int(y.max()) + 1 if n_classes is None else n_classes
    counts = np.bincount(y, minlength=K)
    means = np.full((K, X.shape[1]), np.nan)
    stds = np.full((K, X.shape[1]), np.nan)
    for c in np.flatnonzero(counts):
        rows = X[y == c]
        mu = rows.mean(axis=0)
        means[c] = mu
        stds[c] = np.sqrt(np.mean((rows - mu) ** 2, axis=0))
    return ClassStats(means, stds, counts)


def css_scores(stats: ClassStats, epsilon: float = DEFAULT_EPSILON) -> CssScore:
    """Mean over present class pairs of ``|mu_a - mu_b| / (sd_a + sd_b + eps)``."""
    present = np.flatnonzero(stats.present)
    if present.size < 2:
        raise ValueError("CSS undefined for single class")
    pairs = list(combinations(present, 2))
    total = np.zeros(stats.means.shape[1])
    for a, b in pairs:
        gap = np.abs(stats.means[a] - stats.means[b])
        spread = stats.stds[a] + stats.stds[b] + epsilon
        with np.errstate(divide="ignore", invalid="ignore"):
            term = gap / spread
        # eps == 0 with zero spread: equal means contribute nothing
        term[gap == 0] = 0.0
        total += term
    return CssScore(total / len(pairs), float(epsilon))


def score_features(features, labels, n_classes: int | None = None,
                   epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    return css_scores(class_stats(features, labels, n_classes), epsilon).scores


def select_top_m(scores, candidate_indices, m: int) -> list[int]:
    """The ``m`` best candidates by descending score, ties to the lower index.

    ``scores`` is aligned with ``candidate_indices`` (a CssScore or array).
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    values = np.asarray(getattr(scores, "scores", scores), dtype=np.float64)
    cand = np.asarray(candidate_indices, dtype=np.int64)
    if cand.size == 0:
        raise ValueError("no candidate features")
    if values.shape != cand.shape:
        raise ValueError("scores and candidate_indices differ in length")
    order = np.lexsort((cand, -values))
    return [int(j) for j in cand[order[:m]]]
