"""Accuracy, Cohen's kappa and confusion matrices over integer class labels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray  # counts[actual, predicted]

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def _pair(actual, predicted, allow_empty=False):
    a = np.asarray(actual, dtype=np.int64).ravel()
    p = np.asarray(predicted, dtype=np.int64).ravel()
    if a.shape != p.shape:
        raise ValueError(f"length mismatch: {a.size} actual vs {p.size} predicted")
    if a.size == 0 and not allow_empty:
        raise ValueError("metrics need at least one observation")
    return a, p


def confusion(actual, predicted, n_classes: int) -> ConfusionMatrix:
    a, p = _pair(actual, predicted, allow_empty=True)
    if a.size and (min(a.min(), p.min()) < 0 or max(a.max(), p.max()) >= n_classes):
        raise ValueError(f"class index outside 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (a, p), 1)
    return ConfusionMatrix(counts)


def accuracy(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.count_nonzero(a == p) / a.size)


def cohens_kappa(actual, predicted) -> float:
    """(p_o - p_e) / (1 - p_e), with p_e from the product of the marginals.

    When p_e == 1 (both vectors constant on the same class) the ratio is 0/0;
    we return 1.0 for perfect agreement and 0.0 otherwise.
    """
    a, p = _pair(actual, predicted)
    K = int(max(a.max(), p.max())) + 1
    cm = confusion(a, p, K).counts
    n = a.size
    p_o = np.trace(cm) / n
    p_e = float(np.dot(cm.sum(axis=1), cm.sum(axis=0))) / (n * n)
    if p_e >= 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return float((p_o - p_e) / (1.0 - p_e))
