"""Tabular classification data: loading, label encoding, splitting, resampling."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan"})


class DataError(ValueError):
    """Raised when input data cannot be turned into a valid Dataset."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense feature matrix with integer-encoded labels.

    ``labels[i]`` indexes into ``label_names``; classes missing from a
    resample keep their index so models trained on subsets stay aligned.
    """

    features: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    feature_names: tuple[str, ...] = field(default=())
    label_column: str = "class"

    def __post_init__(self):
        X = np.ascontiguousarray(self.features, dtype=np.float64)
        y = np.ascontiguousarray(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"labels length {y.shape} does not match {X.shape[0]} rows")
        if X.shape[1] < 1:
            raise DataError("dataset needs at least one feature column")
        if not self.label_names:
            raise DataError("dataset needs at least one class")
        if y.size and (y.min() < 0 or y.max() >= len(self.label_names)):
            raise DataError("label index out of range of label_names")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or infinite values")
        names = tuple(self.feature_names) or tuple(f"f{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError("feature_names length does not match column count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "label_names", tuple(str(s) for s in self.label_names))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def decoded_labels(self) -> list[str]:
        return [self.label_names[i] for i in self.labels]

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=np.int64)
        return Dataset(self.features[index], self.labels[index],
                       self.label_names, self.feature_names, self.label_column)

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(features, self.labels, self.label_names, self.feature_names,
                       self.label_column)


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    train_fraction: float
    train_index: np.ndarray
    test_index: np.ndarray


def encode_labels(raw: Sequence[str], declared: Sequence[str] | None = None):
    """Map label strings to indices, in first-appearance order unless ``declared`` is given."""
    names = list(declared) if declared is not None else []
    lookup = {name: i for i, name in enumerate(names)}
    codes = []
    for value in raw:
        if value not in lookup:
            if declared is not None:
                raise DataError(f"label {value!r} not among declared classes")
            lookup[value] = len(names)
            names.append(value)
        codes.append(lookup[value])
    return np.asarray(codes, dtype=np.int64), tuple(names)


def _parse_cell(text: str, row: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}: column {col!r} has non-numeric value {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}: column {col!r} has non-finite value {text!r}")
    return value


def _resolve_column(header: list[str], column: str | int) -> int:
    if isinstance(column, str) and column in header:
        return header.index(column)
    try:
        li = int(column)
    except ValueError:
        raise DataError(f"label column {column!r} not found in header") from None
    if not -len(header) <= li < len(header):
        raise DataError(f"label column index {li} out of range for {len(header)} columns")
    return li % len(header)


def load_csv(path, label_column: str | int = -1, missing_policy: str = "reject") -> Dataset:
    """Read a headered CSV; every column except the label must be numeric.

    ``missing_policy`` is ``"reject"`` (raise on a blank/NA cell) or
    ``"drop_rows"`` (skip any row containing one).
    """
    if missing_policy not in ("reject", "drop_rows"):
        raise ValueError(f"unknown missing_policy {missing_policy!r}")
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty (no header row)")
    header = [h.strip() for h in rows[0]]
    li = _resolve_column(header, label_column)
    if len(header) < 2:
        raise DataError("CSV needs a label column and at least one feature column")

    feature_cols = [j for j in range(len(header)) if j != li]
    X, raw_labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        cells = [row[j].strip() for j in feature_cols]
        label = row[li].strip()
        if label in MISSING_TOKENS or any(c in MISSING_TOKENS for c in cells):
            if missing_policy == "reject":
                raise DataError(f"row {lineno}: missing value (policy 'reject')")
            continue
        X.append([_parse_cell(c, lineno, header[j]) for c, j in zip(cells, feature_cols)])
        raw_labels.append(label)
    if not X:
        raise DataError(f"{path} has no usable rows")
    y, names = encode_labels(raw_labels)
    return Dataset(np.array(X, dtype=np.float64), y, names,
                   tuple(header[j] for j in feature_cols), header[li])


def _split_arff_line(text: str) -> list[str]:
    return next(csv.reader([text], quotechar="'", skipinitialspace=True))


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _parse_attribute(line: str, lineno: int):
    body = line.split(None, 1)
    if len(body) != 2:
        raise DataError(f"line {lineno}: malformed @attribute")
    rest = body[1].strip()
    if rest[0] in "'\"":
        end = rest.find(rest[0], 1)
        if end < 0:
            raise DataError(f"line {lineno}: unterminated attribute name")
        name, kind = rest[1:end], rest[end + 1:].strip()
    else:
        parts = rest.split(None, 1)
        if len(parts) != 2:
            raise DataError(f"line {lineno}: attribute without type")
        name, kind = parts
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise DataError(f"line {lineno}: malformed nominal specification")
        values = [_unquote(v) for v in _split_arff_line(kind[1:-1])]
        return name, "nominal", values
    if kind.lower() in ("numeric", "real", "integer"):
        return name, "numeric", None
    raise DataError(f"line {lineno}: unsupported attribute type {kind.split()[0]!r}")


def load_arff(path, label: str | None = None) -> Dataset:
    """Read a dense ARFF file with numeric features and one nominal class.

    The class is the last nominal attribute unless ``label`` names another.
    Rows containing ``?`` are dropped.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    attrs = []
    data_lines: list[tuple[int, str]] = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            data_lines.append((lineno, line))
            continue
        head = line.split(None, 1)[0].lower()
        if head == "@relation":
            continue
        if head == "@attribute":
            attrs.append(_parse_attribute(line, lineno))
        elif head == "@data":
            in_data = True
        else:
            raise DataError(f"line {lineno}: unexpected header line {line[:40]!r}")
    if not in_data:
        raise DataError("missing @data section")
    if not attrs:
        raise DataError("no @attribute declarations")

    names = [a[0] for a in attrs]
    if label is None:
        nominal = [i for i, a in enumerate(attrs) if a[1] == "nominal"]
        if not nominal:
            raise DataError("no nominal class attribute")
        li = nominal[-1]
    else:
        if label not in names:
            raise DataError(f"class attribute {label!r} not declared")
        li = names.index(label)
        if attrs[li][1] != "nominal":
            raise DataError(f"class attribute {label!r} is not nominal")
    for i, a in enumerate(attrs):
        if i != li and a[1] != "numeric":
            raise DataError(f"unsupported attribute type: {a[0]!r} is {a[1]}, features must be numeric")

    declared = attrs[li][2]
    rows, raw_labels = [], []
    for lineno, line in data_lines:
        if line.startswith("{"):
            raise DataError("sparse ARFF is not supported")
        fields = [_unquote(f) for f in _split_arff_line(line)]
        if len(fields) != len(attrs):
            raise DataError(f"line {lineno}: expected {len(attrs)} values, got {len(fields)}")
        if any(f == "?" for f in fields):
            continue
        rows.append([_parse_cell(f, lineno, names[j]) for j, f in enumerate(fields) if j != li])
        raw_labels.append(fields[li])
    if not rows:
        raise DataError(f"{path} has no usable rows")
    y, label_names = encode_labels(raw_labels, declared)
    return Dataset(np.array(rows, dtype=np.float64), y, label_names,
                   tuple(n for j, n in enumerate(names) if j != li), names[li])


def write_csv(data: Dataset, path, label_column: str | None = None) -> None:
    """Write ``data`` in the form :func:`load_csv` reads back exactly."""
    label_column = label_column or data.label_column
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, label_column])
        for row, lab in zip(data.features, data.decoded_labels()):
            w.writerow([*(repr(float(v)) for v in row), lab])


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_train_counts(class_counts, train_fraction: float) -> np.ndarray:
    """Per-class training counts for a stratified holdout.

    The overall training size is ``round(train_fraction * n)``; it is
    apportioned over classes by largest remainder (ties to the lower class
    index), then every present class is guaranteed at least one training row.
    """
    counts = np.asarray(class_counts, dtype=np.int64)
    exact = train_fraction * counts
    base = np.floor(exact).astype(np.int64)
    target = _round_half_up(train_fraction * counts.sum())
    extra = max(0, min(target - int(base.sum()), int((counts - base).sum())))
    remainder = np.where(base < counts, exact - base, -1.0)
    order = sorted(range(len(counts)), key=lambda c: (-remainder[c], c))
    for c in order[:extra]:
        base[c] += 1
    return np.where(counts > 0, np.maximum(base, 1), 0)


def stratified_split(data: Dataset, train_fraction: float = 0.7, seed: int = 0,
                     stratify: bool = True) -> SplitPair:
    """Random holdout split; per-class proportions preserved when ``stratify``."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    if stratify:
        train_counts = stratified_train_counts(data.class_counts(), train_fraction)
        train_parts, test_parts = [], []
        for c in range(data.n_classes):
            members = rng.permutation(np.flatnonzero(data.labels == c))
            train_parts.append(members[:train_counts[c]])
            test_parts.append(members[train_counts[c]:])
        train_idx = np.sort(np.concatenate(train_parts))
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        order = rng.permutation(data.n)
        k = min(max(_round_half_up(train_fraction * data.n), 1), data.n)
        train_idx, test_idx = np.sort(order[:k]), np.sort(order[k:])
    if test_idx.size == 0:
        raise DataError("split leaves the test set empty")
    return SplitPair(data.subset(train_idx), data.subset(test_idx), seed,
                     train_fraction, train_idx, test_idx)


def bootstrap_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise DataError("cannot bootstrap an empty dataset")
    return rng.integers(0, n, size=n)


def bootstrap_sample(data: Dataset, seed: int) -> Dataset:
    """``n`` rows drawn uniformly with replacement."""
    return data.subset(bootstrap_indices(data.n, np.random.default_rng(seed)))


def fit_standardizer(features: np.ndarray):
    """Column means and scales; zero-variance columns get scale 1."""
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


def apply_standardizer(features: np.ndarray, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return (np.asarray(features, dtype=np.float64) - mean) / scale
