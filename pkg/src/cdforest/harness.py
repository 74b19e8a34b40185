"""Repeated-holdout evaluation, hyper-parameter sweeps and synthetic data."""
from __future__ import annotations

import csv
import json
import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .dataset import Dataset, DataError, stratified_split
from .forest import ForestConfig, _resolve_jobs, derive_seed, predict_batch, train_forest
from .metrics import accuracy, cohens_kappa

log = logging.getLogger(__name__)

SWEEP_PARAMETERS = ("n_trees", "m_try_fraction", "m")


@dataclass(frozen=True)
class EvalProtocol:
    repetitions: int = 500
    train_fraction: float = 0.7
    master_seed: int = 0
    forest_config: ForestConfig = field(default_factory=ForestConfig)
    standardize: bool = False
    stratify: bool = True

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


@dataclass
class EvalReport:
    per_rep: list[tuple[float, float]]
    mean_accuracy: float
    sd_accuracy: float
    mean_kappa: float
    sd_kappa: float
    protocol: EvalProtocol
    skipped: list[int] = field(default_factory=list)
    wall_time_seconds: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "protocol": asdict(self.protocol),
            "repetitions_run": len(self.per_rep),
            "skipped": list(self.skipped),
            "mean_accuracy": self.mean_accuracy,
            "sd_accuracy": self.sd_accuracy,
            "mean_kappa": self.mean_kappa,
            "sd_kappa": self.sd_kappa,
            "per_rep": [{"accuracy": a, "kappa": k} for a, k in self.per_rep],
        }
        if include_timing:
            out["wall_time_seconds"] = self.wall_time_seconds
        return out


def _mean_sd(values) -> tuple[float, float]:
    if not values:
        return float("nan"), float("nan")
    v = np.asarray(values, dtype=np.float64)
    return float(v.mean()), float(v.std(ddof=1)) if v.size > 1 else 0.0


def _run_rep(args):
    data, protocol, rep = args
    rep_seed = derive_seed(protocol.master_seed, rep)
    try:
        split = stratified_split(data, protocol.train_fraction, derive_seed(rep_seed, 0),
                                 stratify=protocol.stratify)
        config = replace(protocol.forest_config, seed=derive_seed(rep_seed, 1))
        forest = train_forest(split.train, config, standardize=protocol.standardize)
    except DataError as exc:
        return rep, None, str(exc)
    pred = predict_batch(forest, split.test)
    return rep, (accuracy(split.test.labels, pred), cohens_kappa(split.test.labels, pred)), None


def repeated_holdout(data: Dataset, protocol: EvalProtocol = EvalProtocol(),
                     n_jobs: int | None = 1) -> EvalReport:
    """Train/test a fresh forest on ``protocol.repetitions`` random holdout splits.

    Repetition ``r`` draws its split and forest seeds from
    ``(master_seed, r)``, so results do not depend on ``n_jobs``. The forest
    config's own ``seed`` is overridden per repetition. Repetitions whose
    split or training data is degenerate are skipped with a warning.
    """
    if np.count_nonzero(data.class_counts()) < 2:
        raise DataError("need >= 2 classes to evaluate")
    start = time.perf_counter()
    tasks = [(data, protocol, r) for r in range(protocol.repetitions)]
    jobs = min(_resolve_jobs(n_jobs), len(tasks))
    if jobs == 1:
        results = [_run_rep(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_rep, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    per_rep, skipped = [], []
    for rep, metrics, err in results:
        if metrics is None:
            warnings.warn(f"repetition {rep} skipped: {err}", RuntimeWarning, stacklevel=2)
            skipped.append(rep)
        else:
            per_rep.append(metrics)
    mean_acc, sd_acc = _mean_sd([a for a, _ in per_rep])
    mean_kap, sd_kap = _mean_sd([k for _, k in per_rep])
    return EvalReport(per_rep, mean_acc, sd_acc, mean_kap, sd_kap, protocol, skipped,
                      time.perf_counter() - start)


def _with_parameter(protocol: EvalProtocol, parameter: str, value) -> EvalProtocol:
    fc = protocol.forest_config
    if parameter == "n_trees":
        if int(value) != value or value < 1:
            raise ValueError(f"n_trees must be a positive integer, got {value!r}")
        fc = replace(fc, n_trees=int(value))
    elif parameter == "m_try_fraction":
        if not 0.0 < value <= 1.0:
            raise ValueError(f"m_try_fraction must lie in (0, 1], got {value!r}")
        fc = replace(fc, tree=replace(fc.tree, m_try_fraction=float(value)))
    elif parameter == "m":
        if int(value) != value or value < 1:
            raise ValueError(f"m must be a positive integer, got {value!r}")
        fc = replace(fc, tree=replace(fc.tree, m_rule=f"int:{int(value)}"))
    else:
        raise ValueError(f"unknown sweep parameter {parameter!r}; choose from {SWEEP_PARAMETERS}")
    return replace(protocol, forest_config=fc)


def sweep(data: Dataset, protocol: EvalProtocol, parameter: str, grid,
          n_jobs: int | None = 1) -> list[tuple[float, EvalReport]]:
    """One repeated-holdout report per grid value, everything else fixed."""
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    protocols = [_with_parameter(protocol, parameter, v) for v in grid]
    out = []
    for value, proto in zip(grid, protocols):
        report = repeated_holdout(data, proto, n_jobs=n_jobs)
        log.info("%s=%s mean_acc=%.4f", parameter, value, report.mean_accuracy)
        out.append((value, report))
    return out


def write_report_json(report: EvalReport, path, dataset: str = "") -> None:
    body = {"dataset": dataset, "method": "CDF", **report.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2)
        fh.write("\n")


def write_summary_csv(rows, path) -> None:
    """``rows`` is an iterable of ``(dataset_name, EvalReport)``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "mean_acc", "sd_acc", "mean_kappa", "sd_kappa", "reps"])
        for name, r in rows:
            w.writerow([name, "CDF", repr(r.mean_accuracy), repr(r.sd_accuracy),
                        repr(r.mean_kappa), repr(r.sd_kappa), len(r.per_rep)])


def write_sweep_csv(parameter: str, results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "mean_acc", "sd_acc"])
        for value, r in results:
            w.writerow([parameter, value, repr(r.mean_accuracy), repr(r.sd_accuracy)])


def make_blobs(n_per_class: int, n_classes: int, p: int, informative: int,
               gap: float, noise_sd: float = 1.0, seed: int = 0) -> Dataset:
    """Gaussian classes whose first ``informative`` columns sit at ``c * gap``.

    All other columns are N(0, noise_sd) noise. Rows are grouped by class.
    """
    if n_classes < 2:
        raise ValueError("make_blobs needs at least 2 classes")
    if n_per_class < 1 or p < 1:
        raise ValueError("n_per_class and p must be positive")
    if not 0 <= informative <= p:
        raise ValueError("informative must lie in [0, p]")
    if noise_sd < 0:
        raise ValueError("noise_sd must be non-negative")
    rng = np.random.default_rng(seed)
    n = n_per_class * n_classes
    labels = np.repeat(np.arange(n_classes), n_per_class)
    X = rng.normal(0.0, noise_sd, size=(n, p))
    X[:, :informative] += (labels * gap)[:, None]
    return Dataset(X, labels, tuple(f"c{c}" for c in range(n_classes)))

