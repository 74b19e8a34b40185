"""``cdf`` command line: train, predict, evaluate, sweep, score, fetch."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .cdt import TreeConfig, resolve_m
from .css import DEFAULT_EPSILON, score_features, select_top_m
from .dataset import DataError, load_arff, load_csv, write_csv
from .forest import ForestConfig, predict_batch, train_forest, vote_counts
from .harness import (SWEEP_PARAMETERS, EvalProtocol, repeated_holdout, sweep,
                      write_report_json, write_summary_csv, write_sweep_csv)
from .model_io import ModelFormatError, atomic_write_text, load_model, save_model
from .openml import NetworkError, fetch_dataset

EXIT_USAGE, EXIT_DATA, EXIT_NETWORK = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _m_rule(text: str) -> str:
    try:
        resolve_m(text, 2)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _load(path: str, label, missing: str):
    if Path(path).suffix.lower() == ".arff":
        return load_arff(path, label=None if label in (None, "-1") else label)
    return load_csv(path, -1 if label is None else label, missing)


def _add_data(p, label_required=False):
    p.add_argument("--data", required=True, help="CSV (header row) or ARFF file")
    p.add_argument("--label", required=label_required, default=None,
                   help="label column name or index (default: last column)")
    p.add_argument("--missing", choices=("reject", "drop_rows"), default="reject",
                   help="CSV missing-value policy")


def _add_forest(p):
    p.add_argument("--trees", type=int, default=500)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--mtry-frac", type=float, default=0.2)
    p.add_argument("--m-rule", type=_m_rule, default="2ln", help="2ln | 2log2 | int:<k>")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action="store_true",
                   help="z-score features with training statistics")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (-1 = all cores)")


def _forest_config(args) -> ForestConfig:
    try:
        tree = TreeConfig(max_depth=args.max_depth, min_samples=args.n_min,
                          m_try_fraction=args.mtry_frac, m_rule=args.m_rule,
                          epsilon=args.epsilon, seed=args.seed)
        return ForestConfig(n_trees=args.trees, tree=tree, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _protocol(args) -> EvalProtocol:
    try:
        return EvalProtocol(repetitions=args.reps, train_fraction=args.train_frac,
                            master_seed=args.seed, forest_config=_forest_config(args),
                            standardize=args.standardize, stratify=not args.no_stratify)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args):
    data = _load(args.data, args.label, args.missing)
    config = _forest_config(args)
    start = time.perf_counter()
    forest = train_forest(data, config, standardize=args.standardize, n_jobs=args.jobs)
    elapsed = time.perf_counter() - start
    save_model(forest, args.out)
    print(f"trained n={data.n} p={data.p} K={data.n_classes} B={config.n_trees} "
          f"m={forest.m} in {elapsed:.2f}s -> {args.out}")


def _read_features(path: str, label, p: int) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DataError(f"{path} is empty")
    header = rows[0]
    drop = None
    if label is not None:
        if label in header:
            drop = header.index(label)
        else:
            try:
                drop = int(label) % len(header)
            except ValueError:
                raise DataError(f"label column {label!r} not found in header") from None
    keep = [j for j in range(len(header)) if j != drop]
    if len(keep) != p:
        raise DataError(f"feature count mismatch: model expects p={p}, data has {len(keep)}")
    try:
        X = np.array([[float(r[j]) for j in keep] for r in rows[1:]], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise DataError(f"cannot parse features in {path}: {exc}") from None
    return X.reshape(-1, p)


def cmd_predict(args):
    forest = load_model(args.model)
    X = _read_features(args.data, args.label, forest.p)
    pred = predict_batch(forest, X)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["row", "predicted_label"]
    if args.votes:
        header += [f"vote_{name}" for name in forest.label_names]
        fractions = vote_counts(forest, X) / len(forest.trees)
    w.writerow(header)
    for i, c in enumerate(pred):
        row = [i, forest.label_names[c]]
        if args.votes:
            row += [repr(float(v)) for v in fractions[i]]
        w.writerow(row)
    if args.out:
        atomic_write_text(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_evaluate(args):
    data = _load(args.data, args.label, args.missing)
    report = repeated_holdout(data, _protocol(args), n_jobs=args.jobs)
    name = args.name or Path(args.data).stem
    out = Path(args.out)
    write_report_json(report, out, name)
    summary = Path(args.summary) if args.summary else out.with_suffix(".csv")
    write_summary_csv([(name, report)], summary)
    print(f"{name}: accuracy {report.mean_accuracy:.4f} +/- {report.sd_accuracy:.4f}, "
          f"kappa {report.mean_kappa:.4f} +/- {report.sd_kappa:.4f} "
          f"({len(report.per_rep)} reps, {len(report.skipped)} skipped, "
          f"{report.wall_time_seconds:.1f}s)")


def _grid(parameter: str, text: str):
    cast = float if parameter == "m_try_fraction" else int
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r} for {parameter}") from None


def cmd_sweep(args):
    data = _load(args.data, args.label, args.missing)
    try:
        results = sweep(data, _protocol(args), args.param, _grid(args.param, args.grid),
                        n_jobs=args.jobs)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise UsageError(str(exc)) from None
    write_sweep_csv(args.param, results, args.out)
    for value, r in results:
        print(f"{args.param}={value}: accuracy {r.mean_accuracy:.4f} +/- {r.sd_accuracy:.4f}")


def cmd_score(args):
    data = _load(args.data, args.label, args.missing)
    if np.count_nonzero(data.class_counts()) < 2:
        raise DataError("CSS undefined for single class")
    scores = score_features(data.features, data.labels, data.n_classes, args.epsilon)
    order = select_top_m(scores, np.arange(data.p), data.p)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature", "css"])
    for j in order:
        w.writerow([data.feature_names[j], repr(float(scores[j]))])
    if args.out:
        atomic_write_text(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_fetch(args):
    data = fetch_dataset(args.openml)
    out = Path(args.out)
    tmp = out.with_name(f".{out.name}.part")
    try:
        write_csv(data, tmp)
        tmp.replace(out)
    finally:
        if tmp.exists():
            tmp.unlink()
    print(f"fetched OpenML {args.openml}: n={data.n} p={data.p} K={data.n_classes} -> {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdf", description="Centroid decision forest toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    common = _Parser(add_help=False)
    common.add_argument("--verbose", "-v", action="count", default=0)

    p = sub.add_parser("train", parents=[common], help="fit a forest and write a model file")
    _add_data(p)
    _add_forest(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="predict labels for a CSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", default=None, help="column to ignore (e.g. the true label)")
    p.add_argument("--votes", action="store_true", help="add per-class vote fractions")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    for name, func, help_ in (("evaluate", cmd_evaluate, "repeated holdout evaluation"),
                              ("sweep", cmd_sweep, "repeated holdout over a parameter grid")):
        p = sub.add_parser(name, parents=[common], help=help_)
        _add_data(p)
        _add_forest(p)
        p.add_argument("--reps", type=int, default=500)
        p.add_argument("--train-frac", type=float, default=0.7)
        p.add_argument("--no-stratify", action="store_true", help="plain random holdout")
        p.add_argument("--out", required=True)
        if name == "evaluate":
            p.add_argument("--summary", default=None, help="summary CSV (default: <out>.csv)")
            p.add_argument("--name", default=None, help="dataset name for the reports")
        else:
            p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
            p.add_argument("--grid", required=True, help="comma-separated values")
        p.set_defaults(func=func)

    p = sub.add_parser("score", parents=[common], help="CSS of every feature, best first")
    _add_data(p)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("fetch", parents=[common], help="download an OpenML dataset as CSV")
    p.add_argument("--openml", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch)
    return parser


def _configure_logging(verbosity: int) -> None:
    logger = logging.getLogger("cdforest")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(logging.WARNING - 10 * min(verbosity, 2))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.verbose)
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetworkError as exc:
        print(f"error: network: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (DataError, ModelFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
