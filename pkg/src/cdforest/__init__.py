"""Centroid decision forests for high-dimensional classification."""
from .cdt import TreeConfig, build_tree, predict_tree
from .css import class_stats, css_scores, select_top_m
from .dataset import Dataset, DataError, load_arff, load_csv, stratified_split
from .forest import Forest, ForestConfig, predict, predict_batch, predict_votes, train_forest
from .harness import EvalProtocol, EvalReport, make_blobs, repeated_holdout, sweep
from .metrics import accuracy, cohens_kappa, confusion

__all__ = [
    "Dataset", "DataError", "load_csv", "load_arff", "stratified_split",
    "class_stats", "css_scores", "select_top_m",
    "TreeConfig", "build_tree", "predict_tree",
    "Forest", "ForestConfig", "train_forest", "predict", "predict_votes", "predict_batch",
    "accuracy", "cohens_kappa", "confusion",
    "EvalProtocol", "EvalReport", "repeated_holdout", "sweep", "make_blobs",
]
