"""Versioned JSON model files."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .cdt import LeafNode, SplitNode, TreeConfig, TreeNode
from .forest import Forest, ForestConfig

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, LeafNode):
        return {"label": node.label,
                "class_counts": {str(c): n for c, n in sorted(node.class_counts.items())}}
    return {
        "selected_features": list(node.selected_features),
        "centroids": {str(c): [float(v) for v in row] for c, row in zip(node.classes, node.centroids)},
        "children": {str(c): _node_to_dict(ch) for c, ch in zip(node.classes, node.children)},
    }


def _node_from_dict(rec: dict, p: int, K: int) -> TreeNode:
    if "label" in rec:
        label = int(rec["label"])
        if not 0 <= label < K:
            raise ModelFormatError(f"leaf label {label} out of range")
        return LeafNode(label, {int(c): int(n) for c, n in rec["class_counts"].items()})
    feats = tuple(int(j) for j in rec["selected_features"])
    if not feats or any(not 0 <= j < p for j in feats):
        raise ModelFormatError("split node feature index out of range")
    if set(rec["centroids"]) != set(rec["children"]):
        raise ModelFormatError("centroid and child keys differ")
    classes = tuple(sorted(int(c) for c in rec["centroids"]))
    C = np.array([rec["centroids"][str(c)] for c in classes], dtype=np.float64)
    if C.shape != (len(classes), len(feats)):
        raise ModelFormatError("centroid length does not match selected features")
    C.setflags(write=False)
    children = tuple(_node_from_dict(rec["children"][str(c)], p, K) for c in classes)
    return SplitNode(feats, classes, C, children)


def forest_to_dict(forest: Forest) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "config": asdict(forest.config),
        "m": forest.m,
        "label_names": list(forest.label_names),
        "p": forest.p,
        "standardizer": None,
        "trees": [_node_to_dict(t) for t in forest.trees],
    }
    if forest.standardizer is not None:
        mean, scale = forest.standardizer
        out["standardizer"] = {"mean": [float(v) for v in mean], "scale": [float(v) for v in scale]}
    return out


def forest_from_dict(doc: dict) -> Forest:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format_version {version!r}")
    try:
        cfg = dict(doc["config"])
        cfg["tree"] = TreeConfig(**cfg["tree"])
        config = ForestConfig(**cfg)
        p = int(doc["p"])
        names = tuple(doc["label_names"])
        trees = tuple(_node_from_dict(t, p, len(names)) for t in doc["trees"])
        std = doc.get("standardizer")
        standardizer = None
        if std is not None:
            standardizer = (np.array(std["mean"], dtype=np.float64),
                            np.array(std["scale"], dtype=np.float64))
            if standardizer[0].shape != (p,) or standardizer[1].shape != (p,):
                raise ModelFormatError("standardizer length does not match p")
    except (KeyError, TypeError, AttributeError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from exc
    if len(trees) != config.n_trees:
        raise ModelFormatError(f"expected {config.n_trees} trees, found {len(trees)}")
    return Forest(trees, config, names, p, standardizer)


def dumps(forest: Forest) -> str:
    return json.dumps(forest_to_dict(forest), separators=(",", ":")) + "\n"


def loads(text: str) -> Forest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return forest_from_dict(doc)


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(forest: Forest, path) -> None:
    atomic_write_text(path, dumps(forest))


def load_model(path) -> Forest:
    return loads(Path(path).read_text(encoding="utf-8"))
