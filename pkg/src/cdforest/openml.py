"""Minimal OpenML client: resolve a dataset id, download its ARFF, cache it."""
from __future__ import annotations

import json
import logging
import os
import urllib.error
import urllib.request
from pathlib import Path

from .dataset import Dataset, DataError, load_arff
from .model_io import atomic_write_text

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://www.openml.org"
TIMEOUT = 60


class NetworkError(RuntimeError):
    pass


class DatasetNotFound(DataError):
    pass


def cache_dir() -> Path:
    root = os.environ.get("CDF_CACHE_DIR")
    path = Path(root) if root else Path.home() / ".cache" / "cdforest"
    return path / "openml"


def _get(url: str) -> bytes:
    log.debug("GET %s", url)
    try:
        with urllib.request.urlopen(url, timeout=TIMEOUT) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        # OpenML answers unknown ids with 412 (or 404) and a JSON error body
        if exc.code in (404, 412):
            raise DatasetNotFound(f"dataset not found ({url}: HTTP {exc.code})") from exc
        raise NetworkError(f"HTTP {exc.code} for {url}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkError(f"cannot reach {url}: {getattr(exc, 'reason', exc)}") from exc


def describe(dataset_id: int, base_url: str | None = None) -> dict:
    base = (base_url or os.environ.get("CDF_OPENML_URL") or DEFAULT_BASE_URL).rstrip("/")
    raw = _get(f"{base}/api/v1/json/data/{int(dataset_id)}")
    try:
        desc = json.loads(raw)["data_set_description"]
        desc["url"]
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"unexpected OpenML description payload for id {dataset_id}") from exc
    return desc


def fetch_arff(dataset_id: int, base_url: str | None = None) -> tuple[Path, dict]:
    """Path of the cached ARFF for ``dataset_id`` plus its description.

    Downloads only on a cache miss.
    """
    if int(dataset_id) <= 0:
        raise DatasetNotFound(f"dataset not found: invalid id {dataset_id}")
    root = cache_dir()
    arff_path = root / f"{int(dataset_id)}.arff"
    desc_path = root / f"{int(dataset_id)}.json"
    if arff_path.exists() and desc_path.exists():
        log.info("cache hit for OpenML dataset %s (%s)", dataset_id, arff_path)
        return arff_path, json.loads(desc_path.read_text(encoding="utf-8"))
    log.info("cache miss for OpenML dataset %s; downloading", dataset_id)
    desc = describe(dataset_id, base_url)
    payload = _get(desc["url"])
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"ARFF payload for id {dataset_id} is not UTF-8") from exc
    root.mkdir(parents=True, exist_ok=True)
    atomic_write_text(arff_path, text)
    atomic_write_text(desc_path, json.dumps(desc, sort_keys=True))
    return arff_path, desc


def fetch_dataset(dataset_id: int, base_url: str | None = None) -> Dataset:
    path, desc = fetch_arff(dataset_id, base_url)
    target = desc.get("default_target_attribute") or None
    if target and "," in target:
        target = None
    return load_arff(path, label=target)
