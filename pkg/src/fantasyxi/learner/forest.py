"""Seeded tree-ensemble regressors and their flat-file persistence.

Two ensemble kinds share one tree grower: extremely randomized trees (uniform
random thresholds, no bootstrap, the production model) and random forest
(bootstrap plus exhaustive midpoint splits, the comparison baseline). Each
tree owns a substream derived from (seed, tree_index), so parallel and serial
training build bit-identical forests.
"""

from __future__ import annotations

import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import InvalidConfig, ModelFormatError, WidthMismatch, ZeroVariance
from ..rng import stream_seed
from .codebook import Codebook
from .matrix import FeatureMatrix

MODEL_MAGIC = b"FXI1\n"
MODEL_SCHEMA_VERSION = 1

EXTRA_TREES = "extra_trees"
RANDOM_FOREST = "random_forest"

_TREE_STREAM_BASE = 0x7EE5


@dataclass
class ForestConfig:
    kind: str = EXTRA_TREES
    n_trees: int = 100
    min_samples_leaf: int = 2
    max_features: int | None = None  # None resolves to ceil(sqrt(n_columns))
    seed: int = 42

    def validate(self, n_columns: int) -> int:
        if self.kind not in (EXTRA_TREES, RANDOM_FOREST):
            raise InvalidConfig(f"unknown ensemble kind {self.kind!r}")
        if self.n_trees < 1:
            raise InvalidConfig("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise InvalidConfig("min_samples_leaf must be >= 1")
        resolved = self.max_features or math.ceil(math.sqrt(n_columns))
        if not 1 <= resolved <= n_columns:
            raise InvalidConfig(f"max_features {resolved} outside [1, {n_columns}]")
        return resolved


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


@dataclass
class Forest:
    kind: str
    discipline: str
    columns: list[str]
    n_trees: int
    min_samples_leaf: int
    max_features: int
    seed: int
    trees: list[Tree]
    codebook: Codebook
    target_min: float
    target_max: float
    n_train: int
    degenerate: bool = False
    tables_hash: str = ""
    split: float = 0.7


@dataclass
class EvalReport:
    r2: float | None
    mae: float
    bucket_accuracy: float
    n_train: int
    n_test: int
    seed: int
    zero_variance: bool = False

    def to_dict(self) -> dict:
        return {
            "r2": self.r2,
            "mae": self.mae,
            "bucket_accuracy": self.bucket_accuracy,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "seed": self.seed,
            "zero_variance": self.zero_variance,
        }


def train_forest(train: FeatureMatrix, config: ForestConfig, codebook: Codebook,
                 tables_hash: str = "", n_jobs: int = 1) -> Forest:
    """Fit the configured ensemble on the training matrix.

    A constant-target matrix is not an error: every tree collapses to one
    leaf and the forest is flagged degenerate.
    """
    n, d = train.X.shape
    max_features = config.validate(d)
    if n < config.min_samples_leaf:
        raise InvalidConfig(
            f"{n} training rows < min_samples_leaf {config.min_samples_leaf}")
    X = np.ascontiguousarray(train.X, dtype=np.float64)
    y = np.ascontiguousarray(train.y, dtype=np.float64)
    bootstrap = config.kind == RANDOM_FOREST
    exhaustive = config.kind == RANDOM_FOREST

    def build(tree_index: int) -> Tree:
        seed = stream_seed(config.seed, _TREE_STREAM_BASE + tree_index)
        return Tree(*kernels.fit_tree(X, y, seed, max_features,
                                      config.min_samples_leaf, bootstrap,
                                      exhaustive))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(build, range(config.n_trees)))
    else:
        trees = [build(i) for i in range(config.n_trees)]

    return Forest(
        kind=config.kind,
        discipline=train.discipline,
        columns=list(train.columns),
        n_trees=config.n_trees,
        min_samples_leaf=config.min_samples_leaf,
        max_features=max_features,
        seed=config.seed,
        trees=trees,
        codebook=codebook,
        target_min=float(y.min()),
        target_max=float(y.max()),
        n_train=n,
        degenerate=bool(y.min() == y.max()),
        tables_hash=tables_hash,
    )


def predict_matrix(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Ensemble mean over trees, accumulated in tree order."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(forest.columns):
        raise WidthMismatch(
            f"expected {len(forest.columns)} columns, got {X.shape}")
    acc = np.zeros(X.shape[0], dtype=np.float64)
    for tree in forest.trees:
        acc += kernels.predict_tree(tree.feature, tree.threshold, tree.left,
                                    tree.right, tree.value, X)
    return acc / forest.n_trees


def predict_row(forest: Forest, row) -> float:
    arr = np.asarray(row, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != len(forest.columns):
        raise WidthMismatch(
            f"expected width {len(forest.columns)}, got {arr.shape}")
    return float(predict_matrix(forest, arr.reshape(1, -1))[0])


def evaluate(forest: Forest, test: FeatureMatrix) -> EvalReport:
    """R^2, MAE, and width-10 bucket accuracy on held-out rows."""
    if test.n == 0:
        raise ZeroVariance("empty test matrix")
    preds = predict_matrix(forest, test.X)
    err = preds - test.y
    mae = float(np.mean(np.abs(err)))
    bucket = float(np.mean(np.floor(preds / 10.0) == np.floor(test.y / 10.0)))
    ss_tot = float(np.sum((test.y - test.y.mean()) ** 2))
    if ss_tot == 0.0:
        return EvalReport(r2=None, mae=mae, bucket_accuracy=bucket,
                          n_train=forest.n_train, n_test=test.n,
                          seed=forest.seed, zero_variance=True)
    ss_res = float(np.sum(err ** 2))
    return EvalReport(r2=1.0 - ss_res / ss_tot, mae=mae, bucket_accuracy=bucket,
                      n_train=forest.n_train, n_test=test.n, seed=forest.seed)


# -- persistence ----------------------------------------------------------------

def save_model(forest: Forest, path: str) -> None:
    """Magic string, JSON header, then per-tree node arrays (little-endian)."""
    header = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": forest.kind,
        "discipline": forest.discipline,
        "columns": forest.columns,
        "config": {
            "n_trees": forest.n_trees,
            "min_samples_leaf": forest.min_samples_leaf,
            "max_features": forest.max_features,
            "seed": forest.seed,
        },
        "codebook": {
            "columns": forest.codebook.columns,
            "unknown_policy": forest.codebook.unknown_policy,
        },
        "target_min": forest.target_min,
        "target_max": forest.target_max,
        "n_train": forest.n_train,
        "degenerate": forest.degenerate,
        "tables_hash": forest.tables_hash,
        "split": forest.split,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for tree in forest.trees:
            fh.write(struct.pack("<I", tree.n_nodes))
            fh.write(tree.feature.astype("<i4").tobytes())
            fh.write(tree.threshold.astype("<f8").tobytes())
            fh.write(tree.left.astype("<i4").tobytes())
            fh.write(tree.right.astype("<i4").tobytes())
            fh.write(tree.value.astype("<f8").tobytes())


def load_model(path: str) -> Forest:
    with open(path, "rb") as fh:
        if fh.read(len(MODEL_MAGIC)) != MODEL_MAGIC:
            raise ModelFormatError(f"{path}: bad magic")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise ModelFormatError(
                f"{path}: schema_version {header.get('schema_version')} "
                f"!= {MODEL_SCHEMA_VERSION}")
        config = header["config"]
        trees = []
        for _ in range(config["n_trees"]):
            raw = fh.read(4)
            if len(raw) != 4:
                raise ModelFormatError(f"{path}: truncated tree section")
            (n_nodes,) = struct.unpack("<I", raw)
            feature = np.frombuffer(fh.read(4 * n_nodes), dtype="<i4").astype(np.int32)
            threshold = np.frombuffer(fh.read(8 * n_nodes), dtype="<f8").astype(np.float64)
            left = np.frombuffer(fh.read(4 * n_nodes), dtype="<i4").astype(np.int32)
            right = np.frombuffer(fh.read(4 * n_nodes), dtype="<i4").astype(np.int32)
            value = np.frombuffer(fh.read(8 * n_nodes), dtype="<f8").astype(np.float64)
            trees.append(Tree(feature, threshold, left, right, value))
    codebook = Codebook(columns=header["codebook"]["columns"],
                        unknown_policy=header["codebook"]["unknown_policy"])
    return Forest(
        kind=header["kind"],
        discipline=header["discipline"],
        columns=header["columns"],
        n_trees=config["n_trees"],
        min_samples_leaf=config["min_samples_leaf"],
        max_features=config["max_features"],
        seed=config["seed"],
        trees=trees,
        codebook=codebook,
        target_min=header["target_min"],
        target_max=header["target_max"],
        n_train=header["n_train"],
        degenerate=header["degenerate"],
        tables_hash=header.get("tables_hash", ""),
        split=header.get("split", 0.7),
    )
