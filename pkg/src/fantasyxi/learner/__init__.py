"""Regression stack: categorical codebooks, feature matrices, tree ensembles."""

from .codebook import Codebook, fit_codebook
from .forest import (
    EXTRA_TREES,
    RANDOM_FOREST,
    EvalReport,
    Forest,
    ForestConfig,
    Tree,
    evaluate,
    load_model,
    predict_matrix,
    predict_row,
    save_model,
    train_forest,
)
from .matrix import (
    BATTING_COLUMNS,
    BOWLING_COLUMNS,
    FeatureMatrix,
    codebook_from_store,
    encode_batting,
    encode_bowling,
    encode_store,
    train_test_split,
)

__all__ = [
    "BATTING_COLUMNS", "BOWLING_COLUMNS", "Codebook", "EXTRA_TREES",
    "EvalReport", "FeatureMatrix", "Forest", "ForestConfig", "RANDOM_FOREST",
    "Tree", "codebook_from_store", "encode_batting", "encode_bowling",
    "encode_store", "evaluate", "fit_codebook", "load_model", "predict_matrix",
    "predict_row", "save_model", "train_forest", "train_test_split",
]
