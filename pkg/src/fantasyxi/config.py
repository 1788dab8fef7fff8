"""Engine configuration: one editable YAML tree, CLI flags override fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .predictor import DEFAULT_K_MIN, DEFAULT_RELAXATION_ORDER


@dataclass
class EngineConfig:
    data_dir: str = "data"
    rubric_path: str | None = None  # None -> shipped default rubric
    seed: int = 42
    split: float = 0.7
    kind: str = "extra_trees"
    n_trees: int = 100
    min_samples_leaf: int = 2
    max_features: int | None = None
    k_min: int = DEFAULT_K_MIN
    relaxation_order: list[str] = field(
        default_factory=lambda: list(DEFAULT_RELAXATION_ORDER))
    roster_size: int = 11
    budget: float = 100.0
    max_per_team: int = 7
    port: int = 8089


def load_config(path: str | None) -> EngineConfig:
    config = EngineConfig()
    if path is None:
        return config
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    for key, value in doc.items():
        if not hasattr(config, key):
            raise KeyError(f"unknown config key {key!r}")
        setattr(config, key, value)
    return config
