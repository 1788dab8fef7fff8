"""Numeric feature matrices for the two disciplines.

Batting rows become 13 columns, bowling rows 12; the first five columns of
each are codebook-encoded categoricals and the rest pass through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import BattingPerformance, BowlingPerformance, PerformanceStore
from ..errors import TooFewRows
from ..rng import Rng, stream_seed
from .codebook import Codebook, fit_codebook

BATTING_COLUMNS = ["batsman", "MF", "team1", "team2", "venue",
                   "runs", "balls", "4s", "6s", "50s", "100s", "ducks", "SR"]
BOWLING_COLUMNS = ["bowler", "MF", "team1", "team2", "venue",
                   "overs", "runs", "maidens", "wicket", "econrate", "4w", "5w"]
CATEGORICAL = ("player", "MF", "team1", "team2", "venue")

_SPLIT_STREAM = 0x5915


@dataclass
class FeatureMatrix:
    discipline: str  # batting | bowling
    columns: list[str]
    X: np.ndarray  # (n, d) float64
    y: np.ndarray  # (n,) float64

    @property
    def n(self) -> int:
        return self.X.shape[0]


def codebook_from_store(store: PerformanceStore, discipline: str,
                        unknown_policy: str = "reject") -> Codebook:
    if discipline == "batting":
        rows = store.batting
        names = [r.batsman for r in rows]
    else:
        rows = store.bowling
        names = [r.bowler for r in rows]
    return fit_codebook({
        "player": names,
        "MF": [r.format for r in rows],
        "team1": [r.team1 for r in rows],
        "team2": [r.team2 for r in rows],
        "venue": [r.venue for r in rows],
    }, unknown_policy=unknown_policy)


def encode_batting(rows: list[BattingPerformance], codebook: Codebook) -> FeatureMatrix:
    X = np.empty((len(rows), 13), dtype=np.float64)
    y = np.empty(len(rows), dtype=np.float64)
    for i, r in enumerate(rows):
        X[i, 0] = codebook.encode("player", r.batsman)
        X[i, 1] = codebook.encode("MF", r.format)
        X[i, 2] = codebook.encode("team1", r.team1)
        X[i, 3] = codebook.encode("team2", r.team2)
        X[i, 4] = codebook.encode("venue", r.venue)
        X[i, 5] = r.runs
        X[i, 6] = r.balls
        X[i, 7] = r.fours
        X[i, 8] = r.sixes
        X[i, 9] = r.fifty_flag
        X[i, 10] = r.hundred_flag
        X[i, 11] = r.duck_flag
        X[i, 12] = r.strike_rate
        y[i] = r.fantasy_score
    return FeatureMatrix("batting", list(BATTING_COLUMNS), X, y)


def encode_bowling(rows: list[BowlingPerformance], codebook: Codebook) -> FeatureMatrix:
    X = np.empty((len(rows), 12), dtype=np.float64)
    y = np.empty(len(rows), dtype=np.float64)
    for i, r in enumerate(rows):
        X[i, 0] = codebook.encode("player", r.bowler)
        X[i, 1] = codebook.encode("MF", r.format)
        X[i, 2] = codebook.encode("team1", r.team1)
        X[i, 3] = codebook.encode("team2", r.team2)
        X[i, 4] = codebook.encode("venue", r.venue)
        X[i, 5] = r.overs
        X[i, 6] = r.runs_conceded
        X[i, 7] = r.maidens
        X[i, 8] = r.wickets
        X[i, 9] = r.economy_rate
        X[i, 10] = r.four_wicket_flag
        X[i, 11] = r.five_wicket_flag
        y[i] = r.fantasy_score
    return FeatureMatrix("bowling", list(BOWLING_COLUMNS), X, y)


def encode_store(store: PerformanceStore, discipline: str,
                 codebook: Codebook) -> FeatureMatrix:
    if discipline == "batting":
        return encode_batting(store.batting, codebook)
    return encode_bowling(store.bowling, codebook)


def train_test_split(matrix: FeatureMatrix, ratio: float,
                     seed: int) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Disjoint, exhaustive split: floor(ratio*n) train rows, rest test."""
    n = matrix.n
    if n < 2:
        raise TooFewRows(f"cannot split {n} rows")
    if not 0.0 < ratio < 1.0:
        raise TooFewRows(f"ratio {ratio} outside (0, 1)")
    n_train = int(ratio * n)
    if n_train == 0 or n_train == n:
        raise TooFewRows(f"ratio {ratio} leaves an empty side for n={n}")
    order = list(range(n))
    Rng(stream_seed(seed, _SPLIT_STREAM)).shuffle(order)
    train_idx = np.array(order[:n_train], dtype=np.int64)
    test_idx = np.array(order[n_train:], dtype=np.int64)
    make = lambda idx: FeatureMatrix(matrix.discipline, matrix.columns,
                                     matrix.X[idx], matrix.y[idx])
    return make(train_idx), make(test_idx)
