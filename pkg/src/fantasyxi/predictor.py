"""Projection pipeline: 5-field query -> relaxed historical rows -> per-row
forest predictions -> averaged projection.

The query starts fully constrained (player, format, team1, team2, venue) and
constraints are dropped one at a time in a fixed order (venue, team2, team1,
format; player never) until enough rows match. Each relaxation level is a
superset of the previous one, so the matched set is simply the widest level's
rows, deduplicated by row key.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import PerformanceStore
from .errors import ColdStart, EmptySquad, InvariantViolation
from .learner import Forest, encode_batting, encode_bowling, predict_matrix

DEFAULT_RELAXATION_ORDER = ("venue", "team2", "team1", "format")
DEFAULT_K_MIN = 5


@dataclass
class PredictionQuery:
    player: str
    format: str
    team1: str
    team2: str
    venue: str

    def validate(self) -> None:
        for name in ("player", "format", "team1", "team2", "venue"):
            if not getattr(self, name):
                raise InvariantViolation(f"query field {name} is empty")
        if self.team1 == self.team2:
            raise InvariantViolation("team1 equals team2")


@dataclass
class RelaxationStep:
    constraints: list[str]  # field names still enforced, player always first
    matched: int            # cumulative distinct rows at this level


@dataclass
class RelaxationTrace:
    steps: list[RelaxationStep] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.steps[-1].matched if self.steps else 0

    def to_dict(self) -> dict:
        return {"steps": [{"constraints": s.constraints, "matched": s.matched}
                          for s in self.steps],
                "n_rows": self.n_rows}


@dataclass
class PlayerProjection:
    player: str
    batting_points: float | None
    bowling_points: float | None
    total_points: float
    n_rows_used: int
    batting_trace: RelaxationTrace | None = None
    bowling_trace: RelaxationTrace | None = None

    def to_dict(self) -> dict:
        return {
            "player": self.player,
            "batting_points": self.batting_points,
            "bowling_points": self.bowling_points,
            "total_points": self.total_points,
            "n_rows_used": self.n_rows_used,
            "batting_trace": self.batting_trace.to_dict() if self.batting_trace else None,
            "bowling_trace": self.bowling_trace.to_dict() if self.bowling_trace else None,
        }


def _row_fields(row, discipline: str, query: PredictionQuery) -> dict[str, bool]:
    player = row.batsman if discipline == "batting" else row.bowler
    return {
        "player": player == query.player,
        "format": row.format == query.format,
        "team1": row.team1 == query.team1,
        "team2": row.team2 == query.team2,
        "venue": row.venue == query.venue,
    }


def fetch_rows(store: PerformanceStore, query: PredictionQuery, discipline: str,
               k_min: int = DEFAULT_K_MIN,
               relaxation_order=DEFAULT_RELAXATION_ORDER):
    """Rows backing the projection plus the relaxation trace.

    Raises ColdStart when the player has no rows in the discipline at all.
    """
    query.validate()
    if discipline == "batting":
        indices = store.batting_by_player.get(query.player, [])
        rows = [store.batting[i] for i in indices]
    else:
        indices = store.bowling_by_player.get(query.player, [])
        rows = [store.bowling[i] for i in indices]
    if not rows:
        raise ColdStart(f"{query.player}: no {discipline} history")

    active = ["player", "format", "team1", "team2", "venue"]
    trace = RelaxationTrace()
    matched: list = []
    drop_queue = [f for f in relaxation_order if f in active]
    while True:
        matched = [r for r in rows
                   if all(_row_fields(r, discipline, query)[f] for f in active)]
        trace.steps.append(RelaxationStep(constraints=list(active),
                                          matched=len(matched)))
        if len(matched) >= k_min or not drop_queue:
            break
        active.remove(drop_queue.pop(0))
    return matched, trace


def project(store: PerformanceStore, batting_model: Forest | None,
            bowling_model: Forest | None, query: PredictionQuery,
            k_min: int = DEFAULT_K_MIN,
            relaxation_order=DEFAULT_RELAXATION_ORDER) -> PlayerProjection:
    """Average the model's prediction over the player's relevant history.

    A player present in both tables gets both components and their sum; a
    player present in neither raises ColdStart.
    """
    query.validate()
    batting_points = None
    bowling_points = None
    batting_trace = None
    bowling_trace = None
    n_rows = 0

    if batting_model is not None and query.player in store.batting_by_player:
        rows, batting_trace = fetch_rows(store, query, "batting", k_min,
                                         relaxation_order)
        matrix = encode_batting(rows, batting_model.codebook)
        preds = predict_matrix(batting_model, matrix.X)
        batting_points = _orderfree_mean(preds)
        n_rows += len(rows)

    if bowling_model is not None and query.player in store.bowling_by_player:
        rows, bowling_trace = fetch_rows(store, query, "bowling", k_min,
                                         relaxation_order)
        matrix = encode_bowling(rows, bowling_model.codebook)
        preds = predict_matrix(bowling_model, matrix.X)
        bowling_points = _orderfree_mean(preds)
        n_rows += len(rows)

    if batting_points is None and bowling_points is None:
        raise ColdStart(f"{query.player}: no history in either discipline")

    return PlayerProjection(
        player=query.player,
        batting_points=batting_points,
        bowling_points=bowling_points,
        total_points=(batting_points or 0.0) + (bowling_points or 0.0),
        n_rows_used=n_rows,
        batting_trace=batting_trace,
        bowling_trace=bowling_trace,
    )


def _orderfree_mean(preds: np.ndarray) -> float:
    """Mean summed in sorted order, so shuffling the store cannot move the
    result by an ulp."""
    return float(np.sort(preds).sum() / len(preds))


@dataclass
class FixtureProjections:
    projections: list[PlayerProjection]
    cold_start: list[str]


def project_fixture(store: PerformanceStore, batting_model: Forest | None,
                    bowling_model: Forest | None, team1: str, team2: str,
                    fmt: str, venue: str, squads: tuple[list[str], list[str]],
                    k_min: int = DEFAULT_K_MIN,
                    relaxation_order=DEFAULT_RELAXATION_ORDER) -> FixtureProjections:
    """One projection per squad player, input order preserved; cold-start
    players are reported, not fatal."""
    if not squads[0] or not squads[1]:
        raise EmptySquad("both squads need at least one player")
    projections = []
    cold = []
    for side, squad in enumerate(squads):
        own = team1 if side == 0 else team2
        rival = team2 if side == 0 else team1
        for player in squad:
            query = PredictionQuery(player=player, format=fmt, team1=own,
                                    team2=rival, venue=venue)
            try:
                projections.append(project(store, batting_model, bowling_model,
                                           query, k_min, relaxation_order))
            except ColdStart:
                cold.append(player)
    return FixtureProjections(projections=projections, cold_start=cold)
