"""Data series backing the player/team insight charts.

Every series is a pure function of the performance store: labels are sorted,
histogram bins are fixed-width from zero, and quartiles use linear
interpolation, so re-deriving a series after a restart yields identical JSON.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import NO_RESULT, PerformanceStore, moving_average
from .errors import UnknownPlayer, UnknownTeam

PLAYER_KINDS = ("score_timeline", "moving_average", "sr_distribution",
                "econ_distribution", "dismissal_breakdown", "win_loss",
                "points_histogram", "boundary_mix", "venue_split",
                "opponent_split")
TEAM_KINDS = ("win_loss", "points_histogram", "venue_split", "opponent_split")
BATTING_ONLY = {"sr_distribution", "dismissal_breakdown", "boundary_mix"}
BOWLING_ONLY = {"econ_distribution"}

MOVING_AVERAGE_WINDOW = 5


@dataclass
class InsightSeries:
    kind: str
    scope: str
    points: list[tuple]
    summary: tuple[float, float, float, float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "scope": self.scope,
            "points": [[label, value] for label, value in self.points],
            "summary": list(self.summary) if self.summary else None,
        }


def _five_number(values) -> tuple[float, float, float, float, float]:
    arr = np.asarray(sorted(values), dtype=np.float64)
    q = np.percentile(arr, [0, 25, 50, 75, 100])
    return tuple(float(v) for v in q)


def _histogram(values, width: float) -> list[tuple]:
    bins: dict[int, int] = {}
    for v in values:
        b = int(np.floor(v / width))
        bins[b] = bins.get(b, 0) + 1
    return [("%g" % (b * width), bins[b]) for b in sorted(bins)]


def _match_rows(rows):
    """Group rows by match identity (date, rival, format, sequence)."""
    grouped: dict[tuple, list] = {}
    for r in rows:
        grouped.setdefault((r.date.isoformat(), r.team2, r.format, r.seq), []).append(r)
    return dict(sorted(grouped.items()))


def _win_loss_series(scope: str, rows) -> InsightSeries:
    matches = _match_rows(rows)
    wins = losses = no_results = 0
    for _, group in matches.items():
        row = group[0]
        if row.winner == NO_RESULT:
            no_results += 1
        elif row.winner == row.team1:
            wins += 1
        else:
            losses += 1
    total = len(matches)
    return InsightSeries("win_loss", scope, [
        ("wins", wins), ("losses", losses), ("no_results", no_results),
        ("win_rate", wins / total if total else 0.0),
    ])


def _split_series(kind: str, scope: str, rows, key) -> InsightSeries:
    counts: dict[str, int] = {}
    for r in rows:
        label = key(r)
        counts[label] = counts.get(label, 0) + 1
    return InsightSeries(kind, scope, sorted(counts.items()))


def player_insights(store: PerformanceStore, player: str) -> list[InsightSeries]:
    """The full kind set applicable to the player's disciplines, fixed order."""
    bat_rows = [store.batting[i] for i in store.batting_by_player.get(player, [])]
    bowl_rows = [store.bowling[i] for i in store.bowling_by_player.get(player, [])]
    if not bat_rows and not bowl_rows:
        raise UnknownPlayer(player)
    all_rows = bat_rows + bowl_rows

    # combined per-match fantasy score, date order
    per_match: dict[tuple, float] = {}
    for r in all_rows:
        key = (r.date.isoformat(), r.team2, r.format, r.seq)
        per_match[key] = per_match.get(key, 0.0) + r.fantasy_score
    timeline = sorted(per_match.items())
    dates = [k[0] for k, _ in timeline]
    scores = [v for _, v in timeline]

    series = []
    for kind in PLAYER_KINDS:
        if kind in BATTING_ONLY and not bat_rows:
            continue
        if kind in BOWLING_ONLY and not bowl_rows:
            continue
        if kind == "score_timeline":
            series.append(InsightSeries(kind, player, list(zip(dates, scores))))
        elif kind == "moving_average":
            ma = moving_average(scores, MOVING_AVERAGE_WINDOW)
            series.append(InsightSeries(kind, player, list(zip(dates, ma))))
        elif kind == "sr_distribution":
            values = [r.strike_rate for r in bat_rows]
            series.append(InsightSeries(kind, player, _histogram(values, 25.0),
                                        summary=_five_number(values)))
        elif kind == "econ_distribution":
            values = [r.economy_rate for r in bowl_rows]
            series.append(InsightSeries(kind, player, _histogram(values, 1.0),
                                        summary=_five_number(values)))
        elif kind == "dismissal_breakdown":
            counts: dict[str, int] = {}
            for r in bat_rows:
                counts[r.dismissal_kind] = counts.get(r.dismissal_kind, 0) + 1
            total = len(bat_rows)
            series.append(InsightSeries(kind, player,
                                        [(k, v / total) for k, v in
                                         sorted(counts.items())]))
        elif kind == "win_loss":
            series.append(_win_loss_series(player, all_rows))
        elif kind == "points_histogram":
            series.append(InsightSeries(kind, player, _histogram(scores, 10.0),
                                        summary=_five_number(scores)))
        elif kind == "boundary_mix":
            fours = sum(r.fours for r in bat_rows)
            sixes = sum(r.sixes for r in bat_rows)
            runs = sum(r.runs for r in bat_rows)
            series.append(InsightSeries(kind, player, [
                ("four_runs", fours * 4), ("six_runs", sixes * 6),
                ("other_runs", runs - fours * 4 - sixes * 6)]))
        elif kind == "venue_split":
            series.append(_split_series(kind, player, all_rows, lambda r: r.venue))
        elif kind == "opponent_split":
            series.append(_split_series(kind, player, all_rows, lambda r: r.team2))
    return series


def team_insights(store: PerformanceStore, team: str) -> list[InsightSeries]:
    rows = [r for r in store.batting if r.team1 == team]
    rows += [r for r in store.bowling if r.team1 == team]
    if not rows:
        raise UnknownTeam(team)
    series = []
    for kind in TEAM_KINDS:
        if kind == "win_loss":
            series.append(_win_loss_series(team, rows))
        elif kind == "points_histogram":
            values = [r.fantasy_score for r in rows]
            series.append(InsightSeries(kind, team, _histogram(values, 10.0),
                                        summary=_five_number(values)))
        elif kind == "venue_split":
            series.append(_split_series(kind, team, rows, lambda r: r.venue))
        elif kind == "opponent_split":
            series.append(_split_series(kind, team, rows, lambda r: r.team2))
    return series
