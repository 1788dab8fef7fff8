"""Per-player per-match performance rows, engineered features, and fantasy
scores.

Aggregation conventions (cricket-standard where the source data is silent):
balls faced exclude wides but include no-balls; a bowler's legal deliveries
exclude both; runs conceded include wides and no-balls but not byes, leg byes,
or penalty runs; run outs and similar dismissals are not credited to the
bowler. Innings beyond the second (super overs) are ignored for aggregation.
"""

from __future__ import annotations

import csv
import datetime as dt
import os
from dataclasses import dataclass, field

from .errors import EmptySeries, LengthMismatch
from .ingest import NON_BOWLER_DISMISSALS, MatchRecord
from .rubric import ScoringRubric

NOT_OUT = "notOut"
NO_RESULT = "no result"

BATTING_HEADER = ("batsman,runs,balls,4s,6s,SR,bowler,kind,player_out,date,"
                  "team2,winner,venue,team1,MF,50s,100s,ducks,dr11Score")
BOWLING_HEADER = ("bowler,overs,runs,maidens,wicket,econrate,date,team2,"
                  "winner,venue,team1,MF,4w,5w,dr11Score")


@dataclass
class BattingPerformance:
    batsman: str
    runs: int
    balls: int
    fours: int
    sixes: int
    strike_rate: float
    dismissal_kind: str
    dismissed_by_bowler: str
    date: dt.date
    team1: str
    team2: str
    winner: str
    venue: str
    format: str
    fifty_flag: int = 0
    hundred_flag: int = 0
    duck_flag: int = 0
    fantasy_score: float = 0.0
    match_id: str = ""
    seq: int = 0  # disambiguates double-headers sharing (player, date, team2, format)

    def key(self):
        return (self.batsman, self.date.isoformat(), self.team2, self.format, self.seq)


@dataclass
class BowlingPerformance:
    bowler: str
    overs: int
    balls_bowled: int
    runs_conceded: int
    maidens: int
    wickets: int
    economy_rate: float
    date: dt.date
    team1: str
    team2: str
    winner: str
    venue: str
    format: str
    four_wicket_flag: int = 0
    five_wicket_flag: int = 0
    fantasy_score: float = 0.0
    match_id: str = ""
    seq: int = 0

    def key(self):
        return (self.bowler, self.date.isoformat(), self.team2, self.format, self.seq)


# -- per-match aggregation ---------------------------------------------------

def _is_wide(d) -> bool:
    return bool(d.extras and "wides" in d.extras)


def _is_noball(d) -> bool:
    return bool(d.extras and "noballs" in d.extras)


def _conceded(d) -> int:
    """Runs charged to the bowler: total minus byes/legbyes/penalty."""
    if not d.extras:
        return d.runs_total
    exempt = sum(v for k, v in d.extras.items() if k in ("byes", "legbyes", "penalty"))
    return d.runs_total - exempt


def _match_context(match: MatchRecord, batting_team: str):
    meta = match.meta
    rival = meta.teams[1] if batting_team == meta.teams[0] else meta.teams[0]
    winner = meta.outcome_winner if meta.outcome_winner else NO_RESULT
    venue = meta.venue or meta.city or "unknown"
    return rival, winner, venue


def aggregate_batting(match: MatchRecord) -> list[BattingPerformance]:
    """One row per batsman who faced a legal ball or was dismissed, in order
    of first involvement."""
    rows: dict[tuple[int, str], dict] = {}
    order: list[tuple[int, str]] = []
    for inn in match.innings:
        for d in inn.deliveries:
            if d.innings_index > 2:
                continue
            key = (d.innings_index, d.batsman)
            if key not in rows:
                rows[key] = {"runs": 0, "balls": 0, "fours": 0, "sixes": 0,
                             "kind": NOT_OUT, "by": NOT_OUT, "team": inn.batting_team}
                order.append(key)
            agg = rows[key]
            agg["runs"] += d.runs_batsman
            if not _is_wide(d):
                agg["balls"] += 1
            if d.runs_batsman == 4:
                agg["fours"] += 1
            elif d.runs_batsman == 6:
                agg["sixes"] += 1
            if d.wicket:
                kind, player_out, _ = d.wicket
                out_key = (d.innings_index, player_out)
                if out_key not in rows:
                    rows[out_key] = {"runs": 0, "balls": 0, "fours": 0, "sixes": 0,
                                     "kind": NOT_OUT, "by": NOT_OUT,
                                     "team": inn.batting_team}
                    order.append(out_key)
                rows[out_key]["kind"] = kind
                rows[out_key]["by"] = d.bowler
    out = []
    for key in order:
        agg = rows[key]
        if agg["balls"] == 0 and agg["kind"] == NOT_OUT:
            continue
        rival, winner, venue = _match_context(match, agg["team"])
        sr = 0.0 if agg["balls"] == 0 else float(round(agg["runs"] / agg["balls"] * 100))
        out.append(BattingPerformance(
            batsman=key[1], runs=agg["runs"], balls=agg["balls"],
            fours=agg["fours"], sixes=agg["sixes"], strike_rate=sr,
            dismissal_kind=agg["kind"], dismissed_by_bowler=agg["by"],
            date=match.meta.dates[0], team1=agg["team"], team2=rival,
            winner=winner, venue=venue, format=match.meta.format,
            match_id=match.meta.match_id,
        ))
    return out


def aggregate_bowling(match: MatchRecord) -> list[BowlingPerformance]:
    """One row per bowler who delivered at least one ball."""
    rows: dict[tuple[int, str], dict] = {}
    order: list[tuple[int, str]] = []
    over_groups: dict[tuple[int, int], list] = {}
    for inn in match.innings:
        for d in inn.deliveries:
            if d.innings_index > 2:
                continue
            key = (d.innings_index, d.bowler)
            if key not in rows:
                rival, _, _ = _match_context(match, inn.batting_team)
                # the bowler's own team is the one not batting
                rows[key] = {"balls": 0, "conceded": 0, "wickets": 0, "maidens": 0,
                             "team": rival, "rival": inn.batting_team}
                order.append(key)
            agg = rows[key]
            if not (_is_wide(d) or _is_noball(d)):
                agg["balls"] += 1
            agg["conceded"] += _conceded(d)
            if d.wicket and d.wicket[0] not in NON_BOWLER_DISMISSALS:
                agg["wickets"] += 1
            over_groups.setdefault((d.innings_index, d.over), []).append(d)

    for (inn_idx, _), deliveries in over_groups.items():
        bowlers = {d.bowler for d in deliveries}
        if len(bowlers) != 1:
            continue
        legal = sum(1 for d in deliveries if not (_is_wide(d) or _is_noball(d)))
        conceded = sum(_conceded(d) for d in deliveries)
        if legal == 6 and conceded == 0:
            rows[(inn_idx, deliveries[0].bowler)]["maidens"] += 1

    out = []
    for key in order:
        agg = rows[key]
        balls = agg["balls"]
        overs = balls // 6
        econ = 0.0 if balls == 0 else float(round(agg["conceded"] / (balls / 6)))
        winner = match.meta.outcome_winner if match.meta.outcome_winner else NO_RESULT
        venue = match.meta.venue or match.meta.city or "unknown"
        out.append(BowlingPerformance(
            bowler=key[1], overs=overs, balls_bowled=balls,
            runs_conceded=agg["conceded"], maidens=agg["maidens"],
            wickets=agg["wickets"], economy_rate=econ,
            date=match.meta.dates[0], team1=agg["team"], team2=agg["rival"],
            winner=winner, venue=venue, format=match.meta.format,
            match_id=match.meta.match_id,
        ))
    return out


# -- feature engineering and scoring -----------------------------------------

def engineer_batting(row: BattingPerformance, rubric: ScoringRubric) -> BattingPerformance:
    row.fifty_flag = 1 if 50 <= row.runs < 100 else 0
    row.hundred_flag = 1 if row.runs >= 100 else 0
    row.duck_flag = 1 if row.runs == 0 and row.dismissal_kind != NOT_OUT else 0
    row.fantasy_score = score_batting(row, rubric)
    return row


def engineer_bowling(row: BowlingPerformance, rubric: ScoringRubric) -> BowlingPerformance:
    row.four_wicket_flag = 1 if row.wickets == 4 else 0
    row.five_wicket_flag = 1 if row.wickets >= 5 else 0
    row.fantasy_score = score_bowling(row, rubric)
    return row


def score_batting(row: BattingPerformance, rubric: ScoringRubric) -> float:
    """Linear rubric combination. Bands are evaluated on the full-precision
    strike rate, not the rounded display value."""
    entry = rubric.for_format(row.format)
    bat = entry.batting
    score = (entry.playing_xi_points
             + bat.per_run * row.runs
             + bat.per_four * row.fours
             + bat.per_six * row.sixes
             + bat.fifty_bonus * row.fifty_flag
             + bat.hundred_bonus * row.hundred_flag
             + bat.duck_penalty * row.duck_flag)
    if row.balls > 0:
        sr = row.runs / row.balls * 100.0
        for band in bat.strike_rate_bands:
            if band.matches(sr, row.balls):
                score += band.points
                break
    return score


def score_bowling(row: BowlingPerformance, rubric: ScoringRubric) -> float:
    entry = rubric.for_format(row.format)
    bowl = entry.bowling
    score = (entry.playing_xi_points
             + bowl.per_wicket * row.wickets
             + bowl.four_wicket_bonus * row.four_wicket_flag
             + bowl.five_wicket_bonus * row.five_wicket_flag
             + bowl.per_maiden * row.maidens)
    if row.balls_bowled > 0:
        overs_exact = row.balls_bowled / 6.0
        econ = row.runs_conceded / overs_exact
        for band in bowl.economy_bands:
            if band.matches(econ, overs_exact):
                score += band.points
                break
    return score


# -- series operations -------------------------------------------------------

def moving_average(scores, window: int) -> list[float]:
    """Trailing mean over up to `window` values; partial windows at the start."""
    if window < 1:
        raise ValueError("window must be >= 1")
    values = list(scores)
    if not values:
        raise EmptySeries("moving_average over empty series")
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def cumulative_rate(numerators, denominators, scale: float = 1.0) -> list[float]:
    """Prefix-sum ratio series; 0 where the denominator prefix is still 0."""
    nums = list(numerators)
    dens = list(denominators)
    if len(nums) != len(dens):
        raise LengthMismatch(f"{len(nums)} numerators vs {len(dens)} denominators")
    out = []
    num_acc = 0.0
    den_acc = 0.0
    for n, d in zip(nums, dens):
        num_acc += n
        den_acc += d
        out.append(0.0 if den_acc == 0 else scale * num_acc / den_acc)
    return out


# -- the performance store ---------------------------------------------------

@dataclass
class PerformanceStore:
    batting: list[BattingPerformance] = field(default_factory=list)
    bowling: list[BowlingPerformance] = field(default_factory=list)
    batting_by_player: dict[str, list[int]] = field(default_factory=dict)
    bowling_by_player: dict[str, list[int]] = field(default_factory=dict)

    def reindex(self) -> None:
        self.batting_by_player = {}
        for i, row in enumerate(self.batting):
            self.batting_by_player.setdefault(row.batsman, []).append(i)
        self.bowling_by_player = {}
        for i, row in enumerate(self.bowling):
            self.bowling_by_player.setdefault(row.bowler, []).append(i)

    def players(self) -> list[str]:
        return sorted(set(self.batting_by_player) | set(self.bowling_by_player))

    def teams(self) -> list[str]:
        names = {r.team1 for r in self.batting} | {r.team2 for r in self.batting}
        names |= {r.team1 for r in self.bowling} | {r.team2 for r in self.bowling}
        return sorted(names)

    def players_for_team(self, team: str) -> list[str]:
        names = {r.batsman for r in self.batting if r.team1 == team}
        names |= {r.bowler for r in self.bowling if r.team1 == team}
        return sorted(names)


def build_tables(records: list[MatchRecord], rubric: ScoringRubric) -> PerformanceStore:
    """Aggregate, engineer, and score every match into the two master tables.

    Matches are processed in (date, match_id) order so rebuilding the same
    corpus yields identical tables; double-headers get a sequence number to
    keep row keys unique.
    """
    ordered = sorted(records, key=lambda r: (r.meta.dates[0], r.meta.match_id))
    store = PerformanceStore()
    seen: dict[tuple, int] = {}
    for record in ordered:
        for row in aggregate_batting(record):
            engineer_batting(row, rubric)
            base = (row.batsman, row.date.isoformat(), row.team2, row.format)
            row.seq = seen.get(("bat",) + base, 0)
            seen[("bat",) + base] = row.seq + 1
            store.batting.append(row)
        for row in aggregate_bowling(record):
            engineer_bowling(row, rubric)
            base = (row.bowler, row.date.isoformat(), row.team2, row.format)
            row.seq = seen.get(("bowl",) + base, 0)
            seen[("bowl",) + base] = row.seq + 1
            store.bowling.append(row)
    store.reindex()
    return store


# -- CSV persistence ---------------------------------------------------------

def _num(x: float) -> str:
    return "%g" % x


def save_tables(store: PerformanceStore, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    bat_path = os.path.join(out_dir, "batting.csv")
    bowl_path = os.path.join(out_dir, "bowling.csv")
    with open(bat_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BATTING_HEADER.split(","))
        for r in store.batting:
            out = r.batsman if r.dismissal_kind != NOT_OUT else NOT_OUT
            writer.writerow([
                r.batsman, r.runs, r.balls, r.fours, r.sixes, "%.1f" % r.strike_rate,
                r.dismissed_by_bowler, r.dismissal_kind, out, r.date.isoformat(),
                r.team2, r.winner, r.venue, r.team1, r.format,
                r.fifty_flag, r.hundred_flag, r.duck_flag, _num(r.fantasy_score),
            ])
    with open(bowl_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BOWLING_HEADER.split(","))
        for r in store.bowling:
            writer.writerow([
                r.bowler, r.overs, r.runs_conceded, r.maidens, r.wickets,
                "%.1f" % r.economy_rate, r.date.isoformat(), r.team2, r.winner,
                r.venue, r.team1, r.format, r.four_wicket_flag, r.five_wicket_flag,
                _num(r.fantasy_score),
            ])
    return bat_path, bowl_path


def load_tables(table_dir: str) -> PerformanceStore:
    """Rebuild a PerformanceStore from persisted CSVs. Bowling balls are
    reconstructed as overs*6 (the partial over is not persisted)."""
    store = PerformanceStore()
    seen: dict[tuple, int] = {}
    bat_path = os.path.join(table_dir, "batting.csv")
    with open(bat_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != BATTING_HEADER.split(","):
            raise LengthMismatch(f"{bat_path}: unexpected header")
        for rec in reader:
            row = BattingPerformance(
                batsman=rec["batsman"], runs=int(rec["runs"]), balls=int(rec["balls"]),
                fours=int(rec["4s"]), sixes=int(rec["6s"]), strike_rate=float(rec["SR"]),
                dismissal_kind=rec["kind"], dismissed_by_bowler=rec["bowler"],
                date=dt.date.fromisoformat(rec["date"]), team1=rec["team1"],
                team2=rec["team2"], winner=rec["winner"], venue=rec["venue"],
                format=rec["MF"], fifty_flag=int(rec["50s"]),
                hundred_flag=int(rec["100s"]), duck_flag=int(rec["ducks"]),
                fantasy_score=float(rec["dr11Score"]),
            )
            base = ("bat", row.batsman, rec["date"], row.team2, row.format)
            row.seq = seen.get(base, 0)
            seen[base] = row.seq + 1
            store.batting.append(row)
    bowl_path = os.path.join(table_dir, "bowling.csv")
    with open(bowl_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != BOWLING_HEADER.split(","):
            raise LengthMismatch(f"{bowl_path}: unexpected header")
        for rec in reader:
            overs = int(rec["overs"])
            row = BowlingPerformance(
                bowler=rec["bowler"], overs=overs, balls_bowled=overs * 6,
                runs_conceded=int(rec["runs"]), maidens=int(rec["maidens"]),
                wickets=int(rec["wicket"]), economy_rate=float(rec["econrate"]),
                date=dt.date.fromisoformat(rec["date"]), team1=rec["team1"],
                team2=rec["team2"], winner=rec["winner"], venue=rec["venue"],
                format=rec["MF"], four_wicket_flag=int(rec["4w"]),
                five_wicket_flag=int(rec["5w"]), fantasy_score=float(rec["dr11Score"]),
            )
            base = ("bowl", row.bowler, rec["date"], row.team2, row.format)
            row.seq = seen.get(base, 0)
            seen[base] = row.seq + 1
            store.bowling.append(row)
    store.reindex()
    return store
