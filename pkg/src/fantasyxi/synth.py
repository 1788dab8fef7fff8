"""Seeded synthetic match and performance-row generators.

Used three ways: to vendor realistic ball-by-ball fixture files at desk scale,
to drive conservation property tests over arbitrary corpora, and to produce
large engineered tables whose fantasy scores are the exact rubric function of
their features (the regression suite trains against those).
"""

from __future__ import annotations

import datetime as dt
import math
import os

from . import dataset
from .ingest import Innings, MatchMeta, MatchRecord, RawDelivery
from .rng import Rng
from .rubric import ScoringRubric, default_rubric

INTL_TEAMS = [
    "India", "Australia", "England", "South Africa",
    "New Zealand", "Pakistan", "Sri Lanka", "West Indies",
]
IPL_TEAMS = [
    "Chennai Super Kings", "Mumbai Indians", "Delhi Daredevils",
    "Rajasthan Royals", "Kolkata Knight Riders", "Royal Challengers Bangalore",
    "Kings XI Punjab", "Sunrisers Hyderabad",
]
VENUES = [
    "Eden Gardens", "Wankhede Stadium", "M Chinnaswamy Stadium", "Newlands",
    "Lord's", "The Rose Bowl", "Melbourne Cricket Ground", "Kensington Oval",
    "Sheikh Zayed Stadium", "Kingsmead", "St George's Park", "Adelaide Oval",
    "Brabourne Stadium", "Sawai Mansingh Stadium", "Feroz Shah Kotla",
    "Old Trafford", "Trent Bridge", "Galle International Stadium",
    "Gaddafi Stadium", "Harare Sports Club",
]
_INITIALS = ["A", "B", "C", "D", "G", "H", "J", "K", "L", "M",
             "N", "P", "R", "S", "T", "V", "Y", "Z"]
_SURNAMES = [
    "Sharma", "Patel", "Khan", "Singh", "Kumar", "Reddy", "Smith", "Jones",
    "Taylor", "Brown", "Williams", "Fernando", "Perera", "Ahmed", "Iqbal",
    "Botha", "De Kock", "Mendis", "Silva", "Rahman", "Das", "Chopra",
    "Verma", "Nair", "Joshi", "Gill", "Yadav", "Mishra", "Pandey", "Rathore",
]

MAX_OVERS = {"ODI": 50, "T20": 20, "IPL": 20}


def team_roster(team: str, size: int = 15) -> list[str]:
    """Deterministic roster for a team; names are globally unique."""
    rng = Rng(sum(ord(c) for c in team) * 2654435761)
    tag = "".join(w[0] for w in team.split())
    roster = []
    used = set()
    while len(roster) < size:
        name = f"{rng.choice(_INITIALS)}{rng.choice(_INITIALS).lower()} {rng.choice(_SURNAMES)} ({tag})"
        if name not in used:
            used.add(name)
            roster.append(name)
    return roster


def _skill(name: str) -> float:
    """Stable per-player ability in [0.3, 1.0]."""
    h = 2166136261
    for ch in name:
        h = ((h ^ ord(ch)) * 16777619) & 0xFFFFFFFF
    return 0.3 + (h % 1000) / 1000 * 0.7


def _simulate_innings(rng: Rng, batting_team: str, bowling_team: str,
                      innings_index: int, fmt: str,
                      exact_deliveries: int | None = None) -> Innings:
    batters = team_roster(batting_team)[:11]
    bowlers = team_roster(bowling_team)[4:10]
    deliveries: list[RawDelivery] = []
    striker, non_striker = 0, 1
    next_batter = 2
    wickets = 0
    max_overs = MAX_OVERS[fmt]
    over = 0
    done = False
    while not done:
        bowler = bowlers[over % len(bowlers)]
        ball = 0
        legal = 0
        while legal < 6:
            if exact_deliveries is not None and len(deliveries) >= exact_deliveries:
                done = True
                break
            ball += 1
            batsman = batters[striker]
            skill = _skill(batsman)
            u = rng.next_double()
            runs_b, extras, wicket = 0, None, None
            if u < 0.03:
                extras = {"wides": 1 if rng.next_double() < 0.9 else 5}
            elif u < 0.04:
                extras = {"noballs": 1}
                runs_b = rng.choice([0, 0, 1, 4])
            elif u < 0.055:
                extras = {rng.choice(["byes", "legbyes"]): rng.choice([1, 1, 2, 4])}
            elif u < 0.057:
                extras = {"penalty": 5}
            elif u < 0.057 + 0.046 * (1.2 - skill) and (
                    exact_deliveries is None or wickets < 9):
                kind = rng.choice(["bowled", "caught", "lbw", "run out", "stumped",
                                   "caught", "caught and bowled"])
                fielders = []
                if kind in ("caught", "stumped"):
                    fielders = [rng.choice(team_roster(bowling_team)[:11])]
                out_name = batsman
                if kind == "run out" and rng.next_double() < 0.3:
                    out_name = batters[non_striker]
                    runs_b = 1
                wicket = (kind, out_name, fielders)
            else:
                r = rng.next_double()
                if r < 0.36:
                    runs_b = 0
                elif r < 0.64:
                    runs_b = 1
                elif r < 0.74:
                    runs_b = 2
                elif r < 0.76:
                    runs_b = 3
                elif r < 0.76 + 0.16 * skill:
                    runs_b = 4
                else:
                    runs_b = 6
            extras_total = sum(extras.values()) if extras else 0
            deliveries.append(RawDelivery(
                innings_index=innings_index, over=over, ball_in_over=ball,
                batting_team=batting_team, batsman=batsman,
                non_striker=batters[non_striker], bowler=bowler,
                runs_batsman=runs_b, runs_extras=extras_total,
                runs_total=runs_b + extras_total, extras=extras, wicket=wicket,
            ))
            if not (extras and ("wides" in extras or "noballs" in extras)):
                legal += 1
            if wicket:
                wickets += 1
                out_pos = striker if wicket[1] == batters[striker] else non_striker
                if wickets >= 10 or next_batter >= len(batters):
                    done = True
                    break
                if out_pos == striker:
                    striker = next_batter
                else:
                    non_striker = next_batter
                next_batter += 1
            elif runs_b % 2 == 1:
                striker, non_striker = non_striker, striker
        if done:
            break
        over += 1
        if exact_deliveries is None and over >= max_overs:
            break
        striker, non_striker = non_striker, striker
    return Innings(batting_team=batting_team, deliveries=deliveries)


def synth_match(match_id: str, fmt: str, seed: int, date: dt.date,
                teams: tuple[str, str] | None = None,
                exact_deliveries: int | None = None,
                super_over: bool = False) -> MatchRecord:
    """One internally consistent match. `exact_deliveries` pins the per-innings
    delivery count; `super_over` appends two tiny extra innings."""
    rng = Rng(seed)
    pool = IPL_TEAMS if fmt == "IPL" else INTL_TEAMS
    if teams is None:
        t1 = rng.choice(pool)
        t2 = rng.choice([t for t in pool if t != t1])
        teams = (t1, t2)
    innings = [
        _simulate_innings(rng, teams[0], teams[1], 1, fmt, exact_deliveries),
        _simulate_innings(rng, teams[1], teams[0], 2, fmt, exact_deliveries),
    ]
    if super_over:
        innings.append(_simulate_innings(rng, teams[0], teams[1], 3, "T20",
                                         exact_deliveries=6))
        innings.append(_simulate_innings(rng, teams[1], teams[0], 4, "T20",
                                         exact_deliveries=6))
    total1 = sum(d.runs_total for d in innings[0].deliveries)
    total2 = sum(d.runs_total for d in innings[1].deliveries)
    wkts2 = sum(1 for d in innings[1].deliveries if d.wicket)
    if rng.next_double() < 0.02:
        outcome_winner, outcome_by = None, None
    elif total1 > total2:
        outcome_winner, outcome_by = teams[0], ("runs", total1 - total2)
    elif total2 > total1:
        outcome_winner, outcome_by = teams[1], ("wickets", 10 - wkts2)
    else:
        outcome_winner, outcome_by = None, None
    toss_winner = rng.choice(list(teams))
    best = max(team_roster(teams[0])[:11], key=_skill)
    meta = MatchMeta(
        match_id=match_id, format=fmt, teams=list(teams), dates=[date],
        city=rng.choice(["Mumbai", "Chennai", "London", "Sydney", "Cape Town",
                         "Colombo", "Karachi", "Bridgetown"]),
        venue=rng.choice(VENUES), gender="male",
        toss_winner=toss_winner, toss_decision=rng.choice(["bat", "field"]),
        outcome_winner=outcome_winner, outcome_by=outcome_by,
        player_of_match=[best],
    )
    return MatchRecord(meta=meta, innings=innings)


def synth_corpus(n_matches: int, seed: int,
                 formats: tuple[str, ...] = ("ODI", "T20", "IPL"),
                 start: dt.date = dt.date(2015, 3, 1)) -> list[MatchRecord]:
    rng = Rng(seed)
    records = []
    for i in range(n_matches):
        fmt = formats[i % len(formats)]
        date = start + dt.timedelta(days=i // 2)
        records.append(synth_match(f"synth{seed}_{i:05d}", fmt, rng.next_u64(), date))
    return records


# -- YAML emission (classic layout, bare over.ball keys) ----------------------

def _yaml_scalar(v) -> str:
    s = str(v)
    if any(c in s for c in ":#{}[]&*!|>'\"%@`") or s != s.strip():
        return '"' + s.replace('"', '\\"') + '"'
    return s


def match_to_yaml(match: MatchRecord) -> str:
    meta = match.meta
    lines = ["---", "meta:", "  data_version: 0.9",
             "  created: 2020-01-01", "  revision: 1", "info:"]
    if meta.city:
        lines.append(f"  city: {_yaml_scalar(meta.city)}")
    lines.append("  dates:")
    for d in meta.dates:
        lines.append(f"    - {d.isoformat()}")
    if meta.gender:
        lines.append(f"  gender: {meta.gender}")
    lines.append(f"  match_type: {'T20' if meta.format == 'IPL' else meta.format}")
    if meta.outcome_winner:
        lines.append("  outcome:")
        if meta.outcome_by:
            lines.append("    by:")
            lines.append(f"      {meta.outcome_by[0]}: {meta.outcome_by[1]}")
        lines.append(f"    winner: {_yaml_scalar(meta.outcome_winner)}")
    else:
        lines.append("  outcome:")
        lines.append("    result: no result")
    lines.append(f"  overs: {MAX_OVERS[meta.format]}")
    if meta.player_of_match:
        lines.append("  player_of_match:")
        for p in meta.player_of_match:
            lines.append(f"    - {_yaml_scalar(p)}")
    lines.append("  teams:")
    for t in meta.teams:
        lines.append(f"    - {_yaml_scalar(t)}")
    if meta.toss_winner:
        lines.append("  toss:")
        lines.append(f"    decision: {meta.toss_decision or 'bat'}")
        lines.append(f"    winner: {_yaml_scalar(meta.toss_winner)}")
    if meta.venue:
        lines.append(f"  venue: {_yaml_scalar(meta.venue)}")
    lines.append("innings:")
    ordinal = ["1st", "2nd", "3rd", "4th"]
    for i, inn in enumerate(match.innings):
        lines.append(f"  - {ordinal[i]} innings:")
        lines.append(f"      team: {_yaml_scalar(inn.batting_team)}")
        lines.append("      deliveries:")
        for d in inn.deliveries:
            lines.append(f"        - {d.over}.{d.ball_in_over}:")
            lines.append(f"            batsman: {_yaml_scalar(d.batsman)}")
            lines.append(f"            bowler: {_yaml_scalar(d.bowler)}")
            if d.extras:
                lines.append("            extras:")
                for k in sorted(d.extras):
                    lines.append(f"              {k}: {d.extras[k]}")
            lines.append(f"            non_striker: {_yaml_scalar(d.non_striker)}")
            lines.append("            runs:")
            lines.append(f"              batsman: {d.runs_batsman}")
            lines.append(f"              extras: {d.runs_extras}")
            lines.append(f"              total: {d.runs_total}")
            if d.wicket:
                kind, player_out, fielders = d.wicket
                lines.append("            wicket:")
                if fielders:
                    lines.append("              fielders:")
                    for f in fielders:
                        lines.append(f"                - {_yaml_scalar(f)}")
                lines.append(f"              kind: {kind}")
                lines.append(f"              player_out: {_yaml_scalar(player_out)}")
    return "\n".join(lines) + "\n"


def write_corpus(records: list[MatchRecord], root: str) -> None:
    for record in records:
        sub = os.path.join(root, record.meta.format.lower())
        os.makedirs(sub, exist_ok=True)
        path = os.path.join(sub, f"{record.meta.match_id}.yaml")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(match_to_yaml(record))


# -- direct performance-row generation (regression-suite scale) ---------------

def synth_players(n: int) -> list[str]:
    rng = Rng(777)
    out = []
    used = set()
    while len(out) < n:
        name = f"{rng.choice(_INITIALS)}{rng.choice(_INITIALS).lower()} {rng.choice(_SURNAMES)}"
        if name not in used:
            used.add(name)
            out.append(name)
    return out


def synth_batting_rows(n: int, seed: int, rubric: ScoringRubric | None = None,
                       n_players: int = 150) -> list[dataset.BattingPerformance]:
    """Engineered batting rows whose fantasy_score is exactly the rubric
    function of the row's own features."""
    rubric = rubric or default_rubric()
    rng = Rng(seed)
    players = synth_players(n_players)
    rows = []
    for i in range(n):
        player = players[rng.randbelow(n_players)]
        skill = _skill(player)
        fmt = rng.choice(["T20", "IPL", "ODI"])
        t1 = rng.choice(INTL_TEAMS if fmt == "ODI" else IPL_TEAMS)
        t2 = rng.choice([t for t in (INTL_TEAMS if fmt == "ODI" else IPL_TEAMS)
                         if t != t1])
        cap = 150 if fmt == "ODI" else 110
        # right-skewed like real innings: exponential with skill-scaled mean
        u = max(rng.next_double(), 1e-12)
        runs = min(cap, int(-20.0 * (0.5 + skill) * math.log(u)))
        sr_target = 40 + rng.next_double() * (90 + 90 * skill)
        balls = max(1, int(round(runs * 100 / sr_target))) if runs else rng.randint(1, 12)
        fours = rng.randbelow(runs // 4 + 1)
        sixes = rng.randbelow(max(0, (runs - fours * 4)) // 6 + 1)
        dismissed = rng.next_double() < 0.72
        kind = rng.choice(["bowled", "caught", "lbw", "run out", "stumped"]) \
            if dismissed else dataset.NOT_OUT
        row = dataset.BattingPerformance(
            batsman=player, runs=runs, balls=balls, fours=fours, sixes=sixes,
            strike_rate=float(round(runs / balls * 100)) if balls else 0.0,
            dismissal_kind=kind,
            dismissed_by_bowler="Anon Bowler" if dismissed else dataset.NOT_OUT,
            date=dt.date(2016, 1, 1) + dt.timedelta(days=i % 1400),
            team1=t1, team2=t2,
            winner=rng.choice([t1, t2, dataset.NO_RESULT]),
            venue=rng.choice(VENUES), format=fmt, match_id=f"row{i}",
        )
        rows.append(dataset.engineer_batting(row, rubric))
    return rows


def synth_bowling_rows(n: int, seed: int, rubric: ScoringRubric | None = None,
                       n_players: int = 120) -> list[dataset.BowlingPerformance]:
    rubric = rubric or default_rubric()
    rng = Rng(seed)
    players = synth_players(n_players)
    rows = []
    for i in range(n):
        player = players[rng.randbelow(n_players)]
        skill = _skill(player)
        fmt = rng.choice(["T20", "IPL", "ODI"])
        t1 = rng.choice(INTL_TEAMS if fmt == "ODI" else IPL_TEAMS)
        t2 = rng.choice([t for t in (INTL_TEAMS if fmt == "ODI" else IPL_TEAMS)
                         if t != t1])
        max_balls = 60 if fmt == "ODI" else 24
        balls = rng.randint(6, max_balls)
        overs = balls // 6
        econ = max(0.8, rng.gauss_like(1.5, 12.5) - 2.5 * skill)
        conceded = max(0, int(round(econ * balls / 6)))
        wickets = min(6, int(rng.next_double() ** 3 * 7 * (0.5 + skill)))
        maidens = rng.randbelow(2) if conceded < overs * 2 and overs >= 2 else 0
        row = dataset.BowlingPerformance(
            bowler=player, overs=overs, balls_bowled=balls,
            runs_conceded=conceded, maidens=maidens, wickets=wickets,
            economy_rate=float(round(conceded / (balls / 6))),
            date=dt.date(2016, 1, 1) + dt.timedelta(days=i % 1400),
            team1=t1, team2=t2,
            winner=rng.choice([t1, t2, dataset.NO_RESULT]),
            venue=rng.choice(VENUES), format=fmt, match_id=f"row{i}",
        )
        rows.append(dataset.engineer_bowling(row, rubric))
    return rows
