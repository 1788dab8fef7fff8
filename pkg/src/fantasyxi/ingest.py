"""Parse ball-by-ball cricket match files into normalized records.

Accepts the classic cricsheet YAML layout: an ``info`` block plus ``innings``
as a list of single-key maps ("1st innings", ...) whose ``deliveries`` are
single-key maps keyed by "over.ball" strings. Ball keys are decoded from the
raw text, never via YAML number resolution, so "0.10" (ball 10 of over 0)
stays distinct from "0.1".
"""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass, field

import yaml

from .errors import InvariantViolation, MalformedDocument, MissingSection, RootNotFound

SCHEMA_VERSION = 1

FORMATS = ("ODI", "T20", "IPL")

KNOWN_EXTRAS = ("wides", "noballs", "byes", "legbyes", "penalty")

# Dismissals not credited to the bowler (dataset module relies on this).
NON_BOWLER_DISMISSALS = frozenset({
    "run out",
    "retired hurt",
    "retired out",
    "retired not out",
    "obstructing the field",
    "handled the ball",
    "timed out",
    "hit the ball twice",
})


class _StringLoader(yaml.SafeLoader):
    """SafeLoader without number/bool/date resolution: every scalar stays a
    string so over.ball keys and ISO dates survive verbatim."""


for ch, resolvers in list(_StringLoader.yaml_implicit_resolvers.items()):
    kept = [
        (tag, regexp)
        for tag, regexp in resolvers
        if tag
        not in (
            "tag:yaml.org,2002:int",
            "tag:yaml.org,2002:float",
            "tag:yaml.org,2002:bool",
            "tag:yaml.org,2002:timestamp",
        )
    ]
    if kept:
        _StringLoader.yaml_implicit_resolvers[ch] = kept
    else:
        del _StringLoader.yaml_implicit_resolvers[ch]


# -- domain types ------------------------------------------------------------

@dataclass
class MatchMeta:
    match_id: str
    format: str
    teams: list[str]
    dates: list[dt.date]
    city: str | None = None
    venue: str | None = None
    gender: str | None = None
    toss_winner: str | None = None
    toss_decision: str | None = None
    outcome_winner: str | None = None
    outcome_by: tuple[str, int] | None = None
    player_of_match: list[str] | None = None


@dataclass
class RawDelivery:
    innings_index: int
    over: int
    ball_in_over: int
    batting_team: str
    batsman: str
    non_striker: str
    bowler: str
    runs_batsman: int
    runs_extras: int
    runs_total: int
    extras: dict[str, int] | None = None
    wicket: tuple[str, str, list[str]] | None = None  # (kind, player_out, fielders)


@dataclass
class Innings:
    batting_team: str
    deliveries: list[RawDelivery]


@dataclass
class MatchRecord:
    meta: MatchMeta
    innings: list[Innings]


@dataclass
class CorpusEntry:
    match_id: str
    format: str
    teams: list[str]
    date: dt.date
    path: str


@dataclass
class CorpusIndex:
    entries: list[CorpusEntry] = field(default_factory=list)
    counts_by_format: dict[str, int] = field(default_factory=lambda: {f: 0 for f in FORMATS})
    failures: list[tuple[str, str]] = field(default_factory=list)


# -- scalar coercion helpers -------------------------------------------------

def _as_int(value, path: str) -> int:
    try:
        return int(str(value))
    except (TypeError, ValueError):
        raise InvariantViolation(f"{path}: expected integer, got {value!r}") from None


def _as_date(value, path: str) -> dt.date:
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise InvariantViolation(f"{path}: expected ISO date, got {value!r}") from None


def _decode_ball_key(key: str, path: str) -> tuple[int, int]:
    parts = str(key).split(".")
    if len(parts) != 2:
        raise InvariantViolation(f"{path}: malformed ball key {key!r}")
    over = _as_int(parts[0], path)
    ball = _as_int(parts[1], path)
    if over < 0 or ball < 1:
        raise InvariantViolation(f"{path}: ball key {key!r} out of range")
    return over, ball


# -- parsing -----------------------------------------------------------------

def parse_match_file(data: bytes | str, format_hint: str | None = None,
                     match_id: str = "unnamed") -> MatchRecord:
    """Parse one match document into a MatchRecord.

    `format_hint` (odi|t20|ipl) overrides the document's own match_type;
    league files carry the generic T20 label, so the caller must supply the
    hint for those.
    """
    try:
        doc = yaml.load(data, Loader=_StringLoader)
    except yaml.YAMLError as exc:
        raise MalformedDocument(f"{match_id}: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{match_id}: document is not a mapping")
    if "info" not in doc or not isinstance(doc["info"], dict):
        raise MissingSection(f"{match_id}: info")
    meta = _parse_info(doc["info"], match_id, format_hint)
    raw_innings = doc.get("innings")
    if not raw_innings or not isinstance(raw_innings, list):
        raise MissingSection(f"{match_id}: innings")
    innings = []
    for pos, item in enumerate(raw_innings):
        innings.append(_parse_innings(item, pos + 1, meta))
    if not any(inn.deliveries for inn in innings):
        raise MissingSection(f"{match_id}: innings[*].deliveries")
    return MatchRecord(meta=meta, innings=innings)


def _parse_info(info: dict, match_id: str, format_hint: str | None) -> MatchMeta:
    if format_hint:
        fmt = format_hint.upper()
    else:
        raw = info.get("match_type")
        if raw is None:
            raise MissingSection(f"{match_id}: info.match_type")
        fmt = {"ODI": "ODI", "ODM": "ODI", "T20": "T20", "IT20": "T20",
               "IPL": "IPL"}.get(str(raw).upper())
        if fmt is None:
            raise InvariantViolation(f"{match_id}: info.match_type unsupported: {raw!r}")
    if fmt not in FORMATS:
        raise InvariantViolation(f"{match_id}: format {fmt!r} not one of {FORMATS}")

    teams = info.get("teams")
    if not isinstance(teams, list) or len(teams) != 2 or teams[0] == teams[1]:
        raise InvariantViolation(f"{match_id}: info.teams must be 2 distinct names")
    teams = [str(t) for t in teams]

    raw_dates = info.get("dates")
    if not raw_dates:
        raise MissingSection(f"{match_id}: info.dates")
    dates = [_as_date(d, f"{match_id}: info.dates") for d in raw_dates]

    toss = info.get("toss") or {}
    toss_decision = toss.get("decision")
    if toss_decision is not None and toss_decision not in ("bat", "field"):
        toss_decision = None

    outcome = info.get("outcome") or {}
    winner = outcome.get("winner")
    outcome_by = None
    by = outcome.get("by")
    if isinstance(by, dict):
        for kind in ("runs", "wickets"):
            if kind in by:
                margin = _as_int(by[kind], f"{match_id}: info.outcome.by.{kind}")
                if margin < 0:
                    raise InvariantViolation(f"{match_id}: info.outcome.by negative margin")
                outcome_by = (kind, margin)
                break
    if winner is not None and str(winner) not in teams:
        raise InvariantViolation(f"{match_id}: info.outcome.winner not in teams")

    pom = info.get("player_of_match")
    return MatchMeta(
        match_id=match_id,
        format=fmt,
        teams=teams,
        dates=dates,
        city=_opt_str(info.get("city")),
        venue=_opt_str(info.get("venue")),
        gender=_opt_str(info.get("gender")),
        toss_winner=_opt_str(toss.get("winner")),
        toss_decision=toss_decision,
        outcome_winner=_opt_str(winner),
        outcome_by=outcome_by,
        player_of_match=[str(p) for p in pom] if pom else None,
    )


def _opt_str(value) -> str | None:
    return None if value is None else str(value)


def _parse_innings(item, innings_index: int, meta: MatchMeta) -> Innings:
    path = f"{meta.match_id}: innings[{innings_index}]"
    if not isinstance(item, dict):
        raise MissingSection(path)
    if "team" in item or "deliveries" in item:
        body = item
    else:
        if len(item) != 1:
            raise MissingSection(f"{path}: expected single-key innings map")
        body = next(iter(item.values()))
    if not isinstance(body, dict) or "team" not in body:
        raise MissingSection(f"{path}.team")
    team = str(body["team"])
    if team not in meta.teams:
        raise InvariantViolation(f"{path}.team: {team!r} not in {meta.teams}")

    raw = body.get("deliveries")
    if raw is None:
        raise MissingSection(f"{path}.deliveries")
    if isinstance(raw, dict):
        items = list(raw.items())
    else:
        items = []
        for entry in raw:
            if not isinstance(entry, dict) or len(entry) != 1:
                raise MissingSection(f"{path}.deliveries: entry is not a single-key map")
            items.extend(entry.items())

    deliveries = []
    for key, fieldmap in items:
        over, ball = _decode_ball_key(key, f"{path}.deliveries")
        deliveries.append(_parse_delivery(fieldmap, innings_index, over, ball, team,
                                          f"{path}.deliveries[{key}]"))
    deliveries.sort(key=lambda d: (d.over, d.ball_in_over))
    return Innings(batting_team=team, deliveries=deliveries)


def _parse_delivery(fieldmap, innings_index: int, over: int, ball: int,
                    team: str, path: str) -> RawDelivery:
    if not isinstance(fieldmap, dict):
        raise MissingSection(path)
    runs = fieldmap.get("runs")
    if not isinstance(runs, dict):
        raise MissingSection(f"{path}.runs")
    runs_batsman = _as_int(runs.get("batsman", 0), f"{path}.runs.batsman")
    runs_extras = _as_int(runs.get("extras", 0), f"{path}.runs.extras")
    runs_total = _as_int(runs.get("total", 0), f"{path}.runs.total")
    if runs_total != runs_batsman + runs_extras:
        raise InvariantViolation(
            f"{path}.runs: total {runs_total} != batsman {runs_batsman} + extras {runs_extras}")

    extras = None
    raw_extras = fieldmap.get("extras")
    if isinstance(raw_extras, dict) and raw_extras:
        extras = {str(k): _as_int(v, f"{path}.extras.{k}") for k, v in raw_extras.items()}
        if sum(extras.values()) != runs_extras:
            raise InvariantViolation(
                f"{path}.extras: amounts sum to {sum(extras.values())}, "
                f"runs.extras is {runs_extras}")

    wicket = None
    raw_wicket = fieldmap.get("wicket")
    if isinstance(raw_wicket, list) and raw_wicket:
        raw_wicket = raw_wicket[0]
    if isinstance(raw_wicket, dict):
        fielders = [
            str(f.get("name") if isinstance(f, dict) else f)
            for f in raw_wicket.get("fielders") or []
        ]
        wicket = (str(raw_wicket.get("kind", "unknown")),
                  str(raw_wicket.get("player_out", "")), fielders)

    return RawDelivery(
        innings_index=innings_index,
        over=over,
        ball_in_over=ball,
        batting_team=team,
        batsman=str(fieldmap.get("batsman", "")),
        non_striker=str(fieldmap.get("non_striker", "")),
        bowler=str(fieldmap.get("bowler", "")),
        runs_batsman=runs_batsman,
        runs_extras=runs_extras,
        runs_total=runs_total,
        extras=extras,
        wicket=wicket,
    )


def flatten_deliveries(match: MatchRecord) -> list[RawDelivery]:
    """All innings concatenated, preserving (innings, over, ball) order."""
    out = []
    for inn in match.innings:
        out.extend(inn.deliveries)
    return out


# -- corpus scanning ---------------------------------------------------------

def scan_corpus(root: str, only_format: str | None = None) -> CorpusIndex:
    """Index every parseable file under <root>/{odi,ipl,t20}/*.yaml.

    Files that fail to parse are collected in `index.failures`, never fatal.
    With `only_format`, files directly under root are also accepted as that
    format.
    """
    if not os.path.isdir(root):
        raise RootNotFound(root)
    index = CorpusIndex()
    wanted = [only_format.lower()] if only_format else ["odi", "ipl", "t20"]
    seen_dirs = []
    for fmt in wanted:
        sub = os.path.join(root, fmt)
        if os.path.isdir(sub):
            seen_dirs.append((fmt, sub))
    if only_format and not seen_dirs:
        seen_dirs.append((only_format.lower(), root))
    for fmt, directory in seen_dirs:
        for name in sorted(os.listdir(directory)):
            if not name.endswith((".yaml", ".yml")):
                continue
            path = os.path.join(directory, name)
            stem = name.rsplit(".", 1)[0]
            try:
                with open(path, "rb") as fh:
                    record = parse_match_file(fh.read(), format_hint=fmt, match_id=stem)
            except Exception as exc:
                index.failures.append((path, str(exc)))
                continue
            index.entries.append(CorpusEntry(
                match_id=stem,
                format=record.meta.format,
                teams=record.meta.teams,
                date=record.meta.dates[0],
                path=path,
            ))
            index.counts_by_format[record.meta.format] += 1
    return index


# -- normalized cache --------------------------------------------------------

def record_to_dict(match: MatchRecord) -> dict:
    meta = match.meta
    return {
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "match_id": meta.match_id,
            "format": meta.format,
            "teams": meta.teams,
            "dates": [d.isoformat() for d in meta.dates],
            "city": meta.city,
            "venue": meta.venue,
            "gender": meta.gender,
            "toss_winner": meta.toss_winner,
            "toss_decision": meta.toss_decision,
            "outcome_winner": meta.outcome_winner,
            "outcome_by": (
                {"kind": meta.outcome_by[0], "margin": meta.outcome_by[1]}
                if meta.outcome_by else None
            ),
            "player_of_match": meta.player_of_match,
        },
        "innings": [
            {
                "batting_team": inn.batting_team,
                "deliveries": [
                    {
                        "innings_index": d.innings_index,
                        "over": d.over,
                        "ball_in_over": d.ball_in_over,
                        "batting_team": d.batting_team,
                        "batsman": d.batsman,
                        "non_striker": d.non_striker,
                        "bowler": d.bowler,
                        "runs_batsman": d.runs_batsman,
                        "runs_extras": d.runs_extras,
                        "runs_total": d.runs_total,
                        "extras": d.extras,
                        "wicket": (
                            {"kind": d.wicket[0], "player_out": d.wicket[1],
                             "fielders": d.wicket[2]}
                            if d.wicket else None
                        ),
                    }
                    for d in inn.deliveries
                ],
            }
            for inn in match.innings
        ],
    }


def record_from_dict(doc: dict) -> MatchRecord:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise MalformedDocument(f"cache schema_version {version} != {SCHEMA_VERSION}")
    m = doc["meta"]
    meta = MatchMeta(
        match_id=m["match_id"],
        format=m["format"],
        teams=list(m["teams"]),
        dates=[dt.date.fromisoformat(d) for d in m["dates"]],
        city=m.get("city"),
        venue=m.get("venue"),
        gender=m.get("gender"),
        toss_winner=m.get("toss_winner"),
        toss_decision=m.get("toss_decision"),
        outcome_winner=m.get("outcome_winner"),
        outcome_by=(
            (m["outcome_by"]["kind"], m["outcome_by"]["margin"])
            if m.get("outcome_by") else None
        ),
        player_of_match=m.get("player_of_match"),
    )
    innings = []
    for inn in doc["innings"]:
        deliveries = [
            RawDelivery(
                innings_index=d["innings_index"],
                over=d["over"],
                ball_in_over=d["ball_in_over"],
                batting_team=d["batting_team"],
                batsman=d["batsman"],
                non_striker=d["non_striker"],
                bowler=d["bowler"],
                runs_batsman=d["runs_batsman"],
                runs_extras=d["runs_extras"],
                runs_total=d["runs_total"],
                extras=d.get("extras"),
                wicket=(
                    (d["wicket"]["kind"], d["wicket"]["player_out"],
                     list(d["wicket"]["fielders"]))
                    if d.get("wicket") else None
                ),
            )
            for d in inn["deliveries"]
        ]
        innings.append(Innings(batting_team=inn["batting_team"], deliveries=deliveries))
    return MatchRecord(meta=meta, innings=innings)


def save_record(match: MatchRecord, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"{match.meta.match_id}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record_to_dict(match), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    return path


def load_record(path: str) -> MatchRecord:
    with open(path, encoding="utf-8") as fh:
        return record_from_dict(json.load(fh))


def load_cache(cache_dir: str) -> list[MatchRecord]:
    """Every cached match, ordered by (first date, match_id) for determinism."""
    records = []
    for name in sorted(os.listdir(cache_dir)):
        if name.endswith(".json"):
            records.append(load_record(os.path.join(cache_dir, name)))
    records.sort(key=lambda r: (r.meta.dates[0], r.meta.match_id))
    return records
