"""Shared pipeline core plus the HTTP JSON service.

The CLI and the HTTP handlers both call the payload builders here and both
serialize with `canonical_json`, so the two surfaces return byte-identical
responses for identical inputs. Loaded artifacts are an immutable snapshot;
handlers never mutate them.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlparse

from . import insights as insights_mod
from . import optimizer, predictor
from .config import EngineConfig
from .dataset import PerformanceStore, load_tables
from .errors import ArtifactsMissing, FantasyXIError
from .learner import Forest, load_model


def canonical_json(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, separators=(",", ":"))
            + "\n").encode("utf-8")


def ok(data) -> dict:
    return {"ok": True, "data": data}


def fail(exc: Exception) -> dict:
    return {"ok": False,
            "error": {"type": type(exc).__name__, "message": str(exc)}}


@dataclass
class JobReport:
    stage: str
    started: float
    finished: float = 0.0
    counts: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def close(self) -> "JobReport":
        self.finished = max(time.time(), self.started)
        return self

    def emit(self) -> None:
        print(json.dumps({
            "stage": self.stage, "started": self.started,
            "finished": self.finished, "counts": self.counts,
            "warnings": self.warnings,
        }, sort_keys=True), file=sys.stderr)


def tables_hash(table_dir: str) -> str:
    digest = hashlib.sha256()
    for name in ("batting.csv", "bowling.csv"):
        with open(os.path.join(table_dir, name), "rb") as fh:
            digest.update(fh.read())
    return digest.hexdigest()


@dataclass
class ServiceState:
    store: PerformanceStore
    batting_model: Forest | None
    bowling_model: Forest | None
    config: EngineConfig
    tables_digest: str = ""


_state_cache: dict[tuple, ServiceState] = {}


def load_state(table_dir: str, batting_model_path: str | None,
               bowling_model_path: str | None,
               config: EngineConfig | None = None) -> ServiceState:
    """Load tables and models once per (paths, mtimes); verify that each
    model was trained against these exact tables."""
    config = config or EngineConfig()
    for path in (table_dir,):
        if not os.path.isdir(path):
            raise ArtifactsMissing(f"table directory not found: {path}")
    for path in (batting_model_path, bowling_model_path):
        if path and not os.path.isfile(path):
            raise ArtifactsMissing(f"model file not found: {path}")
    key = tuple(
        (p, os.path.getmtime(p) if p and os.path.exists(p) else 0)
        for p in (os.path.join(table_dir, "batting.csv"),
                  os.path.join(table_dir, "bowling.csv"),
                  batting_model_path, bowling_model_path)
    )
    if key in _state_cache:
        return _state_cache[key]
    for name in ("batting.csv", "bowling.csv"):
        if not os.path.isfile(os.path.join(table_dir, name)):
            raise ArtifactsMissing(f"missing table file: {name} in {table_dir}")
    store = load_tables(table_dir)
    digest = tables_hash(table_dir)
    batting_model = load_model(batting_model_path) if batting_model_path else None
    bowling_model = load_model(bowling_model_path) if bowling_model_path else None
    for model, label in ((batting_model, "batting"), (bowling_model, "bowling")):
        if model and model.tables_hash and model.tables_hash != digest:
            raise ArtifactsMissing(
                f"{label} model was trained on different tables "
                f"(hash {model.tables_hash[:12]} != {digest[:12]})")
    state = ServiceState(store=store, batting_model=batting_model,
                         bowling_model=bowling_model, config=config,
                         tables_digest=digest)
    _state_cache[key] = state
    return state


# -- payload builders ----------------------------------------------------------

def payload_health(state: ServiceState) -> dict:
    return ok({
        "players": len(state.store.players()),
        "batting_rows": len(state.store.batting),
        "bowling_rows": len(state.store.bowling),
        "tables_digest": state.tables_digest,
        "batting_model": bool(state.batting_model),
        "bowling_model": bool(state.bowling_model),
    })


def payload_teams(state: ServiceState) -> dict:
    return ok({"teams": state.store.teams()})


def payload_players(state: ServiceState, team: str | None) -> dict:
    store = state.store
    players = store.players_for_team(team) if team else store.players()
    return ok({"team": team, "players": players})


def payload_player_insights(state: ServiceState, player: str) -> dict:
    series = insights_mod.player_insights(state.store, player)
    return ok({"scope": player, "series": [s.to_dict() for s in series]})


def payload_team_insights(state: ServiceState, team: str) -> dict:
    series = insights_mod.team_insights(state.store, team)
    return ok({"scope": team, "series": [s.to_dict() for s in series]})


def payload_project(state: ServiceState, body: dict) -> dict:
    query = predictor.PredictionQuery(
        player=body.get("player", ""),
        format=body.get("format", ""),
        team1=body.get("team1", ""),
        team2=body.get("team2", ""),
        venue=body.get("venue", ""),
    )
    projection = predictor.project(
        state.store, state.batting_model, state.bowling_model, query,
        k_min=int(body.get("k_min", state.config.k_min)),
        relaxation_order=tuple(state.config.relaxation_order),
    )
    return ok(projection.to_dict())


def _league_anchors(state: ServiceState, players: list[str]) -> tuple[float, float]:
    """Trailing moving-average anchors over the given players' histories."""
    averages = []
    for name in players:
        series = _score_series(state.store, name)
        if series:
            from .dataset import moving_average
            averages.append(moving_average(series, 5)[-1])
    if not averages:
        return 0.0, 0.0
    return min(averages), max(averages)


def _score_series(store: PerformanceStore, player: str) -> list[float]:
    per_match: dict[tuple, float] = {}
    for i in store.batting_by_player.get(player, []):
        r = store.batting[i]
        key = (r.date.isoformat(), r.team2, r.format, r.seq)
        per_match[key] = per_match.get(key, 0.0) + r.fantasy_score
    for i in store.bowling_by_player.get(player, []):
        r = store.bowling[i]
        key = (r.date.isoformat(), r.team2, r.format, r.seq)
        per_match[key] = per_match.get(key, 0.0) + r.fantasy_score
    return [v for _, v in sorted(per_match.items())]


def build_cards(state: ServiceState, fixture: dict,
                squads: list[list[str]]) -> tuple[list[optimizer.PlayerCard], list[str]]:
    """Cards for a fixture: projected points from the models, credits from the
    clearly-labeled moving-average fallback."""
    result = predictor.project_fixture(
        state.store, state.batting_model, state.bowling_model,
        fixture["team1"], fixture["team2"], fixture["format"], fixture["venue"],
        (list(squads[0]), list(squads[1])),
        k_min=state.config.k_min,
        relaxation_order=tuple(state.config.relaxation_order),
    )
    lo, hi = _league_anchors(state, squads[0] + squads[1])
    by_player = {p.player: p for p in result.projections}
    cards = []
    for side, squad in enumerate(squads):
        for name in squad:
            if name not in by_player:
                continue
            series = _score_series(state.store, name)
            cards.append(optimizer.PlayerCard(
                player=name,
                team_index=side,
                credit=optimizer.estimate_credits(series, lo, hi),
                projected_points=by_player[name].total_points,
            ))
    return cards, result.cold_start


def payload_recommend(state: ServiceState, body: dict) -> dict:
    constraints = optimizer.RosterConstraints(
        roster_size=int(body.get("constraints", {}).get(
            "roster_size", state.config.roster_size)),
        budget=float(body.get("constraints", {}).get(
            "budget", state.config.budget)),
        max_per_team=int(body.get("constraints", {}).get(
            "max_per_team", state.config.max_per_team)),
    )
    cold: list[str] = []
    if body.get("cards"):
        team_names: list[str] = []
        cards = []
        for entry in body["cards"]:
            team = entry["team"]
            if team not in team_names:
                team_names.append(team)
            points = entry.get("points")
            cards.append(optimizer.PlayerCard(
                player=entry["player"],
                team_index=team_names.index(team),
                credit=float(entry["credit"]),
                projected_points=float(points) if points is not None else math.nan,
                locked=bool(entry.get("locked", False)),
                excluded=bool(entry.get("excluded", False)),
            ))
        cards, more_cold = fill_missing_points(state, cards, team_names,
                                               body.get("fixture"))
        cold.extend(more_cold)
    else:
        fixture = body["fixture"]
        squads = body["squads"]
        cards, cold = build_cards(state, fixture, squads)
    for name in body.get("locks", []):
        for c in cards:
            if c.player == name:
                c.locked = True
    for name in body.get("excludes", []):
        for c in cards:
            if c.player == name:
                c.excluded = True
                c.locked = False
    method = body.get("method", "exact")
    if method == "greedy":
        rec = optimizer.recommend_greedy(cards, constraints)
    else:
        rec = optimizer.recommend_exact(cards, constraints)
    return ok({"recommendation": rec.to_dict(),
               "cards": cards_to_dicts(cards),
               "cold_start": sorted(cold)})


def cards_to_dicts(cards: list[optimizer.PlayerCard]) -> list[dict]:
    """The resolved card list echoed to clients so they can mirror it."""
    return [
        {"player": c.player, "team_index": c.team_index, "credit": c.credit,
         "projected_points": c.projected_points, "locked": c.locked,
         "excluded": c.excluded}
        for c in cards
    ]


def fill_missing_points(state: ServiceState, cards: list[optimizer.PlayerCard],
                        team_names: list[str], fixture: dict | None):
    """Project points for cards whose points column was blank (NaN)."""
    cold = []
    missing = [c for c in cards if c.projected_points != c.projected_points]
    if not missing:
        return cards, cold
    if not fixture:
        raise ArtifactsMissing(
            "cards lack points and no fixture was given to project them")
    kept = []
    for c in cards:
        if c.projected_points == c.projected_points:
            kept.append(c)
            continue
        own = team_names[c.team_index]
        rival = team_names[1 - c.team_index]
        query = predictor.PredictionQuery(
            player=c.player, format=fixture["format"], team1=own, team2=rival,
            venue=fixture["venue"])
        try:
            projection = predictor.project(
                state.store, state.batting_model, state.bowling_model, query,
                k_min=state.config.k_min,
                relaxation_order=tuple(state.config.relaxation_order))
        except FantasyXIError:
            cold.append(c.player)
            continue
        c.projected_points = projection.total_points
        kept.append(c)
    return kept, cold


# -- HTTP layer ------------------------------------------------------------------

class _Handler(BaseHTTPRequestHandler):
    server_version = "fantasyxi"

    def log_message(self, fmt, *args):
        pass

    @property
    def state(self) -> ServiceState:
        return self.server.state  # type: ignore[attr-defined]

    def _send(self, status: int, payload: dict) -> None:
        body = canonical_json(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _dispatch(self, fn, *args) -> None:
        try:
            self._send(200, fn(*args))
        except FantasyXIError as exc:
            self._send(422, fail(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._send(500, fail(exc))

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        url = urlparse(self.path)
        parts = [unquote(p) for p in url.path.split("/") if p]
        query = parse_qs(url.query)
        if parts == ["health"]:
            self._dispatch(payload_health, self.state)
        elif parts == ["teams"]:
            self._dispatch(payload_teams, self.state)
        elif parts == ["players"]:
            team = query.get("team", [None])[0]
            self._dispatch(payload_players, self.state, team)
        elif len(parts) == 3 and parts[0] == "insights" and parts[1] == "player":
            self._dispatch(payload_player_insights, self.state, parts[2])
        elif len(parts) == 3 and parts[0] == "insights" and parts[1] == "team":
            self._dispatch(payload_team_insights, self.state, parts[2])
        else:
            self._send(404, fail(FantasyXIError(f"no such endpoint: {url.path}")))

    def do_POST(self):
        url = urlparse(self.path)
        parts = [unquote(p) for p in url.path.split("/") if p]
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError) as exc:
            self._send(400, fail(exc))
            return
        if parts == ["project"]:
            self._dispatch(payload_project, self.state, body)
        elif parts == ["recommend"]:
            self._dispatch(payload_recommend, self.state, body)
        else:
            self._send(404, fail(FantasyXIError(f"no such endpoint: {url.path}")))


def make_server(state: ServiceState, port: int) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
    server.state = state  # type: ignore[attr-defined]
    return server


def serve_http(state: ServiceState, port: int) -> None:
    server = make_server(state, port)
    print(f"fantasyxi service on http://127.0.0.1:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
