"""Acceptance suite: one test per release criterion, each printing a
PASS line with the measured numbers once its assertions hold.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they pass.
"""

import datetime as dt
import json
import os
import threading
import time
import urllib.request

import numpy as np
import pytest

from fantasyxi import service
from fantasyxi.config import EngineConfig
from fantasyxi.dataset import (
    aggregate_batting,
    aggregate_bowling,
    build_tables,
    engineer_batting,
    engineer_bowling,
)
from fantasyxi.errors import Infeasible
from fantasyxi.ingest import (
    NON_BOWLER_DISMISSALS,
    flatten_deliveries,
    parse_match_file,
)
from fantasyxi.learner import (
    ForestConfig,
    codebook_from_store,
    encode_batting,
    encode_bowling,
    encode_store,
    evaluate,
    fit_codebook,
    load_model,
    predict_matrix,
    save_model,
    train_forest,
    train_test_split,
)
from fantasyxi.optimizer import (
    RosterConstraints,
    brute_force,
    recommend_exact,
    recommend_greedy,
)
from fantasyxi.rng import Rng
from fantasyxi.rubric import default_rubric
from fantasyxi.service import canonical_json, load_state, make_server
from fantasyxi.synth import synth_batting_rows, synth_bowling_rows, synth_corpus

from conftest import all_fixture_paths, parse_fixture
from instance_utils import check_recommendation, random_instance
from test_dataset import BATTING_CASES, BOWLING_CASES, bat_row, bowl_row, delivery, make_match
from test_ingest import text_scan_delivery_count


def report(line: str) -> None:
    print(f"\nACCEPTANCE PASS: {line}")


def test_criterion_parser_fidelity():
    start = time.perf_counter()
    record = parse_fixture("t20", "211028.yaml")
    meta = record.meta
    assert meta.city == "Southampton"
    assert meta.format == "T20"
    assert meta.teams == ["England", "Australia"]
    assert meta.outcome_winner == "England"
    assert meta.outcome_by == ("runs", 100)
    assert meta.player_of_match == ["KP Pietersen"]

    per_file = []
    for fmt, path in all_fixture_paths():
        t0 = time.perf_counter()
        with open(path, "rb") as fh:
            parsed = parse_match_file(fh.read(), format_hint=fmt)
        per_file.append(time.perf_counter() - t0)
        assert len(flatten_deliveries(parsed)) == text_scan_delivery_count(path)

    two_innings = parse_fixture("odi", "647123.yaml")
    assert [len(i.deliveries) for i in two_innings.innings] == [305, 305]
    assert len(flatten_deliveries(two_innings)) == 610

    assert max(per_file) < 1.0
    report(f"parser fidelity: meta exact, 6 fixture text-scan counts match, "
           f"305+305 -> 610, max parse {max(per_file)*1000:.0f} ms "
           f"(suite {time.perf_counter()-start:.2f}s)")


def test_criterion_aggregation_fidelity(rubric):
    runs_seq = [0, 1, 0, 4, 0, 0, 1, 0, 6, 0, 1, 0, 0, 4, 0, 1, 0, 0, 1, 0, 1,
                0, 2, 1, 1]
    ds = [delivery(over=i // 6, ball=i % 6 + 1, runs=r)
          for i, r in enumerate(runs_seq)]
    row = aggregate_batting(make_match(ds))[0]
    assert (row.runs, row.balls, row.fours, row.sixes) == (24, 25, 2, 1)
    assert row.strike_rate == 96.0

    ds = []
    for over, total in enumerate([12, 10, 11, 11]):
        for ball, r in enumerate([total - 10, 4, 6, 0, 0, 0], start=1):
            ds.append(delivery(over=over, ball=ball, runs=r))
    brow = aggregate_bowling(make_match(ds))[0]
    assert (brow.overs, brow.runs_conceded) == (4, 44)
    assert brow.economy_rate == 11.0

    records = [parse_fixture(fmt, os.path.basename(path))
               for fmt, path in all_fixture_paths()]
    records += synth_corpus(100, seed=91)
    for record in records:
        runs_oracle = sum(d.runs_batsman for inn in record.innings
                          for d in inn.deliveries if d.innings_index <= 2)
        wkts_oracle = sum(1 for inn in record.innings for d in inn.deliveries
                          if d.innings_index <= 2 and d.wicket
                          and d.wicket[0] not in NON_BOWLER_DISMISSALS)
        assert sum(r.runs for r in aggregate_batting(record)) == runs_oracle
        assert sum(r.wickets for r in aggregate_bowling(record)) == wkts_oracle
    report(f"aggregation fidelity: SR 96.0 / econ 11.0 reproduced; "
           f"runs+wickets conserved on {len(records)} matches")


def test_criterion_scoring_rubric(rubric):
    assert len(BATTING_CASES) + len(BOWLING_CASES) >= 20
    for fmt, runs, balls, fours, sixes, kind, expected in BATTING_CASES:
        row = engineer_batting(bat_row(fmt=fmt, runs=runs, balls=balls,
                                       fours=fours, sixes=sixes, kind=kind),
                               rubric)
        assert row.fantasy_score == expected, (fmt, runs, balls)
    for fmt, balls, conceded, wickets, maidens, expected in BOWLING_CASES:
        row = engineer_bowling(bowl_row(fmt=fmt, balls=balls, conceded=conceded,
                                        wickets=wickets, maidens=maidens),
                               rubric)
        assert row.fantasy_score == expected, (fmt, balls, conceded)

    # linearity off band/flag boundaries, every count field
    base = engineer_batting(bat_row(runs=30, balls=20, fours=2, sixes=1), rubric)
    for field, delta in (("runs", 1), ("fours", 1), ("sixes", 1)):
        kwargs = {"runs": 30, "balls": 20, "fours": 2, "sixes": 1}
        kwargs[field] += delta
        bumped = engineer_batting(bat_row(**kwargs), rubric)
        per = {"runs": 1.0, "fours": 1.0, "sixes": 2.0}[field]
        assert bumped.fantasy_score - base.fantasy_score == per * delta
    bbase = engineer_bowling(bowl_row(balls=24, conceded=30, wickets=1,
                                      maidens=1), rubric)
    for field, per in (("wickets", 25.0), ("maidens", 8.0)):
        kwargs = {"balls": 24, "conceded": 30, "wickets": 1, "maidens": 1}
        kwargs[field] += 1
        bumped = engineer_bowling(bowl_row(**kwargs), rubric)
        assert bumped.fantasy_score - bbase.fantasy_score == per
    report(f"scoring rubric: {len(BATTING_CASES) + len(BOWLING_CASES)} "
           f"hand-computed scores pinned; linearity holds off boundaries")


def test_criterion_regressor_reproduction():
    start = time.perf_counter()
    bat_rows = synth_batting_rows(6000, seed=1001)
    bowl_rows = synth_bowling_rows(4000, seed=1002)
    assert len(bat_rows) >= 5000 and len(bowl_rows) >= 3000

    results = {}
    for name, rows, encode, names, floor in (
            ("batting", bat_rows, encode_batting,
             [r.batsman for r in bat_rows], 0.95),
            ("bowling", bowl_rows, encode_bowling,
             [r.bowler for r in bowl_rows], 0.93)):
        codebook = fit_codebook({
            "player": names,
            "MF": [r.format for r in rows],
            "team1": [r.team1 for r in rows],
            "team2": [r.team2 for r in rows],
            "venue": [r.venue for r in rows],
        })
        matrix = encode(rows, codebook)
        train, test = train_test_split(matrix, 0.7, seed=42)
        forest = train_forest(train, ForestConfig(seed=42), codebook)
        rep = evaluate(forest, test)
        assert rep.r2 is not None and rep.r2 >= floor, (name, rep.r2)
        assert rep.bucket_accuracy >= 0.85, (name, rep.bucket_accuracy)
        results[name] = rep
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report("regressor reproduction: "
           f"batting r2={results['batting'].r2:.4f} (floor 0.95) "
           f"bucket={results['batting'].bucket_accuracy:.3f}; "
           f"bowling r2={results['bowling'].r2:.4f} (floor 0.93) "
           f"bucket={results['bowling'].bucket_accuracy:.3f}; "
           f"{elapsed:.1f}s < 120s")


def test_criterion_determinism(tmp_path):
    rows = synth_batting_rows(800, seed=321)
    codebook = fit_codebook({
        "player": [r.batsman for r in rows],
        "MF": [r.format for r in rows],
        "team1": [r.team1 for r in rows],
        "team2": [r.team2 for r in rows],
        "venue": [r.venue for r in rows],
    })
    matrix = encode_batting(rows, codebook)
    train, test = train_test_split(matrix, 0.7, seed=7)

    config = ForestConfig(n_trees=40, seed=7)
    run1 = train_forest(train, config, codebook)
    run2 = train_forest(train, config, codebook)
    parallel = train_forest(train, config, codebook, n_jobs=4)
    p1 = tmp_path / "run1.fxi"
    p2 = tmp_path / "run2.fxi"
    p3 = tmp_path / "parallel.fxi"
    save_model(run1, str(p1))
    save_model(run2, str(p2))
    save_model(parallel, str(p3))
    assert p1.read_bytes() == p2.read_bytes() == p3.read_bytes()
    assert np.array_equal(predict_matrix(run1, test.X),
                          predict_matrix(load_model(str(p1)), test.X))
    assert np.array_equal(predict_matrix(run1, test.X),
                          predict_matrix(parallel, test.X))

    rng = Rng(99)
    cards = random_instance(rng, n=22, locks=2, excludes=1)
    rec1 = recommend_exact(cards, RosterConstraints())
    rec2 = recommend_exact(cards, RosterConstraints())
    assert rec1.to_dict() == rec2.to_dict()
    report("determinism: model files bit-identical across runs and "
           "parallel/serial; predictions and recommendations identical")


def test_criterion_optimizer_exactness():
    start = time.perf_counter()
    constraints = RosterConstraints()
    rng = Rng(2024)

    checked = 0
    infeasible = 0
    for case in range(250):
        adversarial = case >= 200
        cards = random_instance(
            rng, n=22,
            locks=rng.randbelow(4) if adversarial else 0,
            excludes=rng.randbelow(4) if adversarial else 0,
            point_clusters=adversarial and case % 2 == 0)
        try:
            exact = recommend_exact(cards, constraints)
        except Infeasible:
            with pytest.raises(Infeasible):
                brute_force(cards, constraints)
            infeasible += 1
            continue
        oracle = brute_force(cards, constraints)
        assert exact.base_points == oracle.base_points
        assert ([c.player for c in exact.selected]
                == [c.player for c in oracle.selected])
        check_recommendation(exact, cards, constraints)
        check_recommendation(oracle, cards, constraints)
        greedy = recommend_greedy(cards, constraints)
        check_recommendation(greedy, cards, constraints)
        assert greedy.base_points <= exact.base_points
        checked += 1
    assert checked >= 200

    mono_trials = 0
    attempts = 0
    while mono_trials < 500 and attempts < 3000:
        attempts += 1
        cards = random_instance(rng, n=22)
        lo_budget = 85.0 + rng.randbelow(20) * 0.5
        hi_budget = lo_budget + rng.randbelow(30) * 0.5 + 0.5
        try:
            lo = recommend_exact(cards, RosterConstraints(budget=lo_budget))
        except Infeasible:
            continue
        hi = recommend_exact(cards, RosterConstraints(budget=hi_budget))
        assert hi.base_points >= lo.base_points
        mono_trials += 1

    scale_trials = 0
    attempts = 0
    while scale_trials < 500 and attempts < 3000:
        attempts += 1
        cards = random_instance(rng, n=22)
        factor = [0.5, 2.0, 4.0, 8.0][rng.randbelow(4)]
        try:
            base = recommend_exact(cards, constraints)
        except Infeasible:
            continue
        for c in cards:
            c.projected_points *= factor
        scaled = recommend_exact(cards, constraints)
        assert ([c.player for c in base.selected]
                == [c.player for c in scaled.selected])
        scale_trials += 1

    elapsed = time.perf_counter() - start
    assert mono_trials + scale_trials >= 1000
    assert elapsed < 300.0
    report(f"optimizer exactness: {checked} instances match the "
           f"C(22,11)=705,432-subset oracle ({infeasible} infeasible "
           f"cross-checked); greedy dominated everywhere; "
           f"{mono_trials}+{scale_trials} monotonicity/scale trials; "
           f"{elapsed:.1f}s < 300s")


@pytest.fixture(scope="module")
def acceptance_server(artifacts):
    state = load_state(artifacts["tables"], artifacts["batting"],
                       artifacts["bowling"], EngineConfig())
    srv = make_server(state, 0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield state, f"http://127.0.0.1:{srv.server_port}"
    srv.shutdown()
    srv.server_close()


def _post(base, path, body):
    req = urllib.request.Request(
        base + path, data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return resp.read()


def test_criterion_pipeline_equivalence(acceptance_server, artifacts,
                                        capsysbinary):
    from fantasyxi import cli

    state, base = acceptance_server
    store = state.store
    players = sorted(store.batting_by_player)[:20]
    teams = store.teams()
    checked = 0
    for player in players:
        row = store.batting[store.batting_by_player[player][0]]
        query = {"player": player, "format": row.format, "team1": row.team1,
                 "team2": row.team2, "venue": row.venue}
        http_body = _post(base, "/project", query)
        code = cli.main([
            "project", "--tables", artifacts["tables"],
            "--bat-model", artifacts["batting"],
            "--bowl-model", artifacts["bowling"],
            "--player", player, "--format", row.format,
            "--team1", row.team1, "--team2", row.team2, "--venue", row.venue])
        cli_body = capsysbinary.readouterr().out
        assert code == 0
        assert cli_body == http_body
        payload = json.loads(http_body)
        for key in ("batting_trace", "bowling_trace"):
            trace = payload["data"][key]
            if trace is None:
                continue
            counts = [s["matched"] for s in trace["steps"]]
            assert counts == sorted(counts)
        checked += 1
    assert checked == 20

    full = [t for t in teams if len(store.players_for_team(t)) >= 11][:2]
    squads = [store.players_for_team(full[0])[:11],
              store.players_for_team(full[1])[:11]]
    cards, _ = service.build_cards(state, {
        "team1": full[0], "team2": full[1], "format": "T20", "venue": "Lords"},
        squads)
    import tempfile

    from fantasyxi.optimizer import save_cards
    with tempfile.TemporaryDirectory() as tmp:
        card_path = os.path.join(tmp, "cards.csv")
        save_cards(cards, full, card_path)
        body = {"cards": [
            {"player": c.player, "team": full[c.team_index],
             "credit": c.credit, "points": c.projected_points}
            for c in cards], "method": "exact"}
        http_body = _post(base, "/recommend", body)
        code = cli.main(["recommend", "--cards", card_path, "--method", "exact"])
        cli_body = capsysbinary.readouterr().out
        assert code == 0
        assert cli_body == http_body
    report("pipeline equivalence: 20 scripted project queries and a "
           "recommend call byte-identical across CLI and HTTP; traces monotone")


def test_criterion_full_corpus_caveat():
    """Desk-scale substitute is the synthetic suite above; a real-corpus run
    is opt-in because corpus acquisition needs a network and the published
    point table is unavailable."""
    root = os.environ.get("FANTASYXI_CRICSHEET_ROOT")
    if not root:
        pytest.skip("set FANTASYXI_CRICSHEET_ROOT to a downloaded corpus to "
                    "run the optional full-corpus check (batting R2 >= 0.95)")
    from fantasyxi.ingest import scan_corpus

    index = scan_corpus(root)
    records = []
    for entry in index.entries:
        with open(entry.path, "rb") as fh:
            records.append(parse_match_file(fh.read(),
                                            format_hint=entry.format.lower(),
                                            match_id=entry.match_id))
    store = build_tables(records, default_rubric())
    codebook = codebook_from_store(store, "batting",
                                   unknown_policy="reserve_code")
    matrix = encode_store(store, "batting", codebook)
    train, test = train_test_split(matrix, 0.7, seed=42)
    forest = train_forest(train, ForestConfig(seed=42), codebook)
    rep = evaluate(forest, test)
    assert rep.r2 is not None and rep.r2 >= 0.95
    report(f"full corpus opt-in: batting r2={rep.r2:.4f} over "
           f"{len(records)} matches")
