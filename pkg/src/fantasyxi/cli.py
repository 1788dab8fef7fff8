"""Command line interface: the pipeline stages as composable subcommands.

Every subcommand prints one canonical JSON document to stdout (the same bytes
the HTTP service would return for the equivalent request); progress reports go
to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

from . import ingest as ingest_mod
from . import optimizer, service
from .config import EngineConfig, load_config
from .dataset import build_tables, save_tables
from .errors import FantasyXIError
from .learner import (
    ForestConfig,
    codebook_from_store,
    encode_store,
    evaluate,
    load_model,
    save_model,
    train_forest,
    train_test_split,
)
from .rubric import default_rubric, load_rubric
from .service import JobReport, canonical_json, load_state, ok

KIND_ALIASES = {"etr": "extra_trees", "rf": "random_forest",
                "extra_trees": "extra_trees", "random_forest": "random_forest"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.run(args)
    except FantasyXIError as exc:
        sys.stdout.buffer.write(canonical_json(service.fail(exc)))
        return 1
    if payload is not None:
        sys.stdout.buffer.write(canonical_json(payload))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fantasyxi",
        description="fantasy cricket engine: ingest, build, train, project, recommend")
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--config", default=None, help="engine config YAML")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--json", action="store_true",
                        help="accepted for symmetry; output is always JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw match files into the cache")
    p.add_argument("--root", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["odi", "ipl", "t20"], default=None)
    p.set_defaults(run=cmd_ingest)

    p = sub.add_parser("build", help="aggregate cached matches into tables")
    p.add_argument("--cache", required=True)
    p.add_argument("--rubric", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("train", help="fit a forest on a discipline table")
    p.add_argument("--tables", required=True)
    p.add_argument("--discipline", choices=["batting", "bowling"], required=True)
    p.add_argument("--kind", choices=sorted(KIND_ALIASES), default="etr")
    # SUPPRESS so an absent subcommand-level flag never clobbers the global
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--split", type=float, default=None)
    p.add_argument("--trees", type=int, default=None)
    p.add_argument("--min-samples-leaf", type=int, default=None)
    p.add_argument("--max-features", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on its held-out split")
    p.add_argument("--model", required=True)
    p.add_argument("--tables", required=True)
    p.set_defaults(run=cmd_evaluate)

    p = sub.add_parser("project", help="project one player's fantasy score")
    p.add_argument("--tables", required=True)
    p.add_argument("--bat-model", default=None)
    p.add_argument("--bowl-model", default=None)
    p.add_argument("--player", required=True)
    p.add_argument("--format", required=True)
    p.add_argument("--team1", required=True)
    p.add_argument("--team2", required=True)
    p.add_argument("--venue", required=True)
    p.add_argument("--k-min", type=int, default=None)
    p.set_defaults(run=cmd_project)

    p = sub.add_parser("recommend", help="pick the optimal XI from a card file")
    p.add_argument("--cards", required=True)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--max-per-team", type=int, default=None)
    p.add_argument("--method", choices=["exact", "greedy"], default="exact")
    p.add_argument("--tables", default=None, help="needed when points are blank")
    p.add_argument("--bat-model", default=None)
    p.add_argument("--bowl-model", default=None)
    p.add_argument("--format", default=None)
    p.add_argument("--venue", default=None)
    p.set_defaults(run=cmd_recommend)

    p = sub.add_parser("insights", help="player or team insight series")
    p.add_argument("--tables", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--player")
    group.add_argument("--team")
    p.set_defaults(run=cmd_insights)

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument("--tables", required=True)
    p.add_argument("--bat-model", default=None)
    p.add_argument("--bowl-model", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(run=cmd_serve)

    return parser


def _config(args) -> EngineConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    return config


def cmd_ingest(args):
    report = JobReport(stage="ingest", started=time.time())
    index = ingest_mod.scan_corpus(args.root, only_format=args.format)
    written = 0
    for entry in index.entries:
        with open(entry.path, "rb") as fh:
            record = ingest_mod.parse_match_file(
                fh.read(), format_hint=entry.format.lower(),
                match_id=entry.match_id)
        ingest_mod.save_record(record, args.out)
        written += 1
    report.counts = {"indexed": len(index.entries), "written": written,
                     "failed": len(index.failures)}
    report.warnings = [f"{path}: {msg}" for path, msg in index.failures]
    report.close().emit()
    return ok({
        "counts_by_format": index.counts_by_format,
        "indexed": len(index.entries),
        "failures": [{"path": path, "error": msg} for path, msg in index.failures],
        "cache_dir": args.out,
    })


def cmd_build(args):
    report = JobReport(stage="build", started=time.time())
    rubric = load_rubric(args.rubric) if args.rubric else default_rubric()
    records = ingest_mod.load_cache(args.cache)
    store = build_tables(records, rubric)
    bat_path, bowl_path = save_tables(store, args.out)
    report.counts = {"matches": len(records), "batting_rows": len(store.batting),
                     "bowling_rows": len(store.bowling)}
    report.close().emit()
    return ok({"batting_csv": bat_path, "bowling_csv": bowl_path,
               "batting_rows": len(store.batting),
               "bowling_rows": len(store.bowling)})


def cmd_train(args):
    report = JobReport(stage="train", started=time.time())
    config = _config(args)
    from .dataset import load_tables
    store = load_tables(args.tables)
    digest = service.tables_hash(args.tables)
    codebook = codebook_from_store(store, args.discipline,
                                   unknown_policy="reserve_code")
    matrix = encode_store(store, args.discipline, codebook)
    split = args.split if args.split is not None else config.split
    train, test = train_test_split(matrix, split, config.seed)
    forest_config = ForestConfig(
        kind=KIND_ALIASES[args.kind],
        n_trees=args.trees if args.trees is not None else config.n_trees,
        min_samples_leaf=(args.min_samples_leaf if args.min_samples_leaf is not None
                          else config.min_samples_leaf),
        max_features=(args.max_features if args.max_features is not None
                      else config.max_features),
        seed=config.seed,
    )
    forest = train_forest(train, forest_config, codebook, tables_hash=digest,
                          n_jobs=args.jobs)
    forest.split = split
    save_model(forest, args.out)
    result = evaluate(forest, test)
    report.counts = {"n_train": train.n, "n_test": test.n,
                     "n_trees": forest.n_trees}
    report.close().emit()
    return ok({"model": args.out, "kind": forest.kind,
               "discipline": forest.discipline, "split": split,
               "eval": result.to_dict()})


def cmd_evaluate(args):
    from .dataset import load_tables
    report = JobReport(stage="evaluate", started=time.time())
    store = load_tables(args.tables)
    digest = service.tables_hash(args.tables)
    forest = load_model(args.model)
    if forest.tables_hash and forest.tables_hash != digest:
        raise FantasyXIError(
            f"model was trained on different tables "
            f"(hash {forest.tables_hash[:12]} != {digest[:12]})")
    matrix = encode_store(store, forest.discipline, forest.codebook)
    _, test = train_test_split(matrix, forest.split, forest.seed)
    result = evaluate(forest, test)
    report.counts = {"n_test": test.n}
    report.close().emit()
    return ok(result.to_dict())


def cmd_project(args):
    config = _config(args)
    if args.k_min is not None:
        config.k_min = args.k_min
    report = JobReport(stage="project", started=time.time())
    state = load_state(args.tables, args.bat_model, args.bowl_model, config)
    payload = service.payload_project(state, {
        "player": args.player, "format": args.format, "team1": args.team1,
        "team2": args.team2, "venue": args.venue,
    })
    report.counts = {"n_rows_used": payload["data"]["n_rows_used"]}
    report.close().emit()
    return payload


def cmd_recommend(args):
    config = _config(args)
    cards, team_names = optimizer.load_cards(args.cards)
    if any(math.isnan(c.projected_points) for c in cards):
        if not args.tables:
            raise FantasyXIError(
                "card file has blank points; pass --tables/--bat-model/"
                "--bowl-model/--format/--venue to project them")
        state = load_state(args.tables, args.bat_model, args.bowl_model, config)
        fixture = {"format": args.format, "venue": args.venue}
        cards, _ = service.fill_missing_points(state, cards, team_names, fixture)
    constraints = optimizer.RosterConstraints(
        roster_size=args.size if args.size is not None else config.roster_size,
        budget=args.budget if args.budget is not None else config.budget,
        max_per_team=(args.max_per_team if args.max_per_team is not None
                      else config.max_per_team),
    )
    report = JobReport(stage="recommend", started=time.time())
    if args.method == "greedy":
        rec = optimizer.recommend_greedy(cards, constraints)
    else:
        rec = optimizer.recommend_exact(cards, constraints)
    report.counts = {"cards": len(cards), "selected": len(rec.selected)}
    report.close().emit()
    return ok({"recommendation": rec.to_dict(),
               "cards": service.cards_to_dicts(cards),
               "cold_start": []})


def cmd_insights(args):
    config = _config(args)
    state = load_state(args.tables, None, None, config)
    if args.player:
        return service.payload_player_insights(state, args.player)
    return service.payload_team_insights(state, args.team)


def cmd_serve(args):
    config = _config(args)
    state = load_state(args.tables, args.bat_model, args.bowl_model, config)
    service.serve_http(state, args.port if args.port is not None else config.port)
    return None


if __name__ == "__main__":
    raise SystemExit(main())
