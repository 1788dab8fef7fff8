"""Build a synthetic-corpus service instance for frontend end-to-end tests.

Prints FANTASYXI_PORT=<port> once the server is listening, then serves until
killed. Artifacts live in a temp directory.
"""

import sys
import tempfile
import threading

from fantasyxi.config import EngineConfig
from fantasyxi.dataset import build_tables, save_tables
from fantasyxi.learner import (
    ForestConfig,
    codebook_from_store,
    encode_store,
    save_model,
    train_forest,
    train_test_split,
)
from fantasyxi.rubric import default_rubric
from fantasyxi.service import load_state, make_server, tables_hash
from fantasyxi.synth import synth_corpus


def main():
    root = tempfile.mkdtemp(prefix="fantasyxi-ui-")
    store = build_tables(synth_corpus(40, seed=101), default_rubric())
    tables = f"{root}/tables"
    save_tables(store, tables)
    digest = tables_hash(tables)
    model_paths = {}
    for discipline in ("batting", "bowling"):
        codebook = codebook_from_store(store, discipline,
                                       unknown_policy="reserve_code")
        matrix = encode_store(store, discipline, codebook)
        train, _ = train_test_split(matrix, 0.7, seed=42)
        forest = train_forest(train, ForestConfig(n_trees=30, seed=42),
                              codebook, tables_hash=digest)
        path = f"{root}/{discipline}.fxi"
        save_model(forest, path)
        model_paths[discipline] = path

    state = load_state(tables, model_paths["batting"], model_paths["bowling"],
                       EngineConfig())
    server = make_server(state, 0)
    print(f"FANTASYXI_PORT={server.server_port}", flush=True)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        thread.join()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    sys.exit(main())
