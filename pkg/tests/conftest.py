import datetime as dt
import os

import pytest

from fantasyxi.dataset import build_tables
from fantasyxi.ingest import parse_match_file
from fantasyxi.rubric import default_rubric
from fantasyxi.synth import synth_corpus

FIXTURE_ROOT = os.path.join(os.path.dirname(__file__), "fixtures", "cricsheet")

FIXTURE_FILES = {
    "t20": ["211028.yaml", "392201.yaml"],
    "odi": ["647123.yaml", "655301.yaml"],
    "ipl": ["733015.yaml", "733099.yaml"],
}


def fixture_path(fmt: str, name: str) -> str:
    return os.path.join(FIXTURE_ROOT, fmt, name)


def all_fixture_paths():
    return [(fmt, fixture_path(fmt, name))
            for fmt, names in FIXTURE_FILES.items() for name in names]


def parse_fixture(fmt: str, name: str):
    path = fixture_path(fmt, name)
    with open(path, "rb") as fh:
        return parse_match_file(fh.read(), format_hint=fmt,
                                match_id=name.rsplit(".", 1)[0])


@pytest.fixture(scope="session")
def rubric():
    return default_rubric()


@pytest.fixture(scope="session")
def fixture_records():
    return [parse_fixture(fmt, name)
            for fmt, names in FIXTURE_FILES.items() for name in names]


@pytest.fixture(scope="session")
def fixture_store(fixture_records, rubric):
    return build_tables(fixture_records, rubric)


@pytest.fixture(scope="session")
def small_corpus():
    """40 synthetic matches, enough history for projection tests."""
    return synth_corpus(40, seed=101, start=dt.date(2017, 4, 1))


@pytest.fixture(scope="session")
def small_store(small_corpus, rubric):
    return build_tables(small_corpus, rubric)


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory, small_store):
    """Persisted tables plus trained batting/bowling models for service tests."""
    from fantasyxi.dataset import save_tables
    from fantasyxi.learner import (ForestConfig, codebook_from_store,
                                   encode_store, save_model, train_forest,
                                   train_test_split)
    from fantasyxi.service import tables_hash

    root = tmp_path_factory.mktemp("artifacts")
    tables = root / "tables"
    save_tables(small_store, str(tables))
    digest = tables_hash(str(tables))
    paths = {"tables": str(tables)}
    for discipline in ("batting", "bowling"):
        codebook = codebook_from_store(small_store, discipline,
                                       unknown_policy="reserve_code")
        matrix = encode_store(small_store, discipline, codebook)
        train, _ = train_test_split(matrix, 0.7, seed=42)
        forest = train_forest(train, ForestConfig(n_trees=30, seed=42),
                              codebook, tables_hash=digest)
        path = root / f"{discipline}.fxi"
        save_model(forest, str(path))
        paths[discipline] = str(path)
    return paths
