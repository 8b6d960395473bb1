import pytest

from plansum.fixtures import corpus_jsonl, load_corpus
from plansum.retrieval import assemble_input, rank_passages

SKY_QUERY = "Why is the sky blue?"
TITANIC_QUERY = "What is the Titanic known for?"


@pytest.fixture(scope="session")
def sky_corpus():
    return load_corpus("sky")


@pytest.fixture(scope="session")
def titanic_corpus():
    return load_corpus("titanic")


def make_input(query, corpus, token_budget=4096):
    ranked = rank_passages(query, corpus, k=1_000_000)
    return assemble_input(query, ranked, corpus, token_budget=token_budget)


@pytest.fixture(scope="session")
def sky_input(sky_corpus):
    return make_input(SKY_QUERY, sky_corpus)


@pytest.fixture(scope="session")
def titanic_input(titanic_corpus):
    return make_input(TITANIC_QUERY, titanic_corpus)


@pytest.fixture
def titanic_corpus_file(tmp_path):
    path = tmp_path / "titanic.jsonl"
    path.write_text(corpus_jsonl("titanic"), encoding="utf-8")
    return path


@pytest.fixture
def sky_corpus_file(tmp_path):
    path = tmp_path / "sky.jsonl"
    path.write_text(corpus_jsonl("sky"), encoding="utf-8")
    return path
