import pytest

from analogy_search.corpus import build_index, ingest_corpus
from analogy_search.datasets import toy_corpus_path, toy_embeddings_path
from analogy_search.embeddings import load_embedding_table


@pytest.fixture(scope="session")
def toy_index():
    with open(toy_corpus_path(), encoding="utf-8") as fh:
        records = ingest_corpus(fh)
    with open(toy_embeddings_path(), encoding="utf-8") as fh:
        table = load_embedding_table(fh)
    index, _ = build_index(records, table)
    return index
