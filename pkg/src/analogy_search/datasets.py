"""Locations of the bundled demonstration corpus.

The toy corpus is small enough to ship inside the package: 30 papers in 5
problem domains crossed with 5 mechanism families, plus the quirks real
data has (a duplicate title, papers without a mechanism segment, a token
missing from the embedding table).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def _toy_file(name: str) -> Path:
    return Path(str(resources.files("analogy_search").joinpath("data", "toy", name)))


def toy_corpus_path() -> Path:
    return _toy_file("corpus.jsonl")


def toy_embeddings_path() -> Path:
    return _toy_file("embeddings.txt")
