"""Segment-aware analogy search over research-paper abstracts.

Papers are represented by one vector per functional aspect (background,
problem, mechanism, ...). Searches stay near the query on some aspects
and go far on another, so the results solve a similar problem by
different means. The package bundles the ranking algorithms, a lexical
baseline, clustering and dispersion primitives, and the evaluation
harness (probe scoring, blind interleaved A/B sessions, vote aggregation)
plus a CLI and HTTP service on top.
"""

from __future__ import annotations

from .corpus import (
    Aspect,
    CorpusIndex,
    PaperRecord,
    build_index,
    deduplicate,
    ingest_corpus,
    load_index,
    load_index_file,
    resolve_aspect,
    save_index,
)
from .embeddings import load_embedding_table
from .errors import AnalogySearchError
from .evaluation import (
    Engine,
    EvalDataPoint,
    Interestingness,
    TesInput,
    Usefulness,
    VoteStore,
    aggregate_votes,
    build_top_bottom_probe,
    interleave_results,
    majority_vote_correctness,
    tes_score,
)
from .ranking import (
    Algorithm,
    RankedList,
    ReduceMode,
    ScoredPaper,
    SearchConfig,
    knn_by_aspect,
    lexical_baseline_search,
    max_min_select,
    run_search,
)
from .sessions import AbSession, SessionStore, create_ab_session

__version__ = "0.1.0"

__all__ = [
    "AbSession",
    "Algorithm",
    "AnalogySearchError",
    "Aspect",
    "CorpusIndex",
    "Engine",
    "EvalDataPoint",
    "Interestingness",
    "PaperRecord",
    "RankedList",
    "ReduceMode",
    "ScoredPaper",
    "SearchConfig",
    "SessionStore",
    "TesInput",
    "Usefulness",
    "VoteStore",
    "aggregate_votes",
    "build_index",
    "build_top_bottom_probe",
    "create_ab_session",
    "deduplicate",
    "ingest_corpus",
    "interleave_results",
    "knn_by_aspect",
    "lexical_baseline_search",
    "load_embedding_table",
    "load_index",
    "load_index_file",
    "majority_vote_correctness",
    "max_min_select",
    "resolve_aspect",
    "run_search",
    "save_index",
    "tes_score",
    "__version__",
]
