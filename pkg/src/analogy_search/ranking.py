"""The four analogical search algorithms plus the lexical baseline.

Every search is a pure function of (index, query paper, config); all
randomness flows through config.rng_seed. Scores carry each algorithm's
own semantics: similarity for near steps, cosine distance for far
reranks, BM25 for the baseline, min-dispersion for farthest-neighbor.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .bm25 import Bm25Scorer
from .clustering import ClusterModel, kmeans_cluster
from .corpus import Aspect, CorpusIndex, resolve_aspect
from .embeddings import l2_normalize
from .errors import ConfigError, MissingAspectError
from .kernels import dot_matrix, dot_scores

DEFAULT_POOL_SIZE = 50
DEFAULT_RESULT_SIZE = 15
DEFAULT_K_CLUSTERS = 20


class Algorithm(str, Enum):
    NAIVE_COSINE = "NaiveCosine"
    KNN_KMEANS = "KnnKmeans"
    NAIVE_FARTHEST = "NaiveFarthest"
    FARTHEST_NEIGHBOR = "FarthestNeighbor"
    LEXICAL_BASELINE = "LexicalBaseline"


class ReduceMode(str, Enum):
    NEAREST_TO_CENTROID = "NearestToCentroid"
    NEAREST_TO_QUERY = "NearestToQuery"


def _parse_enum(enum_cls, raw: str, what: str):
    squashed = raw.replace("-", "").replace("_", "").lower()
    for member in enum_cls:
        if member.value.lower() == squashed:
            return member
    names = ", ".join(m.value for m in enum_cls)
    raise ConfigError(f"unknown {what} {raw!r} (expected one of: {names})")


def parse_algorithm(raw: str) -> Algorithm:
    return _parse_enum(Algorithm, raw, "algorithm")


def parse_reduce_mode(raw: str) -> ReduceMode:
    return _parse_enum(ReduceMode, raw, "reduce mode")


class ScoredPaper(NamedTuple):
    paper_id: str
    score: float


RankedList = list[ScoredPaper]


@dataclass(frozen=True)
class SearchConfig:
    algorithm: Algorithm
    near_aspects: tuple[tuple[Aspect, float], ...] = ((Aspect.PROBLEM, 1.0),)
    far_aspect: Aspect = Aspect.MECHANISM
    pool_size: int = DEFAULT_POOL_SIZE
    result_size: int = DEFAULT_RESULT_SIZE
    k_clusters: int = DEFAULT_K_CLUSTERS
    reduce_mode: ReduceMode = ReduceMode.NEAREST_TO_QUERY
    rng_seed: int = 0

    def __post_init__(self):
        if not self.near_aspects:
            raise ConfigError("near_aspects must be nonempty")
        if any(w <= 0 for _, w in self.near_aspects):
            raise ConfigError("near-aspect weights must be positive")
        if any(a == self.far_aspect for a, _ in self.near_aspects):
            raise ConfigError(f"far_aspect {self.far_aspect.value!r} also listed as near")
        for name in ("pool_size", "result_size", "k_clusters"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.result_size > self.pool_size:
            raise ConfigError("result_size must not exceed pool_size")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must fit in 64 unsigned bits")

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "near_aspects": [[a.value, w] for a, w in self.near_aspects],
            "far_aspect": self.far_aspect.value,
            "pool_size": self.pool_size,
            "result_size": self.result_size,
            "k_clusters": self.k_clusters,
            "reduce_mode": self.reduce_mode.value,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, obj: Mapping, purpose_aspect: Aspect = Aspect.PROBLEM) -> "SearchConfig":
        """Build from the structured form used by CLI files and the API."""
        if not isinstance(obj, Mapping):
            raise ConfigError("config must be an object")
        unknown = set(obj) - {
            "algorithm", "near_aspects", "far_aspect", "pool_size",
            "result_size", "k_clusters", "reduce_mode", "rng_seed",
        }
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "algorithm" not in obj:
            raise ConfigError("config requires an algorithm")
        kwargs: dict = {"algorithm": parse_algorithm(str(obj["algorithm"]))}
        if "near_aspects" in obj:
            try:
                kwargs["near_aspects"] = tuple(
                    (resolve_aspect(str(name), purpose_aspect), float(w))
                    for name, w in obj["near_aspects"]
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"malformed near_aspects: {exc}") from exc
        if "far_aspect" in obj:
            kwargs["far_aspect"] = resolve_aspect(str(obj["far_aspect"]), purpose_aspect)
        if "reduce_mode" in obj:
            kwargs["reduce_mode"] = parse_reduce_mode(str(obj["reduce_mode"]))
        for name in ("pool_size", "result_size", "k_clusters", "rng_seed"):
            if name in obj:
                value = obj[name]
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"{name} must be an integer")
                kwargs[name] = value
        return cls(**kwargs)


def _query_vector(index: CorpusIndex, query: str, aspect: Aspect) -> np.ndarray:
    vec = index.vector(query, aspect)
    if vec is None:
        raise MissingAspectError(f"aspect {aspect.value!r} absent on query {query!r}")
    return vec


def aspect_similarities(index: CorpusIndex, query: str, aspect: Aspect) -> dict[str, float]:
    """Cosine similarity of the query to every other paper with `aspect`."""
    qv = _query_vector(index, query, aspect)
    ids, matrix = index.aspect_matrix(aspect)
    sims = np.clip(dot_scores(matrix, qv), -1.0, 1.0)
    return {pid: float(s) for pid, s in zip(ids, sims) if pid != query}


def knn_by_aspect(index: CorpusIndex, query: str, aspect: Aspect, k: int) -> RankedList:
    """Exact top-k by cosine on one aspect; ties break on ascending id."""
    if k < 0:
        raise ConfigError("k must be nonnegative")
    sims = aspect_similarities(index, query, aspect)
    ranked = sorted(sims.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ScoredPaper(pid, s) for pid, s in ranked[:k]]


def fuse_near_lists(
    sim_maps: Sequence[Mapping[str, float]], weights: Sequence[float]
) -> RankedList:
    """Weighted mean of per-aspect similarities over present aspects.

    A paper scored by only some of the maps is averaged over those maps'
    weights alone, so missing aspects dilute nothing. Papers in no map
    are excluded.
    """
    if not sim_maps:
        raise ConfigError("need at least one similarity map")
    if len(sim_maps) != len(weights):
        raise ConfigError("weights must align with similarity maps")
    if any(w <= 0 for w in weights):
        raise ConfigError("weights must be positive")
    fused: dict[str, float] = {}
    for pid in set().union(*sim_maps):
        num = den = 0.0
        for sim_map, w in zip(sim_maps, weights):
            if pid in sim_map:
                num += w * sim_map[pid]
                den += w
        fused[pid] = num / den
    ranked = sorted(fused.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ScoredPaper(pid, s) for pid, s in ranked]


def _near_pool(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    sim_maps = [aspect_similarities(index, query, a) for a, _ in config.near_aspects]
    fused = fuse_near_lists(sim_maps, [w for _, w in config.near_aspects])
    return fused[: config.pool_size]


def _far_distances(
    index: CorpusIndex, query: str, config: SearchConfig, pids: Sequence[str]
) -> dict[str, float]:
    qfar = _query_vector(index, query, config.far_aspect)
    out: dict[str, float] = {}
    for pid in pids:
        vec = index.vector(pid, config.far_aspect)
        if vec is not None:
            out[pid] = 1.0 - float(np.clip(vec @ qfar, -1.0, 1.0))
    return out


def naive_cosine_search(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    """Near pool, then rerank by far-aspect cosine distance, farthest first.

    Pool members with no far-aspect vector cannot be reranked; they trail
    the reranked ones in near order with score 0.0 (no far distance is
    below zero, so the whole list stays monotone).
    """
    _query_vector(index, query, config.far_aspect)
    pool = _near_pool(index, query, config)
    far = _far_distances(index, query, config, [p.paper_id for p in pool])
    with_far = [p.paper_id for p in pool if p.paper_id in far]
    reranked = sorted(with_far, key=lambda pid: -far[pid])  # stable over near order
    out = [ScoredPaper(pid, far[pid]) for pid in reranked]
    out += [ScoredPaper(p.paper_id, 0.0) for p in pool if p.paper_id not in far]
    return out[: config.result_size]


def knn_kmeans_search(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    """Near pool minus everything sharing the query's far-aspect cluster.

    Survivors keep their fused near scores and relative order. The list
    may come up short, even empty, when the cluster swallows the pool;
    that is the documented behavior, not an error. Pool members lacking
    the far aspect are unclusterable and therefore survive.
    """
    _query_vector(index, query, config.far_aspect)
    pool = _near_pool(index, query, config)
    model = kmeans_cluster(index, config.far_aspect, config.k_clusters, config.rng_seed)
    query_cluster = model.cluster_of(query)
    survivors = [p for p in pool if model.cluster_of(p.paper_id) != query_cluster]
    return survivors[: config.result_size]


def _single_near_aspect(config: SearchConfig) -> Aspect:
    if len(config.near_aspects) != 1:
        raise ConfigError(f"{config.algorithm.value} requires exactly one near aspect")
    return config.near_aspects[0][0]


def _near_cluster_pool(
    index: CorpusIndex, query: str, config: SearchConfig
) -> tuple[list[str], ClusterModel]:
    """Members of the query's near-aspect cluster, shrunk to pool_size."""
    near = _single_near_aspect(config)
    qv = _query_vector(index, query, near)
    model = kmeans_cluster(index, near, config.k_clusters, config.rng_seed)
    query_cluster = model.cluster_of(query)
    members = [
        pid for pid in model.covered_ids
        if pid != query and model.assignment[pid] == query_cluster
    ]
    if len(members) > config.pool_size:
        if config.reduce_mode is ReduceMode.NEAREST_TO_QUERY:
            ref = qv
        else:
            centroid, degenerate = l2_normalize(model.centroids[query_cluster])
            ref = qv if degenerate else centroid
        mat = np.ascontiguousarray([index.vectors[pid][near] for pid in members])
        sims = np.clip(dot_scores(mat, ref), -1.0, 1.0)
        order = sorted(zip(members, sims), key=lambda kv: (-kv[1], kv[0]))
        members = [pid for pid, _ in order[: config.pool_size]]
    return members, model


def naive_farthest_search(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    """Cluster on the near aspect, then take the far-distance extremes."""
    _query_vector(index, query, config.far_aspect)
    members, _ = _near_cluster_pool(index, query, config)
    far = _far_distances(index, query, config, members)
    ranked = sorted((pid for pid in members if pid in far), key=lambda pid: -far[pid])
    return [ScoredPaper(pid, far[pid]) for pid in ranked[: config.result_size]]


def max_min_select(
    candidates: Sequence[str],
    vectors: Mapping[str, np.ndarray],
    m: int,
    seed: int,
) -> list[str]:
    """Greedy max-min dispersion from a seeded random start.

    Each step adds the candidate whose minimum cosine distance to the
    already-selected set is largest (ties to ascending id).
    """
    if m == 0:
        return []
    if m > len(candidates):
        raise ConfigError(f"cannot select {m} of {len(candidates)} candidates")
    missing = [pid for pid in candidates if pid not in vectors]
    if missing:
        raise MissingAspectError(f"candidates without vectors: {missing[:3]}")
    rng = np.random.default_rng(seed)
    mat = np.ascontiguousarray([vectors[pid] for pid in candidates])
    dist = 1.0 - np.clip(dot_matrix(mat, mat), -1.0, 1.0)
    start = int(rng.integers(len(candidates)))
    selected = [start]
    remaining = set(range(len(candidates))) - {start}
    min_dist = dist[:, start].copy()
    while len(selected) < m:
        best = min(remaining, key=lambda i: (-min_dist[i], candidates[i]))
        selected.append(best)
        remaining.discard(best)
        min_dist = np.minimum(min_dist, dist[:, best])
    return [candidates[i] for i in selected]


def farthest_neighbor_search(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    """Like naive-farthest, but the final picks maximize mutual dispersion.

    Scores are each member's min cosine distance to the rest of the
    selection, listed in selection order (greedy order, not sorted; a
    singleton selection scores 0.0). Pool members lacking the far aspect
    cannot participate; if fewer than result_size remain the whole
    eligible pool is returned.
    """
    _query_vector(index, query, config.far_aspect)
    members, _ = _near_cluster_pool(index, query, config)
    far_vecs = {
        pid: vec for pid in members
        if (vec := index.vector(pid, config.far_aspect)) is not None
    }
    eligible = [pid for pid in members if pid in far_vecs]
    m = min(config.result_size, len(eligible))
    if m == 0:
        return []
    chosen = max_min_select(eligible, far_vecs, m, config.rng_seed)
    if len(chosen) == 1:
        return [ScoredPaper(chosen[0], 0.0)]
    mat = np.ascontiguousarray([far_vecs[pid] for pid in chosen])
    dist = 1.0 - np.clip(dot_matrix(mat, mat), -1.0, 1.0)
    np.fill_diagonal(dist, np.inf)
    return [ScoredPaper(pid, float(dist[i].min())) for i, pid in enumerate(chosen)]


_bm25_cache: "weakref.WeakKeyDictionary[CorpusIndex, Bm25Scorer]" = weakref.WeakKeyDictionary()


def _bm25_for(index: CorpusIndex) -> Bm25Scorer:
    scorer = _bm25_cache.get(index)
    if scorer is None:
        docs = {r.paper_id: r.tokens[Aspect.FULL_ABSTRACT] for r in index.records}
        scorer = Bm25Scorer(docs)
        _bm25_cache[index] = scorer
    return scorer


def lexical_baseline_search(index: CorpusIndex, query: str, n: int) -> RankedList:
    """BM25 over full-abstract bags, query's own abstract as the query.

    The query paper would trivially top the list and is excluded. When
    the query shares no term with anything, every score is zero and the
    all-zero list (id order) is returned rather than nothing.
    """
    record = index.record(query)
    scores = _bm25_for(index).score_all(record.tokens[Aspect.FULL_ABSTRACT])
    scores.pop(query, None)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ScoredPaper(pid, s) for pid, s in ranked[:n]]


_DISPATCH = {
    Algorithm.NAIVE_COSINE: naive_cosine_search,
    Algorithm.KNN_KMEANS: knn_kmeans_search,
    Algorithm.NAIVE_FARTHEST: naive_farthest_search,
    Algorithm.FARTHEST_NEIGHBOR: farthest_neighbor_search,
}


def run_search(index: CorpusIndex, query: str, config: SearchConfig) -> RankedList:
    """Dispatch to the configured algorithm."""
    index.record(query)  # unknown query fails identically for every algorithm
    if config.algorithm is Algorithm.LEXICAL_BASELINE:
        return lexical_baseline_search(index, query, config.result_size)
    return _DISPATCH[config.algorithm](index, query, config)
