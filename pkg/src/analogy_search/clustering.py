"""Seeded k-means over the unit-norm aspect vectors of a corpus.

Lloyd's algorithm with k-means++ initialization, both driven by one
numpy Generator so a (inputs, seed) pair always yields the same model.
Vectors are unit-norm, so Euclidean clustering here is monotonically
related to cosine: ||a-b||^2 = 2 * (1 - cos(a, b)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Aspect, CorpusIndex
from .errors import ClusteringError
from .kernels import sqdist_matrix

MAX_ITER = 300


@dataclass
class KMeansResult:
    """Raw clustering output over a point matrix."""

    centers: np.ndarray  # (k, dim)
    labels: np.ndarray  # (n,) int
    inertia: float
    inertia_trace: list[float]  # inertia after each assignment step
    n_iter: int
    converged: bool


@dataclass
class ClusterModel:
    """Clustering of every paper possessing one aspect."""

    centroids: np.ndarray
    assignment: dict[str, int]
    inertia: float
    covered_ids: list[str] = field(default_factory=list)
    converged: bool = True

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def cluster_of(self, paper_id: str) -> int | None:
        """Cluster index, or None when the paper lacks the aspect."""
        return self.assignment.get(paper_id)


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = sqdist_matrix(points, points[chosen[-1]][None, :])[:, 0]
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass on already-chosen coordinates (duplicate
            # points); fall back to a uniform draw over unchosen indices
            unchosen = [i for i in range(n) if i not in set(chosen)]
            nxt = unchosen[int(rng.integers(len(unchosen)))]
        else:
            r = float(rng.random()) * total
            nxt = int(min(np.searchsorted(np.cumsum(d2), r, side="right"), n - 1))
        chosen.append(nxt)
        d2 = np.minimum(d2, sqdist_matrix(points, points[nxt][None, :])[:, 0])
    return points[chosen].copy()


def _refill_empty(labels: np.ndarray, d2: np.ndarray, k: int) -> np.ndarray:
    """Move the costliest point of a donor cluster into each empty cluster.

    Donors must keep >= 1 member; ties go to the lowest point index.
    """
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    cost = d2[np.arange(labels.shape[0]), labels]
    for empty in np.flatnonzero(counts == 0):
        movable = counts[labels] >= 2
        candidate_cost = np.where(movable, cost, -np.inf)
        mover = int(np.argmax(candidate_cost))  # argmax ties -> lowest index
        counts[labels[mover]] -= 1
        labels[mover] = empty
        counts[empty] += 1
        cost[mover] = 0.0  # its new centroid will sit on it
    return labels


def kmeans_points(points: np.ndarray, k: int, seed: int, max_iter: int = MAX_ITER) -> KMeansResult:
    """Lloyd's algorithm with seeded k-means++ start.

    Iterates until the nearest-centroid assignment repeats or max_iter
    passes. Returned labels are always nearest-centroid. A returned
    cluster can only be empty when duplicate points force coincident
    centroids, and then inertia is exactly 0 anyway.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ClusteringError(f"k={k} with {n} points")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(points, k, rng)

    trace: list[float] = []
    prev: np.ndarray | None = None
    converged = False
    n_iter = 0
    labels = np.zeros(n, dtype=np.intp)
    for n_iter in range(1, max_iter + 1):
        d2 = sqdist_matrix(points, centers)
        labels = d2.argmin(axis=1)
        trace.append(float(d2[np.arange(n), labels].sum()))
        if prev is not None and np.array_equal(labels, prev):
            converged = True
            break
        prev = labels
        filled = _refill_empty(labels, d2, k)
        for j in range(k):
            members = points[filled == j]
            if members.shape[0]:
                centers[j] = members.mean(axis=0)
        labels = filled

    d2 = sqdist_matrix(points, centers)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return KMeansResult(centers, labels, inertia, trace, n_iter, converged)


def kmeans_cluster(index: CorpusIndex, aspect: Aspect, k: int, seed: int) -> ClusterModel:
    """Cluster every paper that has `aspect` into k groups."""
    ids, matrix = index.aspect_matrix(aspect)
    if k < 1:
        raise ClusteringError(f"k must be positive, got {k}")
    if len(ids) < k:
        raise ClusteringError(
            f"{len(ids)} papers have aspect {aspect.value!r}, need at least k={k}"
        )
    result = kmeans_points(matrix, k, seed)
    assignment = {pid: int(lbl) for pid, lbl in zip(ids, result.labels)}
    return ClusterModel(result.centers, assignment, result.inertia, ids, result.converged)
