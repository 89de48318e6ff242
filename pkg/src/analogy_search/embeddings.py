"""Token-embedding table, bag-of-embeddings aggregation, cosine geometry.

Vectors are float64 NumPy arrays of a fixed dimension. Aggregation of a
token list is the unweighted arithmetic mean over in-vocabulary tokens
(repeats count repeatedly); out-of-vocabulary tokens are skipped, and a
list with no in-vocabulary token aggregates to "absent" (None). Aspect
vectors are L2-normalized before indexing, so cosine similarity between
indexed vectors reduces to a dot product.
"""

from __future__ import annotations

from typing import IO, Iterable, Optional

import numpy as np

from .errors import DegenerateVectorError, DimensionMismatchError, EmbeddingFormatError

# Norms at or below this are treated as zero vectors (degenerate inputs).
EPS_NORM = 1e-12


class EmbeddingTable:
    """Immutable token -> vector map with a fixed dimension."""

    def __init__(self, entries: dict[str, np.ndarray], dim: int):
        self.dim = int(dim)
        self._entries = entries

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def lookup(self, token: str) -> Optional[np.ndarray]:
        """Exact-match lookup; returns None for out-of-vocabulary tokens."""
        return self._entries.get(token)

    def tokens(self) -> Iterable[str]:
        return self._entries.keys()


def load_embedding_table(source: IO[str], expected_dim: int | None = None) -> EmbeddingTable:
    """Parse a GloVe-style text stream: one `token v1 ... vd` per line.

    The dimension is inferred from the first line unless `expected_dim` is
    given. Later duplicate tokens overwrite earlier ones. Raises
    EmbeddingFormatError (naming the line) on dimension mismatch, a
    non-numeric or non-finite coordinate, or an empty stream.
    """
    entries: dict[str, np.ndarray] = {}
    dim = expected_dim
    for lineno, raw in enumerate(source, start=1):
        parts = raw.split()
        if not parts:
            continue  # blank line
        token, coords = parts[0], parts[1:]
        if not coords:
            raise EmbeddingFormatError(f"line {lineno}: token {token!r} has no coordinates")
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise EmbeddingFormatError(
                f"line {lineno}: expected {dim} coordinates, got {len(coords)}"
            )
        try:
            vec = np.array([float(c) for c in coords], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFormatError(f"line {lineno}: non-numeric coordinate ({exc})") from exc
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"line {lineno}: non-finite coordinate")
        entries[token] = vec
    if not entries:
        raise EmbeddingFormatError("empty embedding stream")
    assert dim is not None
    return EmbeddingTable(entries, dim)


def aggregate_tokens(table: EmbeddingTable, tokens: list[str]) -> Optional[np.ndarray]:
    """Mean of the vectors of all in-vocabulary tokens; None if there are none."""
    acc = np.zeros(table.dim, dtype=np.float64)
    hits = 0
    for token in tokens:
        vec = table.lookup(token)
        if vec is None:
            continue
        acc += vec
        hits += 1
    if hits == 0:
        return None
    return acc / hits


def l2_normalize(v: np.ndarray) -> tuple[np.ndarray, bool]:
    """Scale `v` to unit Euclidean norm.

    Returns (unit_vector, False) normally. A zero / near-zero input
    (norm <= EPS_NORM) cannot be normalized: returns (zero_vector, True)
    and callers typically treat that as an absent aspect.
    """
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm <= EPS_NORM:
        return np.zeros_like(v), True
    return v / norm, False


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between `a` and `b`, clamped to [-1, 1].

    Raises DimensionMismatchError on unequal lengths and
    DegenerateVectorError if either operand has near-zero norm (callers
    must filter absent aspects before comparing).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cosine of {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na <= EPS_NORM or nb <= EPS_NORM:
        raise DegenerateVectorError("cosine of a zero / near-zero vector")
    return float(np.clip(float(a @ b) / (na * nb), -1.0, 1.0))


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cosine_similarity; the only distance used for ranking."""
    return 1.0 - cosine_similarity(a, b)
