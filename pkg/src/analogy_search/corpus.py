"""Corpus ingestion, per-aspect vectorization, and the on-disk index.

A corpus file is JSON Lines: one record per line with `paper_id` and
`title` (strings, required), `abstract_tokens` (required, non-empty), and
optional token arrays `background_tokens`, `big_problem_tokens`,
`problem_tokens`, `mechanism_tokens`, `method_tokens`, `findings_tokens`,
plus an optional `raw_abstract` display string. Empty optional arrays are
treated as absent aspects. Tokens are lowercased at ingestion; embedding
lookup stays case-sensitive, so this is the single normalization point.

The index file is a small binary container (see save_index) holding the
records, the dedup map and the exact float64 bits of every aspect vector;
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Optional

import numpy as np

from .embeddings import EmbeddingTable, aggregate_tokens, l2_normalize
from .errors import CorpusFormatError, IndexFormatError, UnknownPaperError

INDEX_MAGIC = b"ASEIDX"
INDEX_VERSION = 1


class Aspect(str, Enum):
    """The seven functional units an abstract is segmented into."""

    FULL_ABSTRACT = "full_abstract"
    BACKGROUND = "background"
    BIG_PROBLEM = "big_problem"
    PROBLEM = "problem"
    MECHANISM = "mechanism"
    METHOD = "method"
    FINDINGS = "findings"


# Corpus-file key -> aspect. Key names follow the dataset column names.
ASPECT_FILE_KEYS: dict[str, Aspect] = {
    "abstract_tokens": Aspect.FULL_ABSTRACT,
    "background_tokens": Aspect.BACKGROUND,
    "big_problem_tokens": Aspect.BIG_PROBLEM,
    "problem_tokens": Aspect.PROBLEM,
    "mechanism_tokens": Aspect.MECHANISM,
    "method_tokens": Aspect.METHOD,
    "findings_tokens": Aspect.FINDINGS,
}

_KNOWN_RECORD_KEYS = {"paper_id", "title", "raw_abstract", *ASPECT_FILE_KEYS}


def resolve_aspect(name: str, purpose_aspect: Aspect = Aspect.PROBLEM) -> Aspect:
    """Map an aspect name to an Aspect; `purpose` is an alias.

    The dataset labels the same functional unit as purpose, problem or
    big_problem in different places; `purpose_aspect` picks which concrete
    aspect the alias resolves to (Problem by default).
    """
    key = name.strip().lower()
    if key == "purpose":
        return purpose_aspect
    try:
        return Aspect(key)
    except ValueError:
        raise CorpusFormatError(f"unknown aspect {name!r}") from None


@dataclass
class PaperRecord:
    """One segmented abstract: per-aspect token lists (some absent)."""

    paper_id: str
    title: str
    tokens: dict[Aspect, list[str]]
    raw_abstract: Optional[str] = None

    def total_tokens(self) -> int:
        return sum(len(t) for t in self.tokens.values())


@dataclass
class DedupReport:
    """Which records were dropped for sharing a canonical title."""

    pairs: list[tuple[str, str]] = field(default_factory=list)  # (dropped_id, retained_id)

    def __len__(self) -> int:
        return len(self.pairs)


# paper_id -> aspect -> unit-norm vector (absent aspects are simply missing)
AspectVectors = dict[str, dict[Aspect, np.ndarray]]


class CorpusIndex:
    """Immutable queryable corpus: records + unit-norm aspect vectors."""

    def __init__(
        self,
        records: list[PaperRecord],
        vectors: AspectVectors,
        dedup_map: dict[str, str],
        dim: int,
    ):
        if set(vectors) != {r.paper_id for r in records}:
            raise IndexFormatError("records and vectors cover different paper_id sets")
        self.records = records
        self.vectors = vectors
        self.dedup_map = dedup_map
        self.dim = int(dim)
        self._by_id = {r.paper_id: r for r in records}
        self._matrices: dict[Aspect, tuple[list[str], np.ndarray]] = {}

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._by_id

    def ids(self) -> list[str]:
        return [r.paper_id for r in self.records]

    def record(self, paper_id: str) -> PaperRecord:
        try:
            return self._by_id[paper_id]
        except KeyError:
            raise UnknownPaperError(f"unknown paper id {paper_id!r}") from None

    def vector(self, paper_id: str, aspect: Aspect) -> Optional[np.ndarray]:
        if paper_id not in self._by_id:
            raise UnknownPaperError(f"unknown paper id {paper_id!r}")
        return self.vectors[paper_id].get(aspect)

    def aspect_matrix(self, aspect: Aspect) -> tuple[list[str], np.ndarray]:
        """(ids, row matrix) of all papers possessing `aspect`, in record order."""
        cached = self._matrices.get(aspect)
        if cached is None:
            ids = [r.paper_id for r in self.records if aspect in self.vectors[r.paper_id]]
            if ids:
                mat = np.ascontiguousarray([self.vectors[p][aspect] for p in ids])
            else:
                mat = np.zeros((0, self.dim), dtype=np.float64)
            cached = (ids, mat)
            self._matrices[aspect] = cached
        return cached

    def aspect_coverage(self) -> dict[Aspect, int]:
        """How many papers carry a vector for each aspect."""
        return {a: len(self.aspect_matrix(a)[0]) for a in Aspect}


def _parse_token_list(value: object, key: str, where: str) -> list[str]:
    if not isinstance(value, list) or any(not isinstance(t, str) for t in value):
        raise CorpusFormatError(f"{where}: field {key!r} must be an array of strings")
    return [t.lower() for t in value]


def ingest_corpus(source: IO[str]) -> list[PaperRecord]:
    """Parse a JSONL corpus stream into PaperRecords.

    Rejects duplicate or missing paper ids, unknown `*_tokens` keys and
    records without abstract tokens. Token order is preserved; all tokens
    are lowercased here.
    """
    records: list[PaperRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        where = f"record at line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{where}: invalid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise CorpusFormatError(f"{where}: expected an object")

        for key in obj:
            if key.endswith("_tokens") and key not in ASPECT_FILE_KEYS:
                raise CorpusFormatError(f"{where}: unknown aspect key {key!r}")

        paper_id = obj.get("paper_id")
        if not isinstance(paper_id, str) or not paper_id:
            raise CorpusFormatError(f"{where}: missing paper_id")
        where = f"record {paper_id!r} (line {lineno})"
        if paper_id in seen:
            raise CorpusFormatError(f"{where}: duplicate paper_id")
        seen.add(paper_id)

        title = obj.get("title")
        if not isinstance(title, str) or not title:
            raise CorpusFormatError(f"{where}: missing title")

        tokens: dict[Aspect, list[str]] = {}
        for key, aspect in ASPECT_FILE_KEYS.items():
            if key not in obj:
                continue
            toks = _parse_token_list(obj[key], key, where)
            if toks:  # empty arrays mean "aspect absent"
                tokens[aspect] = toks
        if Aspect.FULL_ABSTRACT not in tokens:
            raise CorpusFormatError(f"{where}: missing abstract_tokens")

        raw_abstract = obj.get("raw_abstract")
        if raw_abstract is not None and not isinstance(raw_abstract, str):
            raise CorpusFormatError(f"{where}: raw_abstract must be a string")

        records.append(PaperRecord(paper_id, title, tokens, raw_abstract))
    return records


_PUNCT_RE = re.compile(r"[^\w\s]")


def canonical_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return " ".join(_PUNCT_RE.sub(" ", title.lower()).split())


def deduplicate(records: list[PaperRecord]) -> tuple[list[PaperRecord], DedupReport]:
    """Drop records whose canonical title collides with a better copy.

    The same paper can appear under different external ids; per colliding
    title the record with the largest total token count is retained (ties
    go to the smallest paper_id). Record order is otherwise preserved.
    """
    by_title: dict[str, list[PaperRecord]] = {}
    for rec in records:
        by_title.setdefault(canonical_title(rec.title), []).append(rec)

    retained_ids: dict[str, str] = {}  # canonical title -> retained paper_id
    for title, group in by_title.items():
        best = min(group, key=lambda r: (-r.total_tokens(), r.paper_id))
        retained_ids[title] = best.paper_id

    kept: list[PaperRecord] = []
    report = DedupReport()
    for rec in records:
        winner = retained_ids[canonical_title(rec.title)]
        if rec.paper_id == winner:
            kept.append(rec)
        else:
            report.pairs.append((rec.paper_id, winner))
    return kept, report


def vectorize_corpus(records: list[PaperRecord], table: EmbeddingTable) -> AspectVectors:
    """Mean-aggregate and L2-normalize each present aspect of each record.

    Aspects whose tokens are all out-of-vocabulary (or whose mean is
    degenerate) come out absent, exactly like aspects with no tokens.
    """
    vectors: AspectVectors = {}
    for rec in records:
        per_aspect: dict[Aspect, np.ndarray] = {}
        for aspect, toks in rec.tokens.items():
            agg = aggregate_tokens(table, toks)
            if agg is None:
                continue
            unit, degenerate = l2_normalize(agg)
            if degenerate:
                continue
            per_aspect[aspect] = unit
        vectors[rec.paper_id] = per_aspect
    return vectors


def build_index(
    records: list[PaperRecord], table: EmbeddingTable
) -> tuple[CorpusIndex, DedupReport]:
    """dedup -> vectorize -> CorpusIndex."""
    kept, report = deduplicate(records)
    vectors = vectorize_corpus(kept, table)
    dedup_map = {canonical_title(r.title): r.paper_id for r in kept}
    return CorpusIndex(kept, vectors, dedup_map, table.dim), report


# --- index file format -------------------------------------------------
#
#   bytes 0..5   magic  b"ASEIDX"
#   bytes 6..7   format version, uint16 little-endian
#   bytes 8..11  header length H, uint32 little-endian
#   H bytes      canonical JSON header (sorted keys, compact):
#                  dim, dedup_map, records (paper_id/title/raw_abstract/
#                  tokens keyed by aspect value), vector_aspects
#                  (paper_id -> list of aspect values with vectors)
#   rest         float64 little-endian vector payload, one dim-length
#                  block per (record order x listed aspect order)


def save_index(index: CorpusIndex, sink: IO[bytes]) -> None:
    """Write the versioned binary index; deterministic for equal inputs."""
    header = {
        "dim": index.dim,
        "dedup_map": index.dedup_map,
        "records": [
            {
                "paper_id": r.paper_id,
                "title": r.title,
                "raw_abstract": r.raw_abstract,
                "tokens": {a.value: t for a, t in r.tokens.items()},
            }
            for r in index.records
        ],
        "vector_aspects": {
            r.paper_id: [a.value for a in Aspect if a in index.vectors[r.paper_id]]
            for r in index.records
        },
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    payload = blob.encode("ascii")
    sink.write(INDEX_MAGIC)
    sink.write(struct.pack("<H", INDEX_VERSION))
    sink.write(struct.pack("<I", len(payload)))
    sink.write(payload)
    for rec in index.records:
        for aspect_name in header["vector_aspects"][rec.paper_id]:
            vec = index.vectors[rec.paper_id][Aspect(aspect_name)]
            sink.write(np.asarray(vec, dtype="<f8").tobytes())


def load_index(source: IO[bytes]) -> CorpusIndex:
    """Read an index written by save_index; errors on any other stream."""
    magic = source.read(len(INDEX_MAGIC))
    if magic != INDEX_MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    raw_version = source.read(2)
    if len(raw_version) != 2:
        raise IndexFormatError("truncated index header")
    (version,) = struct.unpack("<H", raw_version)
    if version != INDEX_VERSION:
        raise IndexFormatError(f"unsupported index version {version} (expected {INDEX_VERSION})")
    raw_len = source.read(4)
    if len(raw_len) != 4:
        raise IndexFormatError("truncated index header")
    (header_len,) = struct.unpack("<I", raw_len)
    payload = source.read(header_len)
    if len(payload) != header_len:
        raise IndexFormatError("truncated index header")
    try:
        header = json.loads(payload.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IndexFormatError(f"corrupt index header ({exc})") from exc

    dim = int(header["dim"])
    records = [
        PaperRecord(
            paper_id=obj["paper_id"],
            title=obj["title"],
            tokens={Aspect(k): v for k, v in obj["tokens"].items()},
            raw_abstract=obj.get("raw_abstract"),
        )
        for obj in header["records"]
    ]
    block = 8 * dim
    vectors: AspectVectors = {}
    for rec in records:
        per_aspect: dict[Aspect, np.ndarray] = {}
        for aspect_name in header["vector_aspects"][rec.paper_id]:
            raw = source.read(block)
            if len(raw) != block:
                raise IndexFormatError("truncated vector payload")
            per_aspect[Aspect(aspect_name)] = np.frombuffer(raw, dtype="<f8").astype(np.float64)
        vectors[rec.paper_id] = per_aspect
    if source.read(1):
        raise IndexFormatError("trailing bytes after vector payload")
    return CorpusIndex(records, vectors, header["dedup_map"], dim)


def load_index_file(path: str) -> CorpusIndex:
    with open(path, "rb") as fh:
        return load_index(fh)


def iter_segments(record: PaperRecord) -> Iterable[tuple[Aspect, str]]:
    """(aspect, display text) pairs for every present aspect of a record."""
    for aspect, toks in record.tokens.items():
        yield aspect, " ".join(toks)
