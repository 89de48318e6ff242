"""Evaluation instruments: the top/bottom probe study with its
effectiveness score, blind interleaving for A/B comparison, and the
append-log vote store the aggregate report is built from.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import CorpusIndex
from .errors import EvaluationError, UnknownPaperError
from .ranking import RankedList


class Engine(str, Enum):
    ES = "ES"  # lexical baseline
    AS = "AS"  # analogical search


class Usefulness(str, Enum):
    USEFUL = "useful"
    MAYBE_USEFUL = "maybe_useful"
    NOT_USEFUL = "not_useful"


class Interestingness(str, Enum):
    INTERESTING = "interesting"
    MAYBE_INTERESTING = "maybe_interesting"
    NOT_INTERESTING = "not_interesting"


class Position(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"


# --- token effectiveness score ------------------------------------------


@dataclass(frozen=True)
class TesInput:
    """Majority-vote tallies of one probe run."""

    alpha: int  # correct majority votes
    beta: int  # incorrect majority votes
    n: int  # probe size

    def __post_init__(self):
        if min(self.alpha, self.beta, self.n) < 0:
            raise EvaluationError("tallies must be nonnegative")
        if self.alpha + self.beta > self.n:
            raise EvaluationError(f"alpha + beta = {self.alpha + self.beta} exceeds n = {self.n}")


def tes_score(tes_input: TesInput) -> float:
    """(alpha - beta) / n, in [-1, 1]."""
    if tes_input.n == 0:
        raise EvaluationError("probe size n must be positive")
    return (tes_input.alpha - tes_input.beta) / tes_input.n


@dataclass
class ProbeItem:
    paper_id: str
    true_position: Position
    user_votes: list[Position] = field(default_factory=list)


def majority_vote_correctness(item: ProbeItem) -> bool:
    """True when a strict majority matches the true position.

    Exact ties count as incorrect: with an even voter count nobody gets
    credit for a coin flip.
    """
    if not item.user_votes:
        raise EvaluationError(f"probe item {item.paper_id!r} has no votes")
    agree = sum(1 for v in item.user_votes if v == item.true_position)
    return 2 * agree > len(item.user_votes)


def build_top_bottom_probe(
    full_ranking: RankedList, top_n: int = 20, bottom_n: int = 20, *, seed: int
) -> list[ProbeItem]:
    """Probe items from the head and tail of a ranking, order shuffled.

    Voters see a shuffled mix so position in the returned list carries no
    information about where an item truly came from.
    """
    if len(full_ranking) < top_n + bottom_n:
        raise EvaluationError(
            f"ranking of {len(full_ranking)} too short for top {top_n} + bottom {bottom_n}"
        )
    items = [ProbeItem(p.paper_id, Position.TOP) for p in full_ranking[:top_n]]
    if bottom_n:
        items += [ProbeItem(p.paper_id, Position.BOTTOM) for p in full_ranking[-bottom_n:]]
    rng = np.random.default_rng(seed)
    return [items[i] for i in rng.permutation(len(items))]


# --- interleaving ---------------------------------------------------------


def interleave_results(
    list_a: RankedList,
    list_b: RankedList,
    seed: int,
    tag_a: Engine = Engine.ES,
    tag_b: Engine = Engine.AS,
) -> list[tuple[str, Engine]]:
    """Randomly merge two rankings, tagging each paper with its source.

    Each draw picks a side with probability proportional to how many of
    its items remain, so a short list is not crowded out. Within-list
    order survives. A paper both engines returned shows up once, under
    whichever side drew it first.
    """
    rng = np.random.default_rng(seed)
    a_ids = [p.paper_id for p in list_a]
    b_ids = [p.paper_id for p in list_b]
    ia = ib = 0
    out: list[tuple[str, Engine]] = []
    seen: set[str] = set()
    while ia < len(a_ids) or ib < len(b_ids):
        remaining_a = len(a_ids) - ia
        remaining_b = len(b_ids) - ib
        if remaining_a and remaining_b:
            take_a = rng.random() < remaining_a / (remaining_a + remaining_b)
        else:
            take_a = remaining_a > 0
        if take_a:
            pid, tag = a_ids[ia], tag_a
            ia += 1
        else:
            pid, tag = b_ids[ib], tag_b
            ib += 1
        if pid not in seen:
            seen.add(pid)
            out.append((pid, tag))
    return out


# --- vote store -----------------------------------------------------------


@dataclass(frozen=True)
class EvalDataPoint:
    """One judgment of one returned paper against one seed paper."""

    test_id: int
    seed_paper_id: str
    engine: Engine
    result_paper_id: str
    if_useful: Usefulness
    if_interesting: Interestingness
    user_id: str
    useful_comment: str = ""
    interesting_comment: str = ""

    def key(self) -> tuple[str, int, str]:
        """Identity for the overwrite rule: one vote per user/test/paper."""
        return (self.user_id, self.test_id, self.result_paper_id)


class VoteStore:
    """Append-only vote log, one record per line.

    Re-votes append too; replay keeps the last record per
    (user, test, result paper). Every append is flushed and fsynced so a
    crash loses at most the vote being written.
    """

    def __init__(self, path: str, index: CorpusIndex):
        self.path = path
        self.index = index
        self._write_lock = threading.Lock()

    def record_vote(self, point: EvalDataPoint, timestamp: float) -> None:
        for pid in (point.seed_paper_id, point.result_paper_id):
            if pid not in self.index:
                raise UnknownPaperError(f"vote references unknown paper {pid!r}")
        row = {
            "test_id": point.test_id,
            "seed_paper_id": point.seed_paper_id,
            "seed_paper_name": self.index.record(point.seed_paper_id).title,
            "SE": point.engine.value,
            "paper_id": point.result_paper_id,
            "paper_name": self.index.record(point.result_paper_id).title,
            "if_useful": point.if_useful.value,
            "useful_comment": point.useful_comment,
            "if_interesting": point.if_interesting.value,
            "interesting_comment": point.interesting_comment,
            "user_id": point.user_id,
            "timestamp": timestamp,
        }
        # one writer at a time; concurrent voters must not interleave lines
        with self._write_lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(row, ensure_ascii=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def load_points(self) -> list[EvalDataPoint]:
        """Replay the log; later votes replace earlier ones with the same key."""
        latest: dict[tuple[str, int, str], EvalDataPoint] = {}
        if not os.path.exists(self.path):
            return []
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                    point = EvalDataPoint(
                        test_id=int(row["test_id"]),
                        seed_paper_id=row["seed_paper_id"],
                        engine=Engine(row["SE"]),
                        result_paper_id=row["paper_id"],
                        if_useful=Usefulness(row["if_useful"]),
                        if_interesting=Interestingness(row["if_interesting"]),
                        user_id=row["user_id"],
                        useful_comment=row.get("useful_comment", ""),
                        interesting_comment=row.get("interesting_comment", ""),
                    )
                except (KeyError, ValueError, json.JSONDecodeError) as exc:
                    raise EvaluationError(f"vote log line {lineno} is corrupt: {exc}") from exc
                latest[point.key()] = point
        return list(latest.values())


# --- aggregation ----------------------------------------------------------


def percentage_change(as_value: float, es_value: float) -> float:
    """100 * (AS - ES) / ES, unrounded."""
    if es_value == 0:
        raise EvaluationError("percentage change against a zero base is undefined")
    return 100.0 * (as_value - es_value) / es_value


def change_for_display(raw: float) -> int:
    """Integer percent for the report tables, truncated toward zero."""
    return math.trunc(raw)


@dataclass
class EngineBreakdown:
    total: int
    usefulness_counts: dict[str, int]
    usefulness_pct: dict[str, float]  # one decimal
    interestingness_counts: dict[str, int]
    interestingness_pct: dict[str, float]


@dataclass
class AggregateReport:
    engines: dict[str, EngineBreakdown]
    usefulness_change: Optional[dict[str, int]]  # display-rounded, per category
    interestingness_change: Optional[dict[str, int]]
    usefulness_change_raw: Optional[dict[str, float]]
    interestingness_change_raw: Optional[dict[str, float]]


def _breakdown(points: Sequence[EvalDataPoint]) -> EngineBreakdown:
    total = len(points)
    useful = {u.value: 0 for u in Usefulness}
    interesting = {i.value: 0 for i in Interestingness}
    for p in points:
        useful[p.if_useful.value] += 1
        interesting[p.if_interesting.value] += 1
    return EngineBreakdown(
        total=total,
        usefulness_counts=useful,
        usefulness_pct={k: round(100.0 * v / total, 1) for k, v in useful.items()},
        interestingness_counts=interesting,
        interestingness_pct={k: round(100.0 * v / total, 1) for k, v in interesting.items()},
    )


def aggregate_votes(points: Iterable[EvalDataPoint]) -> AggregateReport:
    """Per-engine category percentages plus AS-vs-ES percentage changes.

    Changes are computed from the one-decimal percentages, the same
    numbers the report displays. An engine nobody voted on is left out
    and the changes are omitted with it.
    """
    points = list(points)
    if not points:
        raise EvaluationError("cannot aggregate zero votes")
    engines = {
        engine.value: _breakdown(pts)
        for engine in Engine
        if (pts := [p for p in points if p.engine is engine])
    }
    changes: dict[str, Optional[dict]] = {
        "usefulness": None, "interestingness": None,
        "usefulness_raw": None, "interestingness_raw": None,
    }
    if Engine.ES.value in engines and Engine.AS.value in engines:
        es, as_ = engines[Engine.ES.value], engines[Engine.AS.value]
        for dim, es_pct, as_pct in (
            ("usefulness", es.usefulness_pct, as_.usefulness_pct),
            ("interestingness", es.interestingness_pct, as_.interestingness_pct),
        ):
            raw = {
                cat: percentage_change(as_pct[cat], es_pct[cat])
                for cat in es_pct
                if es_pct[cat] != 0  # zero base: that category's change is absent
            }
            changes[f"{dim}_raw"] = raw
            changes[dim] = {cat: change_for_display(v) for cat, v in raw.items()}
    return AggregateReport(
        engines=engines,
        usefulness_change=changes["usefulness"],
        interestingness_change=changes["interestingness"],
        usefulness_change_raw=changes["usefulness_raw"],
        interestingness_change_raw=changes["interestingness_raw"],
    )


def report_to_dict(report: AggregateReport) -> dict:
    """JSON-ready form of an AggregateReport."""
    return {
        "engines": {
            name: {
                "total": b.total,
                "usefulness_counts": b.usefulness_counts,
                "usefulness_pct": b.usefulness_pct,
                "interestingness_counts": b.interestingness_counts,
                "interestingness_pct": b.interestingness_pct,
            }
            for name, b in report.engines.items()
        },
        "usefulness_change": report.usefulness_change,
        "interestingness_change": report.interestingness_change,
        "usefulness_change_raw": report.usefulness_change_raw,
        "interestingness_change_raw": report.interestingness_change_raw,
    }
