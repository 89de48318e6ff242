"""Plain BM25 over token bags, the lexical baseline the analogical
algorithms are compared against.

Uses the non-negative idf variant ln(1 + (N - df + 0.5)/(df + 0.5)) so
terms present in most documents degrade to ~0 instead of going negative.
"""

from __future__ import annotations

import math
from collections import Counter

K1 = 1.2
B = 0.75


class Bm25Scorer:
    """Index a fixed set of token bags once, score query bags repeatedly."""

    def __init__(self, docs: dict[str, list[str]], k1: float = K1, b: float = B):
        self.k1 = k1
        self.b = b
        self.doc_ids = list(docs)
        self._tf: dict[str, Counter[str]] = {d: Counter(toks) for d, toks in docs.items()}
        self._len = {d: len(toks) for d, toks in docs.items()}
        n_docs = len(docs)
        self._avgdl = (sum(self._len.values()) / n_docs) if n_docs else 0.0
        df: Counter[str] = Counter()
        for tf in self._tf.values():
            df.update(tf.keys())
        self._idf = {
            t: math.log(1.0 + (n_docs - d + 0.5) / (d + 0.5)) for t, d in df.items()
        }

    def score_one(self, doc_id: str, query_tokens: list[str]) -> float:
        tf = self._tf[doc_id]
        norm = self.k1 * (1.0 - self.b + self.b * self._len[doc_id] / self._avgdl)
        total = 0.0
        for tok in query_tokens:  # repeated query tokens score repeatedly
            f = tf.get(tok, 0)
            if f:
                total += self._idf[tok] * f * (self.k1 + 1.0) / (f + norm)
        return total

    def score_all(self, query_tokens: list[str]) -> dict[str, float]:
        return {d: self.score_one(d, query_tokens) for d in self.doc_ids}
