import io
import json

import numpy as np
import pytest

from analogy_search.corpus import (
    Aspect,
    CorpusIndex,
    build_index,
    canonical_title,
    deduplicate,
    ingest_corpus,
    load_index,
    resolve_aspect,
    save_index,
    vectorize_corpus,
)
from analogy_search.embeddings import load_embedding_table
from analogy_search.errors import CorpusFormatError, IndexFormatError, UnknownPaperError

EMB = """\
alpha 1.0 0.0 0.0 0.0
beta 0.0 1.0 0.0 0.0
gamma 0.0 0.0 1.0 0.0
delta 0.0 0.0 0.0 1.0
"""


def make_line(paper_id, title, abstract=("alpha", "beta"), **extra):
    obj = {"paper_id": paper_id, "title": title, "abstract_tokens": list(abstract)}
    obj.update(extra)
    return json.dumps(obj)


def ingest(*lines):
    return ingest_corpus(io.StringIO("\n".join(lines) + "\n"))


@pytest.fixture
def table():
    return load_embedding_table(io.StringIO(EMB))


class TestResolveAspect:
    def test_concrete_names(self):
        assert resolve_aspect("mechanism") is Aspect.MECHANISM
        assert resolve_aspect("Full_Abstract") is Aspect.FULL_ABSTRACT

    def test_purpose_alias_default(self):
        assert resolve_aspect("purpose") is Aspect.PROBLEM

    def test_purpose_alias_configurable(self):
        assert resolve_aspect("purpose", purpose_aspect=Aspect.BIG_PROBLEM) is Aspect.BIG_PROBLEM

    def test_unknown_name(self):
        with pytest.raises(CorpusFormatError, match="solution"):
            resolve_aspect("solution")


class TestIngest:
    def test_basic_record(self):
        (rec,) = ingest(make_line("p1", "A Title", mechanism_tokens=["Gamma"]))
        assert rec.paper_id == "p1"
        assert rec.tokens[Aspect.FULL_ABSTRACT] == ["alpha", "beta"]
        # tokens are lowercased at ingestion
        assert rec.tokens[Aspect.MECHANISM] == ["gamma"]

    def test_empty_optional_array_is_absent(self):
        (rec,) = ingest(make_line("p1", "T", method_tokens=[]))
        assert Aspect.METHOD not in rec.tokens

    def test_blank_lines_skipped(self):
        recs = ingest(make_line("p1", "T"), "", make_line("p2", "U"))
        assert [r.paper_id for r in recs] == ["p1", "p2"]

    def test_raw_abstract_kept(self):
        (rec,) = ingest(make_line("p1", "T", raw_abstract="Alpha beta."))
        assert rec.raw_abstract == "Alpha beta."

    def test_unknown_fields_ignored(self):
        (rec,) = ingest(make_line("p1", "T", venue="x", year=2020))
        assert rec.paper_id == "p1"

    def test_unknown_tokens_key_rejected(self):
        with pytest.raises(CorpusFormatError, match="purpose_tokens"):
            ingest(make_line("p1", "T", purpose_tokens=["alpha"]))

    def test_missing_abstract_tokens(self):
        with pytest.raises(CorpusFormatError, match="abstract_tokens"):
            ingest(json.dumps({"paper_id": "p1", "title": "T"}))

    def test_empty_abstract_tokens(self):
        with pytest.raises(CorpusFormatError, match="abstract_tokens"):
            ingest(make_line("p1", "T", abstract=()))

    def test_missing_paper_id(self):
        with pytest.raises(CorpusFormatError, match="line 1"):
            ingest(json.dumps({"title": "T", "abstract_tokens": ["alpha"]}))

    def test_duplicate_paper_id_named(self):
        with pytest.raises(CorpusFormatError, match="'p1'"):
            ingest(make_line("p1", "T"), make_line("p1", "U"))

    def test_missing_title(self):
        with pytest.raises(CorpusFormatError, match="title"):
            ingest(json.dumps({"paper_id": "p1", "abstract_tokens": ["alpha"]}))

    def test_invalid_json_names_line(self):
        with pytest.raises(CorpusFormatError, match="line 2"):
            ingest(make_line("p1", "T"), "{nope")

    def test_non_string_token(self):
        with pytest.raises(CorpusFormatError, match="abstract_tokens"):
            ingest(json.dumps({"paper_id": "p1", "title": "T", "abstract_tokens": [1]}))


class TestCanonicalTitle:
    def test_case_punct_whitespace(self):
        assert canonical_title("  The CAT, sat!  ") == canonical_title("the cat sat")

    def test_hyphen_treated_as_separator(self):
        assert canonical_title("self-supervised") == canonical_title("Self Supervised")


class TestDeduplicate:
    def test_no_collisions_identity(self):
        recs = ingest(make_line("p1", "A"), make_line("p2", "B"))
        kept, report = deduplicate(recs)
        assert kept == recs
        assert len(report) == 0

    def test_larger_token_count_retained(self):
        recs = ingest(
            make_line("p1", "Same Title", abstract=("alpha",)),
            make_line("p2", "same title!", abstract=("alpha", "beta", "gamma")),
        )
        kept, report = deduplicate(recs)
        assert [r.paper_id for r in kept] == ["p2"]
        assert report.pairs == [("p1", "p2")]

    def test_tie_goes_to_smaller_id(self):
        recs = ingest(
            make_line("p9", "T T", abstract=("alpha", "beta")),
            make_line("p2", "t t", abstract=("gamma", "delta")),
        )
        kept, _ = deduplicate(recs)
        assert [r.paper_id for r in kept] == ["p2"]

    def test_three_way_collision(self):
        recs = ingest(
            make_line("a", "X", abstract=("alpha",)),
            make_line("b", "x", abstract=("alpha", "beta"), method_tokens=["gamma"]),
            make_line("c", "X!", abstract=("alpha", "beta")),
        )
        kept, report = deduplicate(recs)
        assert [r.paper_id for r in kept] == ["b"]
        assert sorted(report.pairs) == [("a", "b"), ("c", "b")]

    def test_random_groups_match_pairwise_domination(self):
        # oracle: a record survives iff no same-title record beats it on
        # (token count, then smaller id)
        rng = np.random.default_rng(42)
        for trial in range(30):
            lines = []
            for i in range(rng.integers(2, 12)):
                title = f"title {rng.integers(0, 4)}"
                count = int(rng.integers(1, 6))
                lines.append(make_line(f"p{i:02d}", title, abstract=["alpha"] * count))
            recs = ingest(*lines)
            kept, _ = deduplicate(recs)

            survivors = set()
            for r in recs:
                beaten = any(
                    canonical_title(o.title) == canonical_title(r.title)
                    and o.paper_id != r.paper_id
                    and (
                        o.total_tokens() > r.total_tokens()
                        or (o.total_tokens() == r.total_tokens() and o.paper_id < r.paper_id)
                    )
                    for o in recs
                )
                if not beaten:
                    survivors.add(r.paper_id)
            assert {r.paper_id for r in kept} == survivors, f"trial {trial}"

    def test_order_preserved(self):
        recs = ingest(make_line("z", "A"), make_line("a", "B"), make_line("m", "C"))
        kept, _ = deduplicate(recs)
        assert [r.paper_id for r in kept] == ["z", "a", "m"]


class TestVectorize:
    def test_hand_computed_vector(self, table):
        recs = ingest(make_line("p1", "T", abstract=("alpha", "beta")))
        vecs = vectorize_corpus(recs, table)
        v = vecs["p1"][Aspect.FULL_ABSTRACT]
        # mean of e1,e2 normalized -> (1,1,0,0)/sqrt(2)
        np.testing.assert_allclose(v, [2**-0.5, 2**-0.5, 0.0, 0.0])

    def test_all_oov_aspect_absent(self, table):
        recs = ingest(make_line("p1", "T", mechanism_tokens=["zzz", "yyy"]))
        vecs = vectorize_corpus(recs, table)
        assert Aspect.MECHANISM not in vecs["p1"]
        assert Aspect.FULL_ABSTRACT in vecs["p1"]

    def test_unit_norm_everywhere(self, table):
        recs = ingest(
            make_line("p1", "T", findings_tokens=["gamma", "delta", "alpha"]),
            make_line("p2", "U", abstract=("beta", "beta")),
        )
        vecs = vectorize_corpus(recs, table)
        for per_aspect in vecs.values():
            for v in per_aspect.values():
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


class TestCorpusIndex:
    def build(self, table):
        recs = ingest(
            make_line("p1", "One", mechanism_tokens=["gamma"]),
            make_line("p2", "Two"),
            make_line("p3", "Three", mechanism_tokens=["delta"]),
        )
        index, _ = build_index(recs, table)
        return index

    def test_record_lookup(self, table):
        index = self.build(table)
        assert index.record("p2").title == "Two"
        with pytest.raises(UnknownPaperError):
            index.record("nope")

    def test_vector_lookup(self, table):
        index = self.build(table)
        assert index.vector("p2", Aspect.MECHANISM) is None
        assert index.vector("p1", Aspect.MECHANISM) is not None
        with pytest.raises(UnknownPaperError):
            index.vector("nope", Aspect.MECHANISM)

    def test_aspect_matrix_order_and_shape(self, table):
        index = self.build(table)
        ids, mat = index.aspect_matrix(Aspect.MECHANISM)
        assert ids == ["p1", "p3"]
        assert mat.shape == (2, 4)
        assert mat.flags["C_CONTIGUOUS"]
        np.testing.assert_allclose(mat[0], index.vector("p1", Aspect.MECHANISM))

    def test_aspect_matrix_empty(self, table):
        index = self.build(table)
        ids, mat = index.aspect_matrix(Aspect.FINDINGS)
        assert ids == []
        assert mat.shape == (0, 4)

    def test_coverage(self, table):
        index = self.build(table)
        cov = index.aspect_coverage()
        assert cov[Aspect.FULL_ABSTRACT] == 3
        assert cov[Aspect.MECHANISM] == 2
        assert cov[Aspect.BACKGROUND] == 0


class TestIndexFile:
    def lines(self):
        return [
            make_line("p1", "One", mechanism_tokens=["gamma"], raw_abstract="Alpha beta."),
            make_line("p2", "Two", findings_tokens=["delta", "alpha"]),
            make_line("p2b", "two!", abstract=("alpha",)),  # dedup casualty
        ]

    def build_bytes(self):
        table = load_embedding_table(io.StringIO(EMB))
        index, _ = build_index(ingest(*self.lines()), table)
        buf = io.BytesIO()
        save_index(index, buf)
        return index, buf.getvalue()

    def test_roundtrip(self):
        index, blob = self.build_bytes()
        loaded = load_index(io.BytesIO(blob))
        assert loaded.dim == index.dim
        assert loaded.ids() == index.ids()
        assert loaded.dedup_map == index.dedup_map
        assert loaded.record("p1").raw_abstract == "Alpha beta."
        assert loaded.record("p1").tokens == index.record("p1").tokens
        for pid in index.ids():
            for aspect in Aspect:
                a = index.vector(pid, aspect)
                b = loaded.vector(pid, aspect)
                if a is None:
                    assert b is None
                else:
                    np.testing.assert_array_equal(a, b)  # bit-exact

    def test_byte_identical_across_builds(self):
        _, blob1 = self.build_bytes()
        _, blob2 = self.build_bytes()
        assert blob1 == blob2

    def test_bad_magic(self):
        with pytest.raises(IndexFormatError, match="magic"):
            load_index(io.BytesIO(b"NOTANIDX" + b"\0" * 32))

    def test_wrong_version(self):
        _, blob = self.build_bytes()
        tampered = blob[:6] + (99).to_bytes(2, "little") + blob[8:]
        with pytest.raises(IndexFormatError, match="version 99"):
            load_index(io.BytesIO(tampered))

    def test_truncated_header(self):
        _, blob = self.build_bytes()
        with pytest.raises(IndexFormatError, match="truncated"):
            load_index(io.BytesIO(blob[:9]))

    def test_truncated_payload(self):
        _, blob = self.build_bytes()
        with pytest.raises(IndexFormatError, match="truncated"):
            load_index(io.BytesIO(blob[:-5]))

    def test_trailing_garbage(self):
        _, blob = self.build_bytes()
        with pytest.raises(IndexFormatError, match="trailing"):
            load_index(io.BytesIO(blob + b"\0"))
