"""Index engine: analysis, BM25, boolean search, facets, geotemporal
predicates, snapshots. Search behavior is checked against the
brute-force oracle in oracle.py."""

import math
import random
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import corpus as corpus_mod
import oracle as oracle_mod
from quicksilver.index import (
    InvalidRecordError,
    STOPWORDS,
    SearchIndex,
    SnapshotFormatError,
    bbox_intersects,
    date_overlaps,
    score_bm25,
    tokenize,
)
from quicksilver.querylang import Term, UnknownFieldError, parse_query
from quicksilver.records import BoundingBox, DateRange
from test_records import make_record


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_basic(self):
        assert tokenize("Carbon dioxide flux") == ["carbon", "dioxide", "flux"]

    def test_punctuation_and_numbers(self):
        assert tokenize("NPP (Net Primary Productivity), 1986-1996") == [
            "npp", "net", "primary", "productivity", "1986", "1996",
        ]

    def test_stopword_list_is_30_words(self):
        assert len(STOPWORDS) == 30

    def test_stopwords_dropped(self):
        assert tokenize("the flux of carbon") == ["flux", "carbon"]

    def test_short_tokens_dropped(self):
        assert tokenize("a b cd") == ["cd"]

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_token_properties(self, text):
        for tok in tokenize(text):
            assert tok == tok.lower()
            assert len(tok) >= 2
            assert tok not in STOPWORDS


class TestBm25:
    def test_hand_computed_single_doc(self):
        # N=1, df=1, tf=1, len=avglen: idf = ln(4/3), norm term cancels
        expected = math.log(4.0 / 3.0)
        assert abs(score_bm25(tf=1, df=1, n_docs=1, doc_len=10, avg_len=10) - expected) < 1e-12

    def test_zero_tf_contributes_nothing(self):
        assert score_bm25(tf=0, df=1, n_docs=10, doc_len=5, avg_len=5) == 0.0

    def test_monotone_in_tf(self):
        low = score_bm25(tf=1, df=3, n_docs=10, doc_len=8, avg_len=8)
        high = score_bm25(tf=2, df=3, n_docs=10, doc_len=8, avg_len=8)
        assert high > low


class TestDateOverlaps:
    def test_containment(self):
        a = DateRange(date(1985, 1, 1), date(1995, 12, 31))
        b = DateRange(date(1990, 1, 1), date(1992, 12, 31))
        assert date_overlaps(a, b)

    def test_disjoint(self):
        a = DateRange(date(1980, 1, 1), date(1984, 12, 31))
        b = DateRange(date(1985, 1, 1), date(1990, 12, 31))
        assert not date_overlaps(a, b)

    def test_touching_endpoints_inclusive(self):
        a = DateRange(date(1980, 1, 1), date(1985, 1, 1))
        b = DateRange(date(1985, 1, 1), date(1990, 12, 31))
        assert date_overlaps(a, b)


_dates = st.dates(min_value=date(1900, 1, 1), max_value=date(2100, 1, 1))


@st.composite
def date_ranges(draw):
    a = draw(_dates)
    b = draw(_dates)
    return DateRange(min(a, b), max(a, b))


@st.composite
def bboxes(draw):
    south = draw(st.floats(min_value=-90, max_value=90))
    north = draw(st.floats(min_value=south, max_value=90))
    west = draw(st.floats(min_value=-180, max_value=180))
    east = draw(st.floats(min_value=-180, max_value=180))
    return BoundingBox(west=west, east=east, south=south, north=north)


@given(date_ranges(), date_ranges())
@settings(max_examples=500, deadline=None)
def test_date_overlaps_matches_oracle_and_symmetric(a, b):
    assert date_overlaps(a, b) == oracle_mod.date_overlaps(a, b)
    assert date_overlaps(a, b) == date_overlaps(b, a)


class TestBboxIntersects:
    def test_identical(self):
        box = BoundingBox(west=-10, east=10, south=-5, north=5)
        assert bbox_intersects(box, box)

    def test_global_absorbs_everything(self):
        globe = BoundingBox(west=-180, east=180, south=-90, north=90)
        assert bbox_intersects(globe, BoundingBox(west=170, east=-170, south=-10, north=10))

    def test_antimeridian_cases(self):
        a = BoundingBox(west=170, east=-170, south=-10, north=10)
        assert bbox_intersects(a, BoundingBox(west=175, east=179, south=-5, north=5))
        assert not bbox_intersects(a, BoundingBox(west=0, east=10, south=-5, north=5))

    def test_latitude_disjoint(self):
        a = BoundingBox(west=0, east=10, south=40, north=50)
        b = BoundingBox(west=0, east=10, south=-50, north=-40)
        assert not bbox_intersects(a, b)


@given(bboxes(), bboxes())
@settings(max_examples=500, deadline=None)
def test_bbox_matches_oracle_and_symmetric(a, b):
    assert bbox_intersects(a, b) == oracle_mod.bbox_intersects(a, b)
    assert bbox_intersects(a, b) == bbox_intersects(b, a)


class TestIndexLifecycle:
    def test_add_commit_search_round_trip(self):
        idx = SearchIndex()
        idx.add(make_record(title="Carbon flux tower"))
        snap = idx.commit()
        assert snap.search(parse_query("carbon")).total == 1

    def test_uncommitted_changes_invisible(self):
        idx = SearchIndex()
        idx.add(make_record(title="Carbon flux tower"))
        assert idx.current().search(parse_query("carbon")).total == 0
        idx.commit()
        assert idx.current().search(parse_query("carbon")).total == 1

    def test_add_delete_commit(self):
        idx = SearchIndex()
        rec = make_record(title="Carbon flux tower")
        idx.add(rec)
        idx.delete(rec.id)
        snap = idx.commit()
        assert snap.n_docs == 0
        assert snap.search(parse_query("carbon")).total == 0

    def test_unique_key_replacement(self):
        idx = SearchIndex()
        rec = make_record(title="oldword here")
        idx.add(rec)
        idx.commit()
        idx.add(make_record(title="newword here"))  # same id
        snap = idx.commit()
        assert snap.search(parse_query("oldword")).total == 0
        assert snap.search(parse_query("newword")).total == 1
        assert snap.n_docs == 1

    def test_delete_unknown_is_noop(self):
        idx = SearchIndex()
        assert idx.delete("nope") is False

    def test_invalid_record_rejected(self):
        idx = SearchIndex()
        with pytest.raises(InvalidRecordError):
            idx.add(make_record(title="  "))

    def test_rows_zero_counts_only(self):
        idx = SearchIndex()
        idx.add(make_record(title="carbon"))
        snap = idx.commit()
        result = snap.search(parse_query("carbon"), rows=0)
        assert result.total == 1
        assert result.hits == []

    def test_unknown_field_in_ast(self):
        idx = SearchIndex()
        idx.add(make_record())
        snap = idx.commit()
        with pytest.raises(UnknownFieldError):
            snap.search(Term("bogus", "x"))


class TestOracleEquivalence:
    def test_small_corpora(self):
        rng = random.Random(20260808)
        for trial in range(8):
            records = corpus_mod.make_corpus(rng, rng.randint(30, 250))
            idx = SearchIndex(records)
            snap = idx.commit()
            ocorpus = oracle_mod.OracleCorpus(records)
            for _ in range(25):
                ast = corpus_mod.make_ast(rng)
                date_range, bbox = corpus_mod.make_filters(rng)
                sort = rng.choice(("index_rank", "period_of_record", "source", "project"))
                start = rng.choice((0, 3))
                got = snap.search(ast, date_range=date_range, bbox=bbox, sort=sort,
                                  start=start, rows=1000)
                want = ocorpus.search(ast, date_range=date_range, bbox=bbox, sort=sort,
                                      start=start, rows=1000)
                assert got.total == want["total"]
                assert {h.id for h in got.hits} <= want["ids"]
                assert [h.id for h in got.hits] == want["page_ids"]
                for h in got.hits:
                    expected = want["scores"][h.id]
                    assert h.score == pytest.approx(expected, rel=1e-9, abs=1e-12)
                got_facets = snap.facet_counts(got.candidate_ords)
                want_facets = ocorpus.facet_counts(want["candidates"])
                assert got_facets == want_facets

    def test_match_all_with_filters(self):
        rng = random.Random(77)
        records = corpus_mod.make_corpus(rng, 150)
        snap = SearchIndex(records).commit()
        ocorpus = oracle_mod.OracleCorpus(records)
        for _ in range(30):
            date_range, bbox = corpus_mod.make_filters(rng)
            got = snap.search(None, date_range=date_range, bbox=bbox, rows=500)
            want = ocorpus.search(None, date_range=date_range, bbox=bbox, rows=500)
            assert got.total == want["total"]
            assert [h.id for h in got.hits] == want["page_ids"]


class TestFacets:
    def test_counts_match_brute_force(self):
        rng = random.Random(5)
        records = corpus_mod.make_corpus(rng, 200)
        snap = SearchIndex(records).commit()
        ocorpus = oracle_mod.OracleCorpus(records)
        result = snap.search(None, rows=0)
        assert snap.facet_counts(result.candidate_ords) == ocorpus.facet_counts(ocorpus.docs)

    def test_single_valued_identity(self):
        rng = random.Random(6)
        records = corpus_mod.make_corpus(rng, 300)
        snap = SearchIndex(records).commit()
        result = snap.search(parse_query("carbon OR flux"), rows=0)
        counts = snap.facet_counts(result.candidate_ords, ("datasource",))
        assert sum(c for _, c in counts["datasource"]) == result.total

    def test_empty_candidates(self):
        snap = SearchIndex([make_record()]).commit()
        counts = snap.facet_counts(np.array([], dtype=np.int64))
        assert all(v == [] for v in counts.values())

    def test_top_k_truncation_and_ordering(self):
        rng = random.Random(7)
        records = corpus_mod.make_corpus(rng, 150)
        snap = SearchIndex(records).commit()
        result = snap.search(None, rows=0)
        full = snap.facet_counts(result.candidate_ords)["topic"]
        top2 = snap.facet_counts(result.candidate_ords, ("topic",), top_k=2)["topic"]
        assert top2 == full[:2]
        counts = [c for _, c in full]
        assert counts == sorted(counts, reverse=True)

    def test_unknown_facet_field(self):
        snap = SearchIndex([make_record()]).commit()
        with pytest.raises(UnknownFieldError):
            snap.facet_counts(np.array([0]), ("bogus",))


class TestRankingSanity:
    def test_unrelated_doc_preserves_order(self):
        rng = random.Random(11)
        records = corpus_mod.make_corpus(rng, 80)
        idx = SearchIndex(records)
        snap = idx.commit()
        before = [h.id for h in snap.search(parse_query("carbon"), rows=200).hits]
        idx.add(make_record(title="unrelatedzzz wordqqq", native_identifier="zzz-1"))
        snap2 = idx.commit()
        after = [h.id for h in snap2.search(parse_query("carbon"), rows=200).hits]
        assert after == before


class TestSnapshotPersistence:
    def test_save_load_round_trip(self, tmp_path):
        rng = random.Random(3)
        records = corpus_mod.make_corpus(rng, 40)
        idx = SearchIndex(records)
        idx.commit()
        path = tmp_path / "index.snapshot"
        idx.save(path)
        loaded = SearchIndex.load(path)
        assert loaded.current().version == idx.current().version
        q = parse_query("carbon OR datasource:lter")
        assert [h.id for h in loaded.current().search(q, rows=100).hits] == [
            h.id for h in idx.current().search(q, rows=100).hits
        ]

    def test_version_is_content_hash(self):
        rng = random.Random(4)
        records = corpus_mod.make_corpus(rng, 25)
        a = SearchIndex(records).commit()
        b = SearchIndex(list(reversed(records))).commit()
        assert a.version == b.version

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "index.snapshot"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(SnapshotFormatError):
            SearchIndex.load(path)

    def test_version_mismatch_rejected(self, tmp_path):
        idx = SearchIndex([make_record()])
        idx.commit()
        path = tmp_path / "index.snapshot"
        idx.save(path)
        blob = bytearray(path.read_bytes())
        blob[4:8] = (99).to_bytes(4, "little")
        path.write_bytes(bytes(blob))
        with pytest.raises(SnapshotFormatError):
            SearchIndex.load(path)

    def test_truncated_payload_rejected(self, tmp_path):
        idx = SearchIndex([make_record()])
        idx.commit()
        path = tmp_path / "index.snapshot"
        idx.save(path)
        path.write_bytes(path.read_bytes()[:20])
        with pytest.raises(SnapshotFormatError):
            SearchIndex.load(path)


class TestBrowseTree:
    def test_prefix_counts(self):
        from quicksilver.records import KeywordEntry, compute_record_id

        recs = [
            make_record(
                native_identifier="r1",
                id=compute_record_id("daac", "r1"),
                keywords=(KeywordEntry(path=("earth science", "biosphere", "vegetation")),),
            ),
            make_record(
                native_identifier="r2",
                id=compute_record_id("daac", "r2"),
                keywords=(KeywordEntry(path=("earth science", "atmosphere")),),
            ),
        ]
        snap = SearchIndex(recs).commit()
        root = snap.browse_children(())
        assert root == [("earth science", 2, True)]
        children = snap.browse_children(("earth science",))
        assert sorted(children) == [("atmosphere", 1, False), ("biosphere", 1, True)]

    def test_unknown_path(self):
        snap = SearchIndex([make_record()]).commit()
        assert snap.browse_children(("nope",)) is None

    def test_counts_match_oracle(self):
        rng = random.Random(13)
        records = corpus_mod.make_corpus(rng, 120)
        snap = SearchIndex(records).commit()
        ocorpus = oracle_mod.OracleCorpus(records)
        assert snap.browse_children(()) == ocorpus.browse_children(())
        for seg, _, has_more in snap.browse_children(())[:5]:
            assert snap.browse_children((seg,)) == ocorpus.browse_children((seg,))
