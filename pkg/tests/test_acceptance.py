"""Acceptance suite: one test per release criterion, each printing a
PASS line when it holds. Run with `pytest tests/test_acceptance.py -v -s`.

Oracle- and property-based: engine results are compared against the
independent brute-force evaluation in oracle.py, never against itself.
"""

import json
import random
import threading
import time
import xml.etree.ElementTree as ET
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

import corpus as corpus_mod
import oracle as oracle_mod
from conftest import fixture_cases, load_golden
from mock_servers import MockOaiServer, OaiConfig, OaiStoredRecord, dc_payload, fgdc_document
from quicksilver.harvest import HarvestSource, HarvestState, harvest_run, oai_list_records
from quicksilver.index import SearchIndex, bbox_intersects, date_overlaps
from quicksilver.querylang import And, FieldSet, Term, parse_query
from quicksilver.records import BoundingBox, DateRange, MetadataFormat
from quicksilver.store import DocumentStore
from test_records import make_record


def ok(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}")


# ---------------------------------------------------------------------------


def test_query_syntax_fidelity():
    """The production query bar string parses to the documented shape."""
    ast = parse_query("fullText:carbon AND datasource:(daac landval rgd lter obfs)")
    assert ast == And(
        (
            Term("fulltext", "carbon"),
            FieldSet("datasource", ("daac", "landval", "rgd", "lter", "obfs")),
        )
    )
    assert len(ast.children[1].values) == 5
    ok("query-syntax fidelity (fielded boolean grammar)")


# ---------------------------------------------------------------------------


def test_oracle_equivalence_randomized_corpora():
    """>=200 random corpora x >=20 random queries: totals, id sets, facet
    counts exactly equal brute force; scores within 1e-9 relative."""
    rng = random.Random(0xACCE55)
    t0 = time.monotonic()
    n_corpora = 200
    n_queries = 20
    checked_queries = 0
    for trial in range(n_corpora):
        size = rng.randint(1500, 2000) if trial % 50 == 0 else rng.randint(20, 400)
        records = corpus_mod.make_corpus(rng, size)
        snap = SearchIndex(records).commit()
        ocorpus = oracle_mod.OracleCorpus(records)
        for _ in range(n_queries):
            ast = corpus_mod.make_ast(rng)
            date_range, bbox = corpus_mod.make_filters(rng)
            sort = rng.choice(("index_rank", "period_of_record", "source", "project"))
            got = snap.search(ast, date_range=date_range, bbox=bbox, sort=sort, rows=2000)
            want = ocorpus.search(ast, date_range=date_range, bbox=bbox, sort=sort, rows=2000)
            assert got.total == want["total"]
            assert {h.id for h in got.hits} == want["ids"]
            assert [h.id for h in got.hits] == want["page_ids"]
            for h in got.hits:
                expected = want["scores"][h.id]
                if expected == 0.0:
                    assert h.score == 0.0
                else:
                    assert abs(h.score - expected) <= 1e-9 * abs(expected)
            assert snap.facet_counts(got.candidate_ords) == ocorpus.facet_counts(want["candidates"])
            checked_queries += 1
    elapsed = time.monotonic() - t0
    assert checked_queries >= 4000
    assert elapsed < 300, f"oracle equivalence took {elapsed:.0f}s, budget is 300s"
    ok(f"oracle equivalence ({n_corpora} corpora, {checked_queries} queries, {elapsed:.0f}s)")


# ---------------------------------------------------------------------------


def test_facet_sum_identity():
    """datasource is single-valued and always present, so its facet counts
    sum to the result total on every corpus and every query."""
    rng = random.Random(1472)
    for trial in range(25):
        records = corpus_mod.make_corpus(rng, rng.randint(50, 500))
        snap = SearchIndex(records).commit()
        for _ in range(8):
            ast = corpus_mod.make_ast(rng) if rng.random() < 0.8 else None
            date_range, bbox = corpus_mod.make_filters(rng)
            result = snap.search(ast, date_range=date_range, bbox=bbox, rows=0)
            counts = snap.facet_counts(result.candidate_ords, ("datasource",))
            assert sum(c for _, c in counts["datasource"]) == result.total
    ok("facet identity (sum of single-valued datasource counts == total)")


# ---------------------------------------------------------------------------


def _random_date_range(rng: random.Random) -> DateRange:
    start = date(1900, 1, 1) + timedelta(days=rng.randint(0, 80000))
    return DateRange(start, start + timedelta(days=rng.randint(0, 8000)))


def _random_bbox(rng: random.Random) -> BoundingBox:
    south = rng.uniform(-90, 90)
    north = rng.uniform(south, 90)
    if rng.random() < 0.25:
        west = rng.uniform(-180, 180)
        east = rng.uniform(-180, west)  # may wrap
    else:
        west, east = sorted((rng.uniform(-180, 180), rng.uniform(-180, 180)))
    return BoundingBox(west=west, east=east, south=south, north=north)


def test_geotemporal_correctness():
    """10,000 random cases per predicate against the enumeration oracle,
    plus the directed inclusive/global/antimeridian cases."""
    rng = random.Random(90210)
    for _ in range(10000):
        a, b = _random_date_range(rng), _random_date_range(rng)
        got = date_overlaps(a, b)
        assert got == oracle_mod.date_overlaps(a, b)
        assert got == date_overlaps(b, a)
    for _ in range(10000):
        a, b = _random_bbox(rng), _random_bbox(rng)
        got = bbox_intersects(a, b)
        assert got == oracle_mod.bbox_intersects(a, b)
        assert got == bbox_intersects(b, a)

    # inclusive endpoints
    assert date_overlaps(
        DateRange(date(1980, 1, 1), date(1985, 1, 1)),
        DateRange(date(1985, 1, 1), date(1990, 1, 1)),
    )
    # global box absorbs everything, including wrapped boxes
    globe = BoundingBox(west=-180, east=180, south=-90, north=90)
    for _ in range(100):
        assert bbox_intersects(globe, _random_bbox(rng))
    # antimeridian crossing
    wrapped = BoundingBox(west=170, east=-170, south=-10, north=10)
    assert bbox_intersects(wrapped, BoundingBox(west=175, east=179, south=-5, north=5))
    assert not bbox_intersects(wrapped, BoundingBox(west=0, east=10, south=-5, north=5))
    ok("geotemporal correctness (20,000 randomized predicate cases)")


# ---------------------------------------------------------------------------


def test_parser_round_trip_and_six_sections():
    """Every bundled fixture parses to its hand-written golden record, and
    the plain-text view always renders exactly six top-level sections."""
    from quicksilver.parsers import parse_record, render_full_text

    cases = fixture_cases()
    per_format = {}
    for xml_path, golden_path in cases:
        fmt = MetadataFormat(xml_path.parent.name)
        per_format[fmt] = per_format.get(fmt, 0) + 1
        raw = xml_path.read_bytes()
        result = parse_record(raw, fmt, "testsrc")
        got = result.record.to_dict()
        for runtime_field in ("id", "data_source", "raw_document_ref", "provenance"):
            got.pop(runtime_field)
        assert got == load_golden(golden_path), xml_path.name
        text = render_full_text(result.record, raw)
        top_level = [l for l in text.splitlines() if l and not l.startswith(" ")]
        assert top_level == [
            "Identification", "Data Quality", "Spatial Reference",
            "Entity and Attribute", "Distribution", "Metadata Reference",
        ], xml_path.name
    assert len(per_format) == 4
    assert all(n >= 3 for n in per_format.values())
    ok(f"parser round-trip ({len(cases)} fixtures across 4 standards, 6-section rendering)")


# ---------------------------------------------------------------------------


def test_harvest_convergence_and_idempotence(tmp_path):
    """Mutating 10 items (add 2, modify 3, delete 2) reports exactly
    (2,3,5,2,0) and converges the index to the listing; the immediate
    re-run reports all-unchanged."""
    src_dir = tmp_path / "src"
    src_dir.mkdir()
    for i in range(10):
        (src_dir / f"r{i}.xml").write_bytes(fgdc_document(f"original record {i}"))
    source = HarvestSource(source_id="daac", kind="file_set", endpoint=str(src_dir),
                           polite_delay_ms=0)
    index = SearchIndex()
    store = DocumentStore(tmp_path / "docs")
    _, state = harvest_run(source, HarvestState("daac"), index, store)
    assert index.current().n_docs == 10

    (src_dir / "new_a.xml").write_bytes(fgdc_document("brand new alpha"))
    (src_dir / "new_b.xml").write_bytes(fgdc_document("brand new beta"))
    for i in range(3):
        (src_dir / f"r{i}.xml").write_bytes(fgdc_document(f"modified record {i}"))
    (src_dir / "r8.xml").unlink()
    (src_dir / "r9.xml").unlink()

    report, state = harvest_run(source, state, index, store)
    counts = (report.added, report.updated, report.unchanged, report.deleted, report.failed)
    assert counts == (2, 3, 5, 2, 0)
    assert set(index.current().ids) == {st.record_id for st in state.items.values()}
    assert index.current().n_docs == 10

    rerun, _ = harvest_run(source, state, index, store)
    assert (rerun.added, rerun.updated, rerun.deleted, rerun.failed) == (0, 0, 0, 0)
    assert rerun.unchanged == 10
    ok("harvest convergence (2,3,5,2,0) and idempotent re-run")


# ---------------------------------------------------------------------------


def test_oai_pmh_paging_and_deletion(tmp_path):
    """25 records served over 3 resumption-token pages all arrive;
    noRecordsMatch is an empty success; deleted-status records remove
    previously indexed entries."""
    records = [
        OaiStoredRecord(
            identifier=f"oai:mock:rec{i:03d}",
            datestamp="2020-01-15",
            metadata_xml=dc_payload(f"paged record {i}", identifier=f"rec{i:03d}"),
        )
        for i in range(25)
    ]
    server = MockOaiServer(OaiConfig(records=records, page_size=10)).start()
    try:
        source = HarvestSource(source_id="lter", kind="oai_pmh", endpoint=server.base_url,
                               oai_metadata_prefix="oai_dc", polite_delay_ms=0)
        # paging: 10 + 10 + 5 via two resumption tokens
        streamed = list(oai_list_records(source))
        assert len(streamed) == 25

        index = SearchIndex()
        store = DocumentStore(tmp_path / "docs")
        report, state = harvest_run(source, HarvestState("lter"), index, store)
        assert report.added == 25
        assert index.current().n_docs == 25

        # noRecordsMatch for a future cursor is an empty success
        empty = list(oai_list_records(source, from_datestamp="2099-01-01"))
        assert empty == []

        # deleted-status records remove prior index entries
        records[3] = OaiStoredRecord(identifier=records[3].identifier,
                                     datestamp="2020-02-01", deleted=True)
        records[7] = OaiStoredRecord(identifier=records[7].identifier,
                                     datestamp="2020-02-01", deleted=True)
        report2, state = harvest_run(source, state, index, store)
        assert report2.source_error is None
        assert report2.deleted == 2
        assert index.current().n_docs == 23
    finally:
        server.stop()
    ok("OAI-PMH paging (25 records over 3 pages), noRecordsMatch, deleted-status handling")


# ---------------------------------------------------------------------------


def _mixed_query(rng: random.Random):
    """Text + facet constraint + optional geotemporal filters."""
    clauses = [Term("fulltext", rng.choice(corpus_mod.VOCAB))]
    if rng.random() < 0.7:
        k = rng.randint(1, 3)
        clauses.append(FieldSet("datasource", tuple(rng.sample(corpus_mod.DATASOURCES, k))))
    if rng.random() < 0.4:
        clauses.append(Term("topic", corpus_mod.facet_token(rng.choice(corpus_mod.TOPICS))))
    ast = clauses[0] if len(clauses) == 1 else And(tuple(clauses))
    date_range = None
    if rng.random() < 0.5:
        start = date(1975, 1, 1) + timedelta(days=rng.randint(0, 14000))
        date_range = DateRange(start, start + timedelta(days=rng.randint(30, 5000)))
    bbox = None
    if rng.random() < 0.4:
        lon1, lon2 = sorted((rng.uniform(-180, 180), rng.uniform(-180, 180)))
        south = rng.uniform(-90, 80)
        bbox = BoundingBox(west=lon1, east=lon2, south=south, north=rng.uniform(south, 90))
    return ast, date_range, bbox


def test_scale_and_latency_50k():
    """50,000 records index in under 5 minutes; 1,000 mixed queries with
    facet counting answer with median < 100 ms and p99 < 500 ms."""
    rng = random.Random(50_000)
    records = corpus_mod.make_corpus(rng, 50_000)
    build_start = time.monotonic()
    index = SearchIndex(records)
    snap = index.commit()
    build_elapsed = time.monotonic() - build_start
    assert snap.n_docs == 50_000
    assert build_elapsed < 300, f"index build took {build_elapsed:.1f}s, budget 300s"

    latencies = []
    for _ in range(1000):
        ast, date_range, bbox = _mixed_query(rng)
        t0 = time.perf_counter()
        result = snap.search(ast, date_range=date_range, bbox=bbox, rows=10)
        snap.facet_counts(result.candidate_ords, top_k=10)
        latencies.append(time.perf_counter() - t0)
    median = float(np.median(latencies)) * 1000
    p99 = float(np.percentile(latencies, 99)) * 1000
    assert median < 100, f"median latency {median:.1f} ms >= 100 ms"
    assert p99 < 500, f"p99 latency {p99:.1f} ms >= 500 ms"
    ok(
        f"scale/latency (50k records: build {build_elapsed:.1f}s, "
        f"median {median:.2f} ms, p99 {p99:.2f} ms over 1000 queries)"
    )


# ---------------------------------------------------------------------------


def test_rss_validity_against_search(tmp_path):
    """Feeds for 20 random queries parse as XML, carry the mandatory
    channel elements, and their guid sets equal the /api/search id sets."""
    from fastapi.testclient import TestClient

    from quicksilver.app import create_app
    from test_service import make_config

    rng = random.Random(2020)
    records = corpus_mod.make_corpus(rng, 250)
    index = SearchIndex(records)
    index.commit()
    config = make_config(tmp_path)
    client = TestClient(create_app(config, index=index, store=DocumentStore(config.document_store_dir)))

    checked = 0
    while checked < 20:
        term_a, term_b = rng.sample(corpus_mod.VOCAB, 2)
        q = rng.choice([term_a, f"{term_a} OR {term_b}", f"{term_a} {term_b}",
                        f"fullText:{term_a} AND datasource:({' '.join(rng.sample(corpus_mod.DATASOURCES, 2))})"])
        params = {"q": q, "rows": rng.choice([5, 10, 20])}
        rss_resp = client.get("/api/rss", params=params)
        search_resp = client.get("/api/search", params=params)
        assert rss_resp.status_code == 200 and search_resp.status_code == 200
        root = ET.fromstring(rss_resp.content)
        assert root.tag == "rss" and root.get("version") == "2.0"
        channel = root.find("channel")
        for mandatory in ("title", "link", "description"):
            assert channel.findtext(mandatory) is not None
        guids = {g.text for g in channel.iter("guid")}
        ids = {h["id"] for h in search_resp.json()["hits"]}
        assert guids == ids
        checked += 1
    ok("RSS validity (20 feeds parse; guid sets equal search id sets)")


# ---------------------------------------------------------------------------


def test_snapshot_isolation_stress():
    """1,000 commit iterations with concurrent readers: every observed
    state is a whole number of 10-document batches, never a partial one."""
    iterations_done = 0
    errors = []
    for round_no in range(10):
        index = SearchIndex()
        stop = threading.Event()

        def reader():
            while not stop.is_set():
                snap = index.current()
                result = snap.search(None, rows=0)
                counts = snap.facet_counts(result.candidate_ords, ("datasource",))
                seen = sum(c for _, c in counts["datasource"])
                if result.total % 10 != 0 or seen != result.total:
                    errors.append((round_no, result.total, seen))

        threads = [threading.Thread(target=reader) for _ in range(3)]
        for t in threads:
            t.start()
        try:
            for batch in range(100):
                for i in range(10):
                    index.add(
                        make_record(
                            title=f"round {round_no} batch {batch} item {i}",
                            id=f"{round_no:02d}-{batch:04d}-{i:02d}",
                            native_identifier=f"{round_no}-{batch}-{i}",
                        )
                    )
                index.commit()
                iterations_done += 1
        finally:
            stop.set()
            for t in threads:
                t.join()
        assert index.current().n_docs == 1000
    assert iterations_done == 1000
    assert errors == [], f"partial batches observed: {errors[:5]}"
    ok("snapshot isolation (1,000 concurrent commit iterations, no partial batches)")
