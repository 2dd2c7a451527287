"""Format detection, fixture golden comparison, and record rendering."""

import json
from datetime import date, datetime, timezone

import pytest

from conftest import fixture_cases, load_golden
from quicksilver.parsers import (
    ParseResult,
    RecordParseError,
    XmlParseError,
    CROSSWALKS,
    detect_format,
    make_snippet,
    parse_record,
    render_full_text,
    render_summary_view,
)
from quicksilver.records import (
    BoundingBox,
    DEFAULT_CATEGORY_RULES,
    DateRange,
    KeywordEntry,
    MetadataFormat,
    Provenance,
    compute_record_id,
    finalize_record,
    validate_record,
)
from test_records import make_record

CASES = fixture_cases()
IDS = [p.parent.name + "/" + p.stem for p, _ in CASES]


class TestDetectFormat:
    @pytest.mark.parametrize("xml_path,golden_path", CASES, ids=IDS)
    def test_fixture_formats_detected(self, xml_path, golden_path):
        assert detect_format(xml_path.read_bytes()).value == xml_path.parent.name

    def test_eml_root(self):
        assert detect_format(b"<eml:eml xmlns:eml='eml://x'><dataset/></eml:eml>") is MetadataFormat.EML

    def test_iso_root(self):
        raw = b"<gmd:MD_Metadata xmlns:gmd='http://www.isotc211.org/2005/gmd'/>"
        assert detect_format(raw) is MetadataFormat.ISO19115

    def test_truncated_xml_is_parse_error_not_unknown(self):
        with pytest.raises(XmlParseError) as exc:
            detect_format(b"<metadata><idinfo><citation>")
        assert exc.value.offset >= 0

    def test_unknown_schema(self):
        assert detect_format(b"<something><else/></something>") is None


class TestParseFixtures:
    @pytest.mark.parametrize("xml_path,golden_path", CASES, ids=IDS)
    def test_golden_comparison(self, xml_path, golden_path):
        fmt = MetadataFormat(xml_path.parent.name)
        result = parse_record(xml_path.read_bytes(), fmt, "testsrc")
        assert isinstance(result, ParseResult)
        assert result.warnings == ()
        got = result.record.to_dict()
        golden = load_golden(golden_path)
        for runtime_field in ("id", "data_source", "raw_document_ref", "provenance"):
            got.pop(runtime_field)
        assert got == golden

    @pytest.mark.parametrize("xml_path,golden_path", CASES, ids=IDS)
    def test_id_derived_from_native_identifier(self, xml_path, golden_path):
        fmt = MetadataFormat(xml_path.parent.name)
        record = parse_record(xml_path.read_bytes(), fmt, "testsrc").record
        assert record.id == compute_record_id("testsrc", record.native_identifier)

    @pytest.mark.parametrize("xml_path,golden_path", CASES, ids=IDS)
    def test_finalized_records_validate_clean(self, xml_path, golden_path):
        fmt = MetadataFormat(xml_path.parent.name)
        record = parse_record(xml_path.read_bytes(), fmt, "testsrc").record
        assert validate_record(finalize_record(record, DEFAULT_CATEGORY_RULES)) == []

    def test_figure_record_title_and_range(self):
        raw = (CASES[0][0].parent.parent / "fgdc" / "boreas_te06_npp.xml").read_bytes()
        record = parse_record(raw, MetadataFormat.FGDC, "daac").record
        assert record.title == (
            "BOREAS TE-06 NPP FOR THE TOWER FLUX, CARBON EVALUATION, AND AUXILIARY SITES"
        )
        assert record.temporal_extent == DateRange(date(1985, 1, 1), date(1995, 12, 31))

    def test_eml_bounding_box_transcription(self):
        raw = (CASES[0][0].parent.parent / "eml" / "lter_biomass.xml").read_bytes()
        record = parse_record(raw, MetadataFormat.EML, "lter").record
        assert record.spatial_extent == BoundingBox(west=-10, east=10, south=-5, north=5)

    def test_minimal_dc_only_title(self):
        raw = b"""<oai_dc:dc xmlns:oai_dc="http://www.openarchives.org/OAI/2.0/oai_dc/"
                   xmlns:dc="http://purl.org/dc/elements/1.1/">
                   <dc:title>Just a title</dc:title></oai_dc:dc>"""
        record = parse_record(raw, MetadataFormat.DUBLIN_CORE, "src1").record
        assert record.title == "Just a title"
        assert record.abstract == ""
        assert record.keywords == ()
        assert record.temporal_extent is None
        assert record.spatial_extent is None
        assert record.data_link is None

    def test_missing_title_is_hard_error(self):
        raw = b"""<oai_dc:dc xmlns:oai_dc="http://www.openarchives.org/OAI/2.0/oai_dc/"
                   xmlns:dc="http://purl.org/dc/elements/1.1/">
                   <dc:description>No title here</dc:description></oai_dc:dc>"""
        with pytest.raises(RecordParseError):
            parse_record(raw, MetadataFormat.DUBLIN_CORE, "src1")

    def test_bad_date_drops_field_with_warning(self):
        raw = b"""<metadata><idinfo>
            <citation><citeinfo><title>Dates are broken</title></citeinfo></citation>
            <timeperd><timeinfo><rngdates>
              <begdate>unknown</begdate><enddate>present</enddate>
            </rngdates></timeinfo></timeperd>
        </idinfo></metadata>"""
        result = parse_record(raw, MetadataFormat.FGDC, "src1")
        assert result.record.temporal_extent is None
        assert any("temporal" in w for w in result.warnings)

    def test_bad_coordinate_drops_field_with_warning(self):
        raw = b"""<metadata><idinfo>
            <citation><citeinfo><title>Bad box</title></citeinfo></citation>
            <spdom><bounding><westbc>west-ish</westbc><eastbc>10</eastbc>
            <southbc>0</southbc><northbc>5</northbc></bounding></spdom>
        </idinfo></metadata>"""
        result = parse_record(raw, MetadataFormat.FGDC, "src1")
        assert result.record.spatial_extent is None
        assert any("spatial" in w for w in result.warnings)

    def test_format_mismatch_rejected(self):
        raw = b"<eml:eml xmlns:eml='eml://x'><dataset><title>t</title></dataset></eml:eml>"
        with pytest.raises(RecordParseError):
            parse_record(raw, MetadataFormat.FGDC, "src1")

    def test_native_identifier_override(self):
        raw = (CASES[0][0].parent.parent / "eml" / "lter_biomass.xml").read_bytes()
        record = parse_record(
            raw, MetadataFormat.EML, "lter", native_identifier="oai:x:y"
        ).record
        assert record.native_identifier == "oai:x:y"
        assert record.id == compute_record_id("lter", "oai:x:y")


class TestCrosswalkDeclarations:
    def test_every_canonical_field_mapped_or_marked_absent(self):
        canonical = {
            "title", "abstract", "keywords", "temporal_extent", "spatial_extent",
            "data_link", "metadata_link", "project", "native_identifier",
        }
        for fmt, crosswalk in CROSSWALKS.items():
            assert set(crosswalk) == canonical, fmt


SECTIONS = [
    "Identification", "Data Quality", "Spatial Reference",
    "Entity and Attribute", "Distribution", "Metadata Reference",
]


def indent0_lines(text: str) -> list[str]:
    return [line for line in text.splitlines() if line and not line.startswith(" ")]


class TestRenderFullText:
    @pytest.mark.parametrize("xml_path,golden_path", CASES, ids=IDS)
    def test_six_sections_with_raw(self, xml_path, golden_path):
        fmt = MetadataFormat(xml_path.parent.name)
        raw = xml_path.read_bytes()
        record = parse_record(raw, fmt, "testsrc").record
        assert indent0_lines(render_full_text(record, raw)) == SECTIONS

    def test_six_sections_without_raw_and_notice(self):
        record = make_record(title="No raw doc")
        text = render_full_text(record, None)
        assert indent0_lines(text) == SECTIONS
        assert "Notice:" in text

    def test_empty_section_prints_none(self):
        record = make_record(title="No spatial info")
        text = render_full_text(record, None)
        lines = text.splitlines()
        idx = lines.index("Spatial Reference")
        assert lines[idx + 1] == "  (none)"

    def test_deterministic(self):
        raw = CASES[0][0].read_bytes()
        fmt = MetadataFormat(CASES[0][0].parent.name)
        record = parse_record(raw, fmt, "testsrc").record
        assert render_full_text(record, raw) == render_full_text(record, raw)

    def test_unreadable_raw_adds_notice_keeps_sections(self):
        record = make_record(title="Broken raw")
        text = render_full_text(record, b"<not-xml")
        assert indent0_lines(text) == SECTIONS
        assert "unreadable" in text


class TestRenderSummary:
    def test_project_row_present(self):
        rows = render_summary_view(make_record(title="T", project="BOREAS"))
        assert {"label": "Project", "value": "BOREAS"} in rows

    def test_project_row_absent(self):
        rows = render_summary_view(make_record(title="T"))
        assert all(r["label"] != "Project" for r in rows)

    def test_full_record_row_order(self):
        record = make_record(
            title="T",
            abstract="A",
            project="P",
            temporal_extent=DateRange(date(1985, 1, 1), date(1995, 12, 31)),
            data_link="https://example.org/data",
            metadata_link="https://example.org/meta",
        )
        labels = [r["label"] for r in render_summary_view(record)]
        assert labels == ["Title", "Period of Record", "Data Source", "Project", "Abstract", "Links"]


class TestMakeSnippet:
    def test_short_abstract_verbatim(self):
        rec = make_record(abstract="Short abstract.")
        assert make_snippet(rec, 600) == "Short abstract."

    def test_exact_length_verbatim(self):
        text = "x" * 80
        rec = make_record(abstract=text)
        assert make_snippet(rec, 80) == text

    def test_truncates_at_word_boundary(self):
        rec = make_record(abstract="alpha bravo charlie delta " * 40)
        snippet = make_snippet(rec, 100)
        assert snippet.endswith("...")
        body = snippet[:-3]
        assert len(body) <= 100
        assert not body.endswith(" ")
        assert body.split()[-1] in {"alpha", "bravo", "charlie", "delta"}

    def test_no_mid_word_cut(self):
        abstract = "supercalifragilistic " * 20
        snippet = make_snippet(make_record(abstract=abstract), 50)
        assert snippet == "supercalifragilistic supercalifragilistic..."

    def test_empty_abstract(self):
        assert make_snippet(make_record(abstract=""), 600) == ""

    def test_minimum_max_chars_enforced(self):
        with pytest.raises(ValueError):
            make_snippet(make_record(abstract="x"), 49)
