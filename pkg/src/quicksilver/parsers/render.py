"""Full-record views: the indented plain-text page, the styled summary
rows, and result snippets."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from ..records import MetadataFormat, MetadataRecord
from .common import localname, parse_xml, text_of

SECTIONS = (
    "Identification",
    "Data Quality",
    "Spatial Reference",
    "Entity and Attribute",
    "Distribution",
    "Metadata Reference",
)

# Where each format's top-level structures land on the six-section page.
_SECTION_BUCKETS: dict[MetadataFormat, dict[str, str]] = {
    MetadataFormat.FGDC: {
        "idinfo": "Identification",
        "dataqual": "Data Quality",
        "spdoinfo": "Spatial Reference",
        "spref": "Spatial Reference",
        "eainfo": "Entity and Attribute",
        "distinfo": "Distribution",
        "metainfo": "Metadata Reference",
    },
    MetadataFormat.EML: {
        "methods": "Data Quality",
        "qualityControl": "Data Quality",
        "coverage": "Spatial Reference",
        "attributeList": "Entity and Attribute",
        "dataTable": "Entity and Attribute",
        "distribution": "Distribution",
        "additionalMetadata": "Metadata Reference",
        "access": "Metadata Reference",
    },
    MetadataFormat.ISO19115: {
        "dataQualityInfo": "Data Quality",
        "referenceSystemInfo": "Spatial Reference",
        "contentInfo": "Entity and Attribute",
        "distributionInfo": "Distribution",
        "metadataStandardName": "Metadata Reference",
        "metadataStandardVersion": "Metadata Reference",
        "dateStamp": "Metadata Reference",
        "fileIdentifier": "Metadata Reference",
    },
    MetadataFormat.DUBLIN_CORE: {},
}


def _dump_tree(elem: ET.Element, depth: int, lines: list[str]) -> None:
    own_text = (elem.text or "").strip()
    own_text = " ".join(own_text.split())
    tag = localname(elem.tag)
    if own_text:
        lines.append("  " * depth + f"{tag}: {own_text}")
    else:
        lines.append("  " * depth + f"{tag}:")
    for child in elem:
        _dump_tree(child, depth + 1, lines)


def _canonical_lines(record: MetadataRecord) -> dict[str, list[str]]:
    by_section: dict[str, list[str]] = {name: [] for name in SECTIONS}
    ident = by_section["Identification"]
    ident.append(f"Title: {record.title}")
    if record.abstract:
        ident.append(f"Abstract: {record.abstract}")
    if record.project:
        ident.append(f"Project: {record.project}")
    if record.temporal_extent:
        te = record.temporal_extent
        ident.append(f"Period of Record: {te.start.isoformat()} to {te.end.isoformat()}")
    for kw in record.keywords:
        ident.append("Keyword: " + " > ".join(kw.path))
    if record.spatial_extent:
        bb = record.spatial_extent
        sp = by_section["Spatial Reference"]
        sp.append("Bounding Box:")
        sp.append(f"  West: {bb.west}")
        sp.append(f"  East: {bb.east}")
        sp.append(f"  South: {bb.south}")
        sp.append(f"  North: {bb.north}")
    dist = by_section["Distribution"]
    if record.data_link:
        dist.append(f"Get data: {record.data_link}")
    if record.metadata_link:
        dist.append(f"View full metadata: {record.metadata_link}")
    meta = by_section["Metadata Reference"]
    meta.append(f"Native format: {record.native_format.value}")
    meta.append(f"Native identifier: {record.native_identifier}")
    meta.append(f"Data source: {record.data_source}")
    if record.provenance:
        meta.append(f"Origin: {record.provenance.origin_url}")
        meta.append(f"Fetched: {record.provenance.fetched_at.isoformat()}")
        meta.append(f"Checksum: {record.provenance.checksum}")
    return by_section


def render_full_text(record: MetadataRecord, raw_xml: Optional[bytes] = None) -> str:
    """Plain-text record page: six fixed top-level sections, hierarchy as
    2-space indentation, empty sections printed as "(none)"."""
    by_section = _canonical_lines(record)
    if raw_xml is not None:
        try:
            root = parse_xml(raw_xml)
        except ValueError:
            by_section["Metadata Reference"].append("Notice: stored source document unreadable; canonical fields only")
        else:
            buckets = _SECTION_BUCKETS.get(record.native_format, {})
            for child in root:
                section = buckets.get(localname(child.tag))
                if section:
                    _dump_tree(child, 0, by_section[section])
    else:
        by_section["Metadata Reference"].append("Notice: source document unavailable; canonical fields only")
    out: list[str] = []
    for name in SECTIONS:
        out.append(name)
        lines = by_section[name]
        if not lines:
            out.append("  (none)")
        else:
            out.extend("  " + line for line in lines)
    return "\n".join(out) + "\n"


def render_summary_view(record: MetadataRecord) -> list[dict]:
    """Label/value rows for the styled record page, fixed order, absent
    fields omitted."""
    rows: list[dict] = [{"label": "Title", "value": record.title}]
    if record.temporal_extent:
        te = record.temporal_extent
        rows.append({"label": "Period of Record", "value": f"{te.start.isoformat()} to {te.end.isoformat()}"})
    rows.append({"label": "Data Source", "value": record.data_source})
    if record.project:
        rows.append({"label": "Project", "value": record.project})
    if record.abstract:
        rows.append({"label": "Abstract", "value": record.abstract})
    links = []
    if record.data_link:
        links.append(f"Get data: {record.data_link}")
    if record.metadata_link:
        links.append(f"View full metadata: {record.metadata_link}")
    if links:
        rows.append({"label": "Links", "value": "; ".join(links)})
    return rows


def make_snippet(record: MetadataRecord, max_chars: int) -> str:
    """Abstract excerpt cut at the last word boundary within max_chars,
    with a trailing ellipsis when truncated."""
    if max_chars < 50:
        raise ValueError("max_chars must be >= 50")
    abstract = record.abstract or ""
    if len(abstract) <= max_chars:
        return abstract
    prefix = abstract[:max_chars]
    if not abstract[max_chars].isspace():
        cut = prefix.rfind(" ")
        if cut > 0:
            prefix = prefix[:cut]
    return prefix.rstrip() + "..."
