"""Format detection and parsing of source XML into canonical records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..records import (
    MetadataFormat,
    MetadataRecord,
    Provenance,
    compute_record_id,
)
from . import dublin_core, eml, fgdc, iso19115
from .common import RecordParseError, XmlParseError, localname, namespace, parse_xml
from .render import make_snippet, render_full_text, render_summary_view

__all__ = [
    "CROSSWALKS",
    "ParseResult",
    "RecordParseError",
    "XmlParseError",
    "detect_format",
    "make_snippet",
    "parse_record",
    "render_full_text",
    "render_summary_view",
]

_DC_NAMESPACES = (
    "http://purl.org/dc/",
    "http://www.openarchives.org/OAI/2.0/oai_dc/",
)

_EXTRACTORS = {
    MetadataFormat.FGDC: fgdc.extract,
    MetadataFormat.DUBLIN_CORE: dublin_core.extract,
    MetadataFormat.EML: eml.extract,
    MetadataFormat.ISO19115: iso19115.extract,
}

CROSSWALKS = {
    MetadataFormat.FGDC: fgdc.CROSSWALK,
    MetadataFormat.DUBLIN_CORE: dublin_core.CROSSWALK,
    MetadataFormat.EML: eml.CROSSWALK,
    MetadataFormat.ISO19115: iso19115.CROSSWALK,
}


def detect_format(raw: bytes) -> Optional[MetadataFormat]:
    """Decide the metadata standard from the root element; None when the
    XML is well-formed but the schema is unknown."""
    root = parse_xml(raw)
    name = localname(root.tag)
    ns = namespace(root.tag)
    if name == "metadata" and any(localname(c.tag) == "idinfo" for c in root):
        return MetadataFormat.FGDC
    if name == "eml":
        return MetadataFormat.EML
    if name == "MD_Metadata":
        return MetadataFormat.ISO19115
    if name == "dc" or any(ns.startswith(p) for p in _DC_NAMESPACES):
        return MetadataFormat.DUBLIN_CORE
    for child in root.iter():
        if any(namespace(child.tag).startswith(p) for p in _DC_NAMESPACES):
            return MetadataFormat.DUBLIN_CORE
    return None


@dataclass(frozen=True)
class ParseResult:
    record: MetadataRecord
    warnings: tuple[str, ...]


def parse_record(
    raw: bytes,
    fmt: MetadataFormat,
    source_id: str,
    native_identifier: Optional[str] = None,
    raw_document_ref: Optional[str] = None,
    provenance: Optional[Provenance] = None,
) -> ParseResult:
    """Parse one source document into a canonical record.

    A missing title is a hard error; uninterpretable dates or coordinates
    drop just that field and surface in the warnings list. The native
    identifier defaults to the one embedded in the document (falling back
    to the title); harvest protocols that carry an authoritative
    identifier pass it explicitly.
    """
    detected = detect_format(raw)
    if detected is not fmt:
        raise RecordParseError(
            f"document is {detected.value if detected else 'unrecognized'}, not {fmt.value}"
        )
    root = parse_xml(raw)
    warnings: list[str] = []
    fields = _EXTRACTORS[fmt](root, warnings)
    title = (fields.get("title") or "").strip()
    if not title:
        raise RecordParseError("record has no title")
    native = native_identifier or fields.get("native_identifier") or title
    record = MetadataRecord(
        id=compute_record_id(source_id, native),
        title=title,
        abstract=fields.get("abstract") or "",
        keywords=tuple(fields.get("keywords") or ()),
        data_source=source_id,
        project=fields.get("project"),
        temporal_extent=fields.get("temporal_extent"),
        spatial_extent=fields.get("spatial_extent"),
        data_link=fields.get("data_link"),
        metadata_link=fields.get("metadata_link"),
        native_format=fmt,
        native_identifier=native,
        raw_document_ref=raw_document_ref,
        provenance=provenance,
    )
    return ParseResult(record=record, warnings=tuple(warnings))
