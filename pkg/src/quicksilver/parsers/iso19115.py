"""ISO 19115 / 19139 extraction (gmd MD_Metadata documents).

Element matching is by local name so the 2005 gmd encoding and later
revisions both parse.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..records import BoundingBox, DateRange, KeywordEntry
from .common import child_local, first_local, iter_local, keyword_path, parse_coord, parse_date_text, text_of

ABSENT = "(absent in this standard)"

CROSSWALK = {
    "title": "identificationInfo//citation//title",
    "abstract": "identificationInfo//abstract",
    "keywords": "identificationInfo//descriptiveKeywords/MD_Keywords (thesaurusName title as vocabulary)",
    "temporal_extent": "identificationInfo//EX_TemporalExtent//TimePeriod begin/endPosition",
    "spatial_extent": "identificationInfo//EX_GeographicBoundingBox",
    "data_link": "distributionInfo//CI_OnlineResource/linkage/URL",
    "metadata_link": ABSENT,
    "project": ABSENT,
    "native_identifier": "fileIdentifier",
}

_SIDES = (
    ("westBoundLongitude", "west"),
    ("eastBoundLongitude", "east"),
    ("southBoundLatitude", "south"),
    ("northBoundLatitude", "north"),
)


def _keywords(ident: ET.Element) -> list[KeywordEntry]:
    out: list[KeywordEntry] = []
    for dk in iter_local(ident, "descriptiveKeywords"):
        md = first_local(dk, "MD_Keywords")
        if md is None:
            continue
        thesaurus = first_local(md, "thesaurusName")
        vocab = text_of(first_local(thesaurus, "title")) if thesaurus is not None else None
        for kw in md:
            if kw.tag.rsplit("}", 1)[-1] != "keyword":
                continue
            path = keyword_path(text_of(kw))
            if path:
                out.append(KeywordEntry(path=path, vocabulary=vocab or None))
    return out


def _temporal(ident: ET.Element, warnings: list[str]) -> DateRange | None:
    te = first_local(ident, "EX_TemporalExtent")
    if te is None:
        return None
    period = first_local(te, "TimePeriod")
    if period is None:
        return None
    begin = parse_date_text(text_of(first_local(period, "beginPosition")), "start")
    end = parse_date_text(text_of(first_local(period, "endPosition")), "end")
    if begin and end:
        return DateRange(begin, end)
    warnings.append("EX_TemporalExtent: uninterpretable TimePeriod, temporal extent dropped")
    return None


def _spatial(ident: ET.Element, warnings: list[str]) -> BoundingBox | None:
    box = first_local(ident, "EX_GeographicBoundingBox")
    if box is None:
        return None
    coords = {canon: parse_coord(text_of(first_local(box, tag))) for tag, canon in _SIDES}
    if any(v is None for v in coords.values()):
        warnings.append("EX_GeographicBoundingBox: uninterpretable coordinates, spatial extent dropped")
        return None
    return BoundingBox(**coords)


def extract(root: ET.Element, warnings: list[str]) -> dict:
    ident = first_local(root, "identificationInfo")
    if ident is None:
        return {"title": ""}
    citation = first_local(ident, "citation")
    title = text_of(first_local(citation, "title")) if citation is not None else ""
    abstract_el = first_local(ident, "abstract")
    data_link = None
    dist = first_local(root, "distributionInfo")
    if dist is not None:
        for online in iter_local(dist, "CI_OnlineResource"):
            linkage = first_local(online, "linkage")
            url = text_of(first_local(linkage, "URL")) if linkage is not None else ""
            if url:
                data_link = url
                break
    file_id = child_local(root, "fileIdentifier")
    return {
        "title": title,
        "abstract": text_of(abstract_el),
        "keywords": _keywords(ident),
        "temporal_extent": _temporal(ident, warnings),
        "spatial_extent": _spatial(ident, warnings),
        "data_link": data_link,
        "metadata_link": None,
        "project": None,
        "native_identifier": text_of(file_id) or None,
    }
