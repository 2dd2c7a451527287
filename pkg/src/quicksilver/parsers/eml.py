"""EML (Ecological Metadata Language) extraction."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..records import BoundingBox, DateRange, KeywordEntry
from .common import (
    child_local,
    first_local,
    iter_local,
    keyword_path,
    parse_coord,
    parse_date_text,
    text_of,
)

ABSENT = "(absent in this standard)"

CROSSWALK = {
    "title": "dataset/title",
    "abstract": "dataset/abstract",
    "keywords": "dataset/keywordSet/keyword (keywordThesaurus as vocabulary)",
    "temporal_extent": "dataset/coverage/temporalCoverage (rangeOfDates | singleDateTime)",
    "spatial_extent": "dataset/coverage/geographicCoverage/boundingCoordinates",
    "data_link": "dataset/distribution/online/url",
    "metadata_link": ABSENT,
    "project": "dataset/project/title",
    "native_identifier": "eml/@packageId",
}

_SIDES = (
    ("westBoundingCoordinate", "west"),
    ("eastBoundingCoordinate", "east"),
    ("southBoundingCoordinate", "south"),
    ("northBoundingCoordinate", "north"),
)


def _temporal(coverage: ET.Element, warnings: list[str]) -> DateRange | None:
    tc = first_local(coverage, "temporalCoverage")
    if tc is None:
        return None
    rng = first_local(tc, "rangeOfDates")
    if rng is not None:
        begin_el = first_local(rng, "beginDate")
        end_el = first_local(rng, "endDate")
        begin = parse_date_text(text_of(first_local(begin_el, "calendarDate")) if begin_el is not None else "", "start")
        end = parse_date_text(text_of(first_local(end_el, "calendarDate")) if end_el is not None else "", "end")
        if begin and end:
            return DateRange(begin, end)
        warnings.append("temporalCoverage: uninterpretable rangeOfDates, temporal extent dropped")
        return None
    single = first_local(tc, "singleDateTime")
    if single is not None:
        day = parse_date_text(text_of(first_local(single, "calendarDate")), "start")
        if day:
            return DateRange(day, day)
        warnings.append("temporalCoverage: uninterpretable singleDateTime, temporal extent dropped")
    return None


def _spatial(coverage: ET.Element, warnings: list[str]) -> BoundingBox | None:
    box = first_local(coverage, "boundingCoordinates")
    if box is None:
        return None
    coords = {canon: parse_coord(text_of(first_local(box, tag))) for tag, canon in _SIDES}
    if any(v is None for v in coords.values()):
        warnings.append("geographicCoverage: uninterpretable bounding coordinates, spatial extent dropped")
        return None
    return BoundingBox(**coords)


def extract(root: ET.Element, warnings: list[str]) -> dict:
    dataset = child_local(root, "dataset")
    if dataset is None:
        return {"title": ""}
    keywords: list[KeywordEntry] = []
    for ks in iter_local(dataset, "keywordSet"):
        vocab = text_of(first_local(ks, "keywordThesaurus")) or None
        for kw in ks:
            if kw.tag.rsplit("}", 1)[-1] != "keyword":
                continue
            path = keyword_path(text_of(kw))
            if path:
                keywords.append(KeywordEntry(path=path, vocabulary=vocab))
    coverage = first_local(dataset, "coverage")
    temporal = _temporal(coverage, warnings) if coverage is not None else None
    spatial = _spatial(coverage, warnings) if coverage is not None else None
    project_el = first_local(dataset, "project")
    project = text_of(first_local(project_el, "title")) if project_el is not None else ""
    dist = first_local(dataset, "distribution")
    url = text_of(first_local(dist, "url")) if dist is not None else ""
    return {
        "title": text_of(child_local(dataset, "title")),
        "abstract": text_of(first_local(dataset, "abstract")),
        "keywords": keywords,
        "temporal_extent": temporal,
        "spatial_extent": spatial,
        "data_link": url or None,
        "metadata_link": None,
        "project": project or None,
        "native_identifier": root.get("packageId") or None,
    }
