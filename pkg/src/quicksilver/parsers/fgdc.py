"""FGDC CSDGM extraction (the `<metadata>` / `<idinfo>` standard)."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..records import BoundingBox, DateRange, KeywordEntry
from .common import child_local, iter_local, keyword_path, parse_coord, parse_date_text, text_of

ABSENT = "(absent in this standard)"

CROSSWALK = {
    "title": "idinfo/citation/citeinfo/title",
    "abstract": "idinfo/descript/abstract",
    "keywords": "idinfo/keywords/theme/themekey + place/placekey (themekt/placekt as vocabulary)",
    "temporal_extent": "idinfo/timeperd/timeinfo (rngdates | sngdate | mdattim)",
    "spatial_extent": "idinfo/spdom/bounding",
    "data_link": "distinfo//networkr",
    "metadata_link": "idinfo/citation/citeinfo/onlink",
    "project": ABSENT,
    "native_identifier": "idinfo/datsetid",
}


def _keywords(idinfo: ET.Element) -> list[KeywordEntry]:
    out: list[KeywordEntry] = []
    kw = idinfo.find("keywords")
    if kw is None:
        return out
    for group in kw:
        tag = group.tag  # theme, place, stratum, temporal
        vocab = text_of(group.find(f"{tag}kt")) or None
        for key in group.findall(f"{tag}key"):
            path = keyword_path(text_of(key))
            if path:
                out.append(KeywordEntry(path=path, vocabulary=vocab))
    return out


def _temporal(idinfo: ET.Element, warnings: list[str]) -> DateRange | None:
    timeinfo = idinfo.find("timeperd/timeinfo")
    if timeinfo is None:
        return None
    rng = timeinfo.find("rngdates")
    if rng is not None:
        begin = parse_date_text(text_of(rng.find("begdate")), "start")
        end = parse_date_text(text_of(rng.find("enddate")), "end")
        if begin and end:
            return DateRange(begin, end)
        warnings.append("timeperd: uninterpretable rngdates, temporal extent dropped")
        return None
    dates = [
        parse_date_text(text_of(cal), "start")
        for cal in iter_local(timeinfo, "caldate")
    ]
    dates = [d for d in dates if d]
    if dates:
        return DateRange(min(dates), max(dates))
    warnings.append("timeperd: uninterpretable dates, temporal extent dropped")
    return None


def _bounding(idinfo: ET.Element, warnings: list[str]) -> BoundingBox | None:
    bounding = idinfo.find("spdom/bounding")
    if bounding is None:
        return None
    coords = {
        side: parse_coord(text_of(bounding.find(side)))
        for side in ("westbc", "eastbc", "southbc", "northbc")
    }
    if any(v is None for v in coords.values()):
        warnings.append("spdom: uninterpretable bounding coordinates, spatial extent dropped")
        return None
    return BoundingBox(
        west=coords["westbc"], east=coords["eastbc"],
        south=coords["southbc"], north=coords["northbc"],
    )


def extract(root: ET.Element, warnings: list[str]) -> dict:
    idinfo = root.find("idinfo")
    if idinfo is None:
        return {"title": ""}
    data_link = None
    distinfo = child_local(root, "distinfo")
    if distinfo is not None:
        for node in iter_local(distinfo, "networkr"):
            if text_of(node):
                data_link = text_of(node)
                break
    return {
        "title": text_of(idinfo.find("citation/citeinfo/title")),
        "abstract": text_of(idinfo.find("descript/abstract")),
        "keywords": _keywords(idinfo),
        "temporal_extent": _temporal(idinfo, warnings),
        "spatial_extent": _bounding(idinfo, warnings),
        "data_link": data_link,
        "metadata_link": text_of(idinfo.find("citation/citeinfo/onlink")) or None,
        "project": None,
        "native_identifier": text_of(idinfo.find("datsetid")) or None,
    }
