"""Dublin Core extraction (simple and oai_dc records).

DC has no dedicated temporal/spatial elements; DCMI Period and Box
encodings inside dc:coverage are recognized, plain place names are left
alone.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from ..records import BoundingBox, DateRange, KeywordEntry
from .common import keyword_path, localname, parse_coord, parse_date_text, text_of

ABSENT = "(absent in this standard)"

CROSSWALK = {
    "title": "dc:title",
    "abstract": "dc:description",
    "keywords": "dc:subject (no vocabulary in DC)",
    "temporal_extent": "dc:coverage (DCMI Period or start/end pair)",
    "spatial_extent": "dc:coverage (DCMI Box)",
    "data_link": "dc:identifier (first http/https value)",
    "metadata_link": ABSENT,
    "project": ABSENT,
    "native_identifier": "dc:identifier (first non-URL value, else first value)",
}

_PAIR_RE = re.compile(r"^\s*([0-9-]{4,10})\s*/\s*([0-9-]{4,10})\s*$")


def _dcmi_pairs(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(";"):
        key, sep, value = part.partition("=")
        if sep:
            out[key.strip().lower()] = value.strip()
    return out


def _coverage(values: list[str], warnings: list[str]) -> tuple[DateRange | None, BoundingBox | None]:
    temporal = None
    spatial = None
    for value in values:
        pairs = _dcmi_pairs(value)
        if "northlimit" in pairs or "westlimit" in pairs:
            coords = {k: parse_coord(pairs.get(k, "")) for k in ("westlimit", "eastlimit", "southlimit", "northlimit")}
            if any(v is None for v in coords.values()):
                warnings.append("coverage: uninterpretable DCMI Box, spatial extent dropped")
                continue
            if spatial is None:
                spatial = BoundingBox(
                    west=coords["westlimit"], east=coords["eastlimit"],
                    south=coords["southlimit"], north=coords["northlimit"],
                )
            continue
        if "start" in pairs or "end" in pairs:
            begin = parse_date_text(pairs.get("start", ""), "start")
            end = parse_date_text(pairs.get("end", ""), "end")
            if begin and end:
                if temporal is None:
                    temporal = DateRange(begin, end)
            else:
                warnings.append("coverage: uninterpretable DCMI Period, temporal extent dropped")
            continue
        m = _PAIR_RE.match(value)
        if m:
            begin = parse_date_text(m.group(1), "start")
            end = parse_date_text(m.group(2), "end")
            if begin and end and temporal is None:
                temporal = DateRange(begin, end)
            elif not (begin and end):
                warnings.append("coverage: uninterpretable date pair, temporal extent dropped")
        # anything else is a place name or free text; not parsed
    return temporal, spatial


def extract(root: ET.Element, warnings: list[str]) -> dict:
    by_name: dict[str, list[str]] = {}
    for node in root.iter():
        name = localname(node.tag)
        value = text_of(node) if len(node) == 0 else ""
        if value:
            by_name.setdefault(name, []).append(value)
    titles = by_name.get("title", [])
    identifiers = by_name.get("identifier", [])
    data_link = next((v for v in identifiers if v.startswith(("http://", "https://"))), None)
    native = next((v for v in identifiers if not v.startswith(("http://", "https://"))), None)
    if native is None and identifiers:
        native = identifiers[0]
    temporal, spatial = _coverage(by_name.get("coverage", []), warnings)
    return {
        "title": titles[0] if titles else "",
        "abstract": "\n\n".join(by_name.get("description", [])),
        "keywords": [
            KeywordEntry(path=keyword_path(s))
            for s in by_name.get("subject", [])
            if keyword_path(s)
        ],
        "temporal_extent": temporal,
        "spatial_extent": spatial,
        "data_link": data_link,
        "metadata_link": None,
        "project": None,
        "native_identifier": native,
    }
