"""Canonical metadata record model.

Every parser emits a MetadataRecord and everything downstream (index,
search service, feeds, UI) consumes it. Types are frozen dataclasses:
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from enum import Enum
from typing import Any, Optional
from urllib.parse import urlparse


class MetadataFormat(str, Enum):
    DUBLIN_CORE = "dublin_core"
    FGDC = "fgdc"
    EML = "eml"
    ISO19115 = "iso19115"


class KeywordCategory(str, Enum):
    PARAMETER = "parameter"
    SENSOR = "sensor"
    TOPIC = "topic"
    PROJECT = "project"
    SOURCE = "source"
    UNCATEGORIZED = "uncategorized"


_DATASOURCE_TOKEN = re.compile(r"^[a-z0-9][a-z0-9_.-]*$")


@dataclass(frozen=True)
class DateRange:
    """Inclusive calendar-day range."""

    start: date
    end: date

    def to_dict(self) -> dict:
        return {"start": self.start.isoformat(), "end": self.end.isoformat()}

    @classmethod
    def from_dict(cls, d: dict) -> "DateRange":
        return cls(date.fromisoformat(d["start"]), date.fromisoformat(d["end"]))


@dataclass(frozen=True)
class BoundingBox:
    """Geographic extent in decimal degrees.

    west > east is legal and denotes a box crossing the antimeridian
    (two longitude intervals: [west, 180] and [-180, east]).
    """

    west: float
    east: float
    south: float
    north: float

    def lon_intervals(self) -> list[tuple[float, float]]:
        if self.west <= self.east:
            return [(self.west, self.east)]
        return [(self.west, 180.0), (-180.0, self.east)]

    def to_dict(self) -> dict:
        return {"west": self.west, "east": self.east, "south": self.south, "north": self.north}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundingBox":
        return cls(float(d["west"]), float(d["east"]), float(d["south"]), float(d["north"]))


@dataclass(frozen=True)
class KeywordEntry:
    """One keyword, possibly hierarchical (root -> leaf path).

    ``vocabulary`` is the source thesaurus name when the metadata declared
    one; classification rules may match on it.
    """

    path: tuple[str, ...]
    category: Optional[KeywordCategory] = None
    vocabulary: Optional[str] = None

    @property
    def leaf(self) -> str:
        return self.path[-1]

    def to_dict(self) -> dict:
        return {
            "path": list(self.path),
            "category": self.category.value if self.category else None,
            "vocabulary": self.vocabulary,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KeywordEntry":
        cat = d.get("category")
        return cls(
            path=tuple(d["path"]),
            category=KeywordCategory(cat) if cat else None,
            vocabulary=d.get("vocabulary"),
        )


@dataclass(frozen=True)
class Provenance:
    source_id: str
    fetched_at: datetime
    checksum: str
    origin_url: str

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "fetched_at": self.fetched_at.isoformat(),
            "checksum": self.checksum,
            "origin_url": self.origin_url,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(
            source_id=d["source_id"],
            fetched_at=datetime.fromisoformat(d["fetched_at"]),
            checksum=d["checksum"],
            origin_url=d["origin_url"],
        )


@dataclass(frozen=True)
class MetadataRecord:
    """Normalized record: the unit of harvest, index, and display."""

    id: str
    title: str
    abstract: str
    keywords: tuple[KeywordEntry, ...]
    data_source: str
    native_format: MetadataFormat
    native_identifier: str
    project: Optional[str] = None
    temporal_extent: Optional[DateRange] = None
    spatial_extent: Optional[BoundingBox] = None
    data_link: Optional[str] = None
    metadata_link: Optional[str] = None
    raw_document_ref: Optional[str] = None
    provenance: Optional[Provenance] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "abstract": self.abstract,
            "keywords": [k.to_dict() for k in self.keywords],
            "data_source": self.data_source,
            "project": self.project,
            "temporal_extent": self.temporal_extent.to_dict() if self.temporal_extent else None,
            "spatial_extent": self.spatial_extent.to_dict() if self.spatial_extent else None,
            "data_link": self.data_link,
            "metadata_link": self.metadata_link,
            "native_format": self.native_format.value,
            "native_identifier": self.native_identifier,
            "raw_document_ref": self.raw_document_ref,
            "provenance": self.provenance.to_dict() if self.provenance else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetadataRecord":
        return cls(
            id=d["id"],
            title=d["title"],
            abstract=d.get("abstract") or "",
            keywords=tuple(KeywordEntry.from_dict(k) for k in d.get("keywords", [])),
            data_source=d["data_source"],
            project=d.get("project"),
            temporal_extent=DateRange.from_dict(d["temporal_extent"]) if d.get("temporal_extent") else None,
            spatial_extent=BoundingBox.from_dict(d["spatial_extent"]) if d.get("spatial_extent") else None,
            data_link=d.get("data_link"),
            metadata_link=d.get("metadata_link"),
            native_format=MetadataFormat(d["native_format"]),
            native_identifier=d["native_identifier"],
            raw_document_ref=d.get("raw_document_ref"),
            provenance=Provenance.from_dict(d["provenance"]) if d.get("provenance") else None,
        )


@dataclass(frozen=True)
class Violation:
    field: str
    message: str


class RecordIdError(ValueError):
    pass


def compute_record_id(source_id: str, native_identifier: str) -> str:
    """Stable content-addressed id for a record.

    Fields are length-framed before hashing so no (source_id, identifier)
    pair can collide with another by moving bytes across the separator.
    """
    if not source_id or not native_identifier:
        raise RecordIdError("source_id and native_identifier must be non-empty")
    src = source_id.encode("utf-8")
    nat = native_identifier.encode("utf-8")
    framed = str(len(src)).encode("ascii") + b"\n" + src + b"\n" + nat
    return hashlib.sha256(framed).hexdigest()


def content_checksum(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def validate_record(record: MetadataRecord) -> list[Violation]:
    """Check every invariant of the record and its nested values.

    Returns the full list of violations; an empty list means valid.
    """
    out: list[Violation] = []
    if not record.id:
        out.append(Violation("id", "id must be non-empty"))
    if not record.title or not record.title.strip():
        out.append(Violation("title", "title must be non-empty after trimming"))
    if not record.data_source or not _DATASOURCE_TOKEN.match(record.data_source):
        out.append(Violation("data_source", "data_source must be a lowercase ASCII token with no whitespace"))
    if not record.native_identifier:
        out.append(Violation("native_identifier", "native_identifier must be non-empty"))
    for i, kw in enumerate(record.keywords):
        if not kw.path or any(not seg or not seg.strip() for seg in kw.path):
            out.append(Violation("keywords", f"keyword {i} has an empty path segment"))
    te = record.temporal_extent
    if te is not None and te.start > te.end:
        out.append(Violation("temporal_extent", "start must not be after end"))
    bb = record.spatial_extent
    if bb is not None:
        if bb.south > bb.north:
            out.append(Violation("spatial_extent", "south must not exceed north"))
        if not (-90.0 <= bb.south <= 90.0) or not (-90.0 <= bb.north <= 90.0):
            out.append(Violation("spatial_extent", "latitudes must lie in [-90, 90]"))
        if not (-180.0 <= bb.west <= 180.0) or not (-180.0 <= bb.east <= 180.0):
            out.append(Violation("spatial_extent", "longitudes must lie in [-180, 180]"))
    for name, url in (("data_link", record.data_link), ("metadata_link", record.metadata_link)):
        if url is not None and not urlparse(url).scheme:
            out.append(Violation(name, "link must be an absolute URL"))
    return out


@dataclass(frozen=True)
class CategoryRule:
    """Maps keywords to a facet category.

    A rule matches when the keyword's path root is one of ``roots`` or the
    declared vocabulary name contains ``vocabulary_contains`` (both
    case-insensitive). Rules apply in list order; first match wins.
    """

    category: KeywordCategory
    roots: tuple[str, ...] = ()
    vocabulary_contains: Optional[str] = None

    def matches(self, entry: KeywordEntry) -> bool:
        if self.roots and entry.path[0].strip().lower() in self.roots:
            return True
        if self.vocabulary_contains and entry.vocabulary:
            return self.vocabulary_contains in entry.vocabulary.lower()
        return False

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "roots": list(self.roots),
            "vocabulary_contains": self.vocabulary_contains,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CategoryRule":
        return cls(
            category=KeywordCategory(d["category"]),
            roots=tuple(r.lower() for r in d.get("roots", [])),
            vocabulary_contains=(d.get("vocabulary_contains") or None),
        )


CategoryRuleSet = list[CategoryRule]

# The paper-era portals grouped keywords into parameter / sensor / topic /
# project panels but the mapping itself was configuration; this default
# covers the vocabulary names and sphere roots seen in common earth-science
# metadata. Operators override it in the system config.
DEFAULT_CATEGORY_RULES: CategoryRuleSet = [
    CategoryRule(KeywordCategory.PROJECT, vocabulary_contains="project"),
    CategoryRule(KeywordCategory.SENSOR, vocabulary_contains="sensor"),
    CategoryRule(KeywordCategory.SENSOR, vocabulary_contains="instrument"),
    CategoryRule(
        KeywordCategory.TOPIC,
        roots=(
            "biosphere",
            "atmosphere",
            "hydrosphere",
            "cryosphere",
            "land",
            "surface",
            "oceans",
            "solid earth",
            "climate indicators",
        ),
        vocabulary_contains="topic",
    ),
    CategoryRule(KeywordCategory.PARAMETER, vocabulary_contains="parameter"),
    CategoryRule(KeywordCategory.PARAMETER, vocabulary_contains="science keyword"),
    CategoryRule(KeywordCategory.PARAMETER, vocabulary_contains="gcmd"),
]


def classify_keywords(record: MetadataRecord, rules: CategoryRuleSet) -> MetadataRecord:
    """Assign a category to each keyword via the first matching rule.

    Categories already assigned by a parser crosswalk are kept. Unmatched
    keywords become ``uncategorized``. Idempotent: rules only consult the
    immutable path root and vocabulary, so a second pass is a no-op.
    """
    changed = False
    new_entries = []
    for kw in record.keywords:
        if kw.category is not None and kw.category is not KeywordCategory.UNCATEGORIZED:
            new_entries.append(kw)
            continue
        category = KeywordCategory.UNCATEGORIZED
        for rule in rules:
            if rule.matches(kw):
                category = rule.category
                break
        if kw.category is not category:
            kw = replace(kw, category=category)
            changed = True
        new_entries.append(kw)
    if not changed:
        return record
    return replace(record, keywords=tuple(new_entries))


def finalize_record(record: MetadataRecord, rules: CategoryRuleSet) -> MetadataRecord:
    """Classification plus derived-field backfill, applied after parsing.

    If the source format had no project element but a keyword was
    classified as a project name (e.g. an FGDC theme with a project
    thesaurus), promote that keyword's leaf to the project field.
    """
    record = classify_keywords(record, rules)
    if record.project is None:
        for kw in record.keywords:
            if kw.category is KeywordCategory.PROJECT:
                record = replace(record, project=kw.leaf)
                break
    return record


def utc_now() -> datetime:
    return datetime.now(timezone.utc)
