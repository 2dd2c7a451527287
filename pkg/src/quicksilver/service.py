"""Search service core: request validation, response assembly, browse
tree, record views, RSS, and bookmark URLs.

Handlers are read-only and stateless over immutable index snapshots: each
request takes the current snapshot once and uses it throughout, so a
commit landing mid-request never mixes result pages.
"""

from __future__ import annotations

import email.utils
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import date
from typing import Optional
from urllib.parse import quote

from .config import SystemConfig
from .index import SearchIndex, Snapshot
from .index.engine import FACET_FIELDS, SORT_KEYS
from .parsers import make_snippet, render_full_text, render_summary_view
from .querylang import QueryError, QueryNode, normalize_ast, parse_query, render_query
from .records import BoundingBox, DateRange, MetadataRecord
from .store import DocumentStore


class ServiceError(Exception):
    http_status = 500
    code = "internal"

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.offset = offset

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.offset is not None:
            out["offset"] = self.offset
        return out


class BadRequest(ServiceError):
    http_status = 400
    code = "bad_request"


class QuerySyntax(BadRequest):
    code = "query_syntax"


class NotFound(ServiceError):
    http_status = 404
    code = "not_found"


class Unauthorized(ServiceError):
    http_status = 401
    code = "unauthorized"


@dataclass(frozen=True)
class SearchRequest:
    q: str = ""
    start: int = 0
    rows: int = 10
    sort: str = "index_rank"
    date_start: Optional[str] = None
    date_end: Optional[str] = None
    bbox: Optional[str] = None
    match_all: bool = False
    facet_fields: Optional[tuple] = None


@dataclass(frozen=True)
class _Validated:
    ast: Optional[QueryNode]
    canonical_q: str
    date_range: Optional[DateRange]
    bbox: Optional[BoundingBox]
    sort: str
    start: int
    rows: int
    match_all: bool
    facet_fields: tuple


def _parse_iso_date(value: str, name: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise BadRequest(f"{name} must be an ISO date (YYYY-MM-DD): {value!r}") from exc


def parse_bbox_param(value: str) -> BoundingBox:
    """Query-string bbox is 'west,south,east,north' in decimal degrees."""
    parts = value.split(",")
    if len(parts) != 4:
        raise BadRequest(f"bbox must be 'west,south,east,north': {value!r}")
    try:
        west, south, east, north = (float(p) for p in parts)
    except ValueError as exc:
        raise BadRequest(f"bbox has a non-numeric coordinate: {value!r}") from exc
    box = BoundingBox(west=west, east=east, south=south, north=north)
    if south > north:
        raise BadRequest("bbox south exceeds north")
    if not (-90 <= south <= 90 and -90 <= north <= 90):
        raise BadRequest("bbox latitudes must lie in [-90, 90]")
    if not (-180 <= west <= 180 and -180 <= east <= 180):
        raise BadRequest("bbox longitudes must lie in [-180, 180]")
    return box


def format_bbox_param(box: BoundingBox) -> str:
    return ",".join(f"{v:g}" for v in (box.west, box.south, box.east, box.north))


def sort_hits(hits: list, sort: str) -> list:
    """Order response hit dicts by the named key, id as final tiebreaker.
    Same ordering contract the index applies internally."""
    if sort not in SORT_KEYS:
        raise BadRequest(f"unknown sort '{sort}'")

    def key(h: dict):
        if sort == "index_rank":
            primary = (-h.get("score", 0.0),)
        elif sort == "period_of_record":
            dr = h.get("date_range")
            primary = (0, -date.fromisoformat(dr["end"]).toordinal()) if dr else (1, 0)
        elif sort == "source":
            primary = (h["datasource"]["value"],)
        else:  # project
            proj = h.get("project")
            primary = (0, proj.lower()) if proj else (1, "")
        return primary + (h["id"],)

    return sorted(hits, key=key)


class SearchService:
    def __init__(self, index: SearchIndex, store: DocumentStore, config: SystemConfig):
        self.index = index
        self.store = store
        self.config = config
        self._ds_labels = config.datasource_labels()

    # -- validation ----------------------------------------------------

    def _validate(self, req: SearchRequest) -> _Validated:
        if req.start < 0:
            raise BadRequest("start must be >= 0")
        if not 1 <= req.rows <= 100:
            raise BadRequest("rows must be between 1 and 100")
        if req.sort not in SORT_KEYS:
            raise BadRequest(f"unknown sort '{req.sort}'; expected one of {', '.join(SORT_KEYS)}")
        facet_fields = tuple(req.facet_fields) if req.facet_fields else FACET_FIELDS
        for f in facet_fields:
            if f not in FACET_FIELDS:
                raise BadRequest(f"unknown facet field '{f}'")
        date_range = None
        if req.date_start or req.date_end:
            start = _parse_iso_date(req.date_start, "date_start") if req.date_start else date.min
            end = _parse_iso_date(req.date_end, "date_end") if req.date_end else date.max
            if start > end:
                raise BadRequest("date_start is after date_end")
            date_range = DateRange(start, end)
        bbox = parse_bbox_param(req.bbox) if req.bbox else None
        ast = None
        canonical_q = ""
        if req.q and req.q.strip():
            try:
                ast = normalize_ast(parse_query(req.q))
            except QueryError as exc:
                raise QuerySyntax(exc.message, offset=exc.offset) from exc
            canonical_q = render_query(ast)
        elif not (req.match_all or date_range or bbox):
            raise BadRequest(
                "empty query: provide q, a date/bbox filter, or match_all=true"
            )
        return _Validated(
            ast=ast,
            canonical_q=canonical_q,
            date_range=date_range,
            bbox=bbox,
            sort=req.sort,
            start=req.start,
            rows=req.rows,
            match_all=req.match_all,
            facet_fields=facet_fields,
        )

    # -- search --------------------------------------------------------

    def handle_search(self, req: SearchRequest, snapshot: Optional[Snapshot] = None) -> dict:
        v = self._validate(req)
        snap = snapshot or self.index.current()
        result = snap.search(
            v.ast,
            date_range=v.date_range,
            bbox=v.bbox,
            sort=v.sort,
            start=v.start,
            rows=v.rows,
        )
        facets = snap.facet_counts(result.candidate_ords, v.facet_fields, top_k=10)
        # stars quantize against the best score in the whole result set,
        # which may not be on this page
        hits = [self._hit_payload(snap, h, result.top_score) for h in result.hits]
        return {
            "total": result.total,
            "start": v.start,
            "rows": v.rows,
            "sort": v.sort,
            "q": v.canonical_q,
            "hits": hits,
            "facets": {
                fname: [
                    {"value": value, "label": self._facet_label(snap, fname, value), "count": count}
                    for value, count in entries
                ]
                for fname, entries in facets.items()
            },
            "bookmark_url": self.bookmark_url(req),
        }

    def _facet_label(self, snap: Snapshot, fname: str, value: str) -> str:
        if fname == "datasource" and value in self._ds_labels:
            return self._ds_labels[value]
        return snap.labels.get(fname, {}).get(value, value)

    def _hit_payload(self, snap: Snapshot, hit, top_score: float) -> dict:
        rec = snap.get_record(hit.id)
        stars = None
        if top_score > 0:
            stars = max(1, min(10, int(round(10.0 * hit.score / top_score))))
        return {
            "id": rec.id,
            "title": rec.title,
            "date_range": rec.temporal_extent.to_dict() if rec.temporal_extent else None,
            "datasource": {
                "value": rec.data_source,
                "label": self._ds_labels.get(rec.data_source, rec.data_source),
            },
            "project": rec.project,
            "snippet": make_snippet(rec, self.config.defaults.snippet_chars),
            "stars": stars,
            "score": hit.score,
            "data_link": rec.data_link,
            "metadata_link": rec.metadata_link,
            "matched_fields": hit.matched_fields,
        }

    # -- record views ----------------------------------------------------

    def get_record(self, record_id: str, style: str = "summary"):
        snap = self.index.current()
        rec = snap.get_record(record_id)
        if rec is None:
            raise NotFound(f"no record with id '{record_id}'")
        if style == "summary":
            return {"id": rec.id, "style": "summary", "rows": render_summary_view(rec)}
        if style == "fgdc_text":
            raw = self.store.load_raw(rec.raw_document_ref) if rec.raw_document_ref else None
            return render_full_text(rec, raw)
        raise BadRequest(f"unknown style '{style}'; expected summary or fgdc_text")

    def record_object(self, record_id: str) -> MetadataRecord:
        rec = self.index.current().get_record(record_id)
        if rec is None:
            raise NotFound(f"no record with id '{record_id}'")
        return rec

    # -- browse tree -----------------------------------------------------

    def browse(self, path: str = "") -> dict:
        snap = self.index.current()
        segments = tuple(seg for seg in path.split("/") if seg) if path else ()
        children = snap.browse_children(segments)
        if children is None:
            raise NotFound(f"no browse node at '{path}'")
        return {
            "path": list(segments),
            "children": [
                {"segment": seg, "count": count, "has_children": more}
                for seg, count, more in children
            ],
        }

    # -- feeds and bookmarks ----------------------------------------------

    def bookmark_url(self, req: SearchRequest) -> str:
        """Canonical absolute URL for a search: fixed parameter order and
        canonical q rendering, so equal semantics give equal URLs."""
        v = self._validate(req)
        params: list[tuple[str, str]] = [("q", v.canonical_q)]
        if v.date_range is not None:
            if v.date_range.start != date.min:
                params.append(("date_start", v.date_range.start.isoformat()))
            if v.date_range.end != date.max:
                params.append(("date_end", v.date_range.end.isoformat()))
        if v.bbox is not None:
            params.append(("bbox", format_bbox_param(v.bbox)))
        params.append(("sort", v.sort))
        params.append(("start", str(v.start)))
        params.append(("rows", str(v.rows)))
        if v.match_all:
            params.append(("match_all", "true"))
        query = "&".join(f"{k}={quote(val, safe='')}" for k, val in params)
        return f"{self.config.server.public_base()}/api/search?{query}"

    def render_rss(self, req: SearchRequest) -> bytes:
        """RSS 2.0 feed of the current results page; re-running the feed
        re-executes the query."""
        response = self.handle_search(req)
        base = self.config.server.public_base()
        rss = ET.Element("rss", version="2.0")
        channel = ET.SubElement(rss, "channel")
        ET.SubElement(channel, "title").text = f"Search: {response['q']}"
        ET.SubElement(channel, "link").text = response["bookmark_url"]
        ET.SubElement(channel, "description").text = (
            f"{response['total']} records matching this search"
        )
        snap = self.index.current()
        for hit in response["hits"]:
            item = ET.SubElement(channel, "item")
            ET.SubElement(item, "title").text = hit["title"]
            link = hit["metadata_link"] or f"{base}/api/record/{hit['id']}?style=summary"
            ET.SubElement(item, "link").text = link
            ET.SubElement(item, "description").text = hit["snippet"]
            guid = ET.SubElement(item, "guid", isPermaLink="false")
            guid.text = hit["id"]
            rec = snap.get_record(hit["id"])
            if rec is not None and rec.provenance is not None:
                pub = ET.SubElement(item, "pubDate")
                pub.text = email.utils.format_datetime(rec.provenance.fetched_at)
        return ET.tostring(rss, encoding="utf-8", xml_declaration=True)

    # -- health ------------------------------------------------------------

    def health(self) -> dict:
        snap = self.index.current()
        return {
            "status": "ok",
            "record_count": snap.n_docs,
            "snapshot_version": snap.version,
        }
