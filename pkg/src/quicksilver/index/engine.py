"""From-scratch search index.

A single writer mutates the live document set (add / delete) and
``commit`` publishes an immutable :class:`Snapshot` holding tokenized
postings with BM25 statistics, per-field facet columns, temporal and
spatial filter columns, and the keyword browse tree. Readers take the
current snapshot reference once and never observe partial batches.

Document ordinals are assigned in sorted-id order at commit time, which
makes snapshots deterministic for a given document set and gives every
sort a free id-ascending tiebreak.
"""

from __future__ import annotations

import hashlib
import json
import math
import pickle
import struct
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ..querylang import (
    And,
    FieldSet,
    KNOWN_FIELDS,
    Or,
    QueryNode,
    Term,
    UnknownFieldError,
    collect_terms,
)
from ..records import (
    BoundingBox,
    DateRange,
    KeywordCategory,
    MetadataRecord,
    validate_record,
)
from .analysis import facet_token, tokenize

BM25_K1 = 1.2
BM25_B = 0.75

SNAPSHOT_MAGIC = b"QSIX"
SNAPSHOT_FORMAT_VERSION = 1

FACET_FIELDS = ("datasource", "project", "parameter", "sensor", "topic")
TEXT_FIELDS = ("fulltext", "title", "abstract", "keyword")

_CATEGORY_TO_FACET = {
    KeywordCategory.PARAMETER: "parameter",
    KeywordCategory.SENSOR: "sensor",
    KeywordCategory.TOPIC: "topic",
}

SORT_KEYS = ("index_rank", "period_of_record", "source", "project")


class InvalidRecordError(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(f"{v.field}: {v.message}" for v in violations))
        self.violations = violations


class SnapshotFormatError(RuntimeError):
    """Snapshot file is unreadable or from another format version."""


def score_bm25(tf: float, df: int, n_docs: int, doc_len: float, avg_len: float) -> float:
    """BM25 contribution of one term occurrence set in one document."""
    if tf <= 0 or df <= 0 or n_docs <= 0:
        return 0.0
    idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
    norm = 1.0 - BM25_B + BM25_B * (doc_len / avg_len) if avg_len > 0 else 1.0 - BM25_B
    return idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm)


def date_overlaps(a: DateRange, b: DateRange) -> bool:
    """Inclusive interval overlap."""
    return a.start <= b.end and b.start <= a.end


def _intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def bbox_intersects(a: BoundingBox, b: BoundingBox) -> bool:
    """Inclusive box intersection; antimeridian-crossing boxes are treated
    as two longitude intervals and any pair overlap counts."""
    if a.south > b.north or b.south > a.north:
        return False
    return any(
        _intervals_overlap(ia, ib)
        for ia in a.lon_intervals()
        for ib in b.lon_intervals()
    )


@dataclass(frozen=True)
class Hit:
    id: str
    score: float
    matched_fields: dict


@dataclass(frozen=True)
class SearchResult:
    total: int
    hits: list
    candidate_ords: np.ndarray  # pre-paging result set, for facet counting
    top_score: float = 0.0  # best score in the whole result set


@dataclass
class _FacetColumn:
    offsets: np.ndarray  # int64[N+1], CSR row pointers
    value_ids: np.ndarray  # int32, indexes into values
    values: list  # distinct tokens


class _TreeNode:
    __slots__ = ("count", "children")

    def __init__(self):
        self.count = 0
        self.children: dict[str, _TreeNode] = {}


class Snapshot:
    """Immutable committed view of the index. Safe to share across threads."""

    def __init__(self, records: list[MetadataRecord]):
        records = sorted(records, key=lambda r: r.id)
        self.records = records
        self.n_docs = len(records)
        self.ids = [r.id for r in records]
        self.ord_by_id = {r.id: i for i, r in enumerate(records)}
        self._build_text_and_facets()
        self._build_filter_columns()
        self._build_sort_keys()
        self._build_browse_tree()
        self.version = self._content_hash()

    # -- construction -------------------------------------------------

    @staticmethod
    def _field_texts(rec: MetadataRecord) -> dict[str, str]:
        leaves = " ".join(k.leaf for k in rec.keywords)
        return {
            "title": rec.title,
            "abstract": rec.abstract,
            "keyword": leaves,
            "fulltext": f"{rec.title} {rec.abstract} {leaves}",
        }

    @staticmethod
    def _facet_tokens(rec: MetadataRecord) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {f: [] for f in FACET_FIELDS}
        out["datasource"] = [rec.data_source]
        if rec.project:
            tok = facet_token(rec.project)
            if tok:
                out["project"] = [tok]
        buckets: dict[str, set[str]] = {"parameter": set(), "sensor": set(), "topic": set()}
        for kw in rec.keywords:
            facet = _CATEGORY_TO_FACET.get(kw.category) if kw.category else None
            if facet:
                tok = facet_token(kw.leaf)
                if tok:
                    buckets[facet].add(tok)
        for name, toks in buckets.items():
            out[name] = sorted(toks)
        return out

    def _build_text_and_facets(self) -> None:
        acc: dict[tuple[str, str], list[tuple[int, float]]] = {}
        doc_len: dict[str, np.ndarray] = {
            f: np.zeros(self.n_docs, dtype=np.float64) for f in TEXT_FIELDS + FACET_FIELDS
        }
        self.labels: dict[str, dict[str, str]] = {f: {} for f in FACET_FIELDS}
        facet_values: dict[str, list[str]] = {f: [] for f in FACET_FIELDS}
        facet_vid: dict[str, dict[str, int]] = {f: {} for f in FACET_FIELDS}
        facet_flat: dict[str, list[int]] = {f: [] for f in FACET_FIELDS}
        facet_offsets: dict[str, np.ndarray] = {
            f: np.zeros(self.n_docs + 1, dtype=np.int64) for f in FACET_FIELDS
        }
        for ordn, rec in enumerate(self.records):
            for fname, text in self._field_texts(rec).items():
                toks = tokenize(text)
                doc_len[fname][ordn] = len(toks)
                counts: dict[str, int] = {}
                for t in toks:
                    counts[t] = counts.get(t, 0) + 1
                for t, c in counts.items():
                    acc.setdefault((fname, t), []).append((ordn, float(c)))
            for fname, toks in self._facet_tokens(rec).items():
                doc_len[fname][ordn] = len(toks)
                vid = facet_vid[fname]
                values = facet_values[fname]
                flat = facet_flat[fname]
                for t in toks:
                    acc.setdefault((fname, t), []).append((ordn, 1.0))
                    if t not in vid:
                        vid[t] = len(values)
                        values.append(t)
                    flat.append(vid[t])
                facet_offsets[fname][ordn + 1] = len(flat)
            self._record_labels(rec)
        self.postings: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}
        for key, pairs in acc.items():
            ords = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
            tfs = np.fromiter((p[1] for p in pairs), dtype=np.float64, count=len(pairs))
            self.postings[key] = (ords, tfs)
        self.doc_len = doc_len
        self.avg_len = {
            f: (float(arr.sum()) / self.n_docs if self.n_docs else 0.0)
            for f, arr in doc_len.items()
        }
        self.facet_columns = {
            f: _FacetColumn(
                offsets=facet_offsets[f],
                value_ids=np.asarray(facet_flat[f], dtype=np.int32),
                values=facet_values[f],
            )
            for f in FACET_FIELDS
        }

    def _record_labels(self, rec: MetadataRecord) -> None:
        self.labels["datasource"].setdefault(rec.data_source, rec.data_source)
        if rec.project:
            tok = facet_token(rec.project)
            if tok:
                self.labels["project"].setdefault(tok, rec.project.lower())
        for kw in rec.keywords:
            facet = _CATEGORY_TO_FACET.get(kw.category) if kw.category else None
            if facet:
                tok = facet_token(kw.leaf)
                if tok:
                    self.labels[facet].setdefault(tok, kw.leaf.lower())

    def _build_filter_columns(self) -> None:
        n = self.n_docs
        self.t_start = np.zeros(n, dtype=np.int64)
        self.t_end = np.zeros(n, dtype=np.int64)
        self.has_temporal = np.zeros(n, dtype=bool)
        self.bb_west = np.zeros(n, dtype=np.float64)
        self.bb_east = np.zeros(n, dtype=np.float64)
        self.bb_south = np.zeros(n, dtype=np.float64)
        self.bb_north = np.zeros(n, dtype=np.float64)
        self.has_spatial = np.zeros(n, dtype=bool)
        for i, rec in enumerate(self.records):
            if rec.temporal_extent:
                self.t_start[i] = rec.temporal_extent.start.toordinal()
                self.t_end[i] = rec.temporal_extent.end.toordinal()
                self.has_temporal[i] = True
            if rec.spatial_extent:
                bb = rec.spatial_extent
                self.bb_west[i] = bb.west
                self.bb_east[i] = bb.east
                self.bb_south[i] = bb.south
                self.bb_north[i] = bb.north
                self.has_spatial[i] = True

    def _build_sort_keys(self) -> None:
        self._ds_key = np.array([r.data_source for r in self.records], dtype="U64")
        self._proj_key = np.array(
            [(r.project.lower() if r.project else "￿") for r in self.records],
            dtype="U128",
        )
        end_sentinel = np.iinfo(np.int64).max
        self._period_key = np.where(self.has_temporal, -self.t_end, end_sentinel)

    def _build_browse_tree(self) -> None:
        root = _TreeNode()
        for rec in self.records:
            seen_prefixes: set[tuple[str, ...]] = set()
            for kw in rec.keywords:
                prefix: tuple[str, ...] = ()
                node = root
                for seg in kw.path:
                    key = seg.strip().lower()
                    prefix = prefix + (key,)
                    node = node.children.setdefault(key, _TreeNode())
                    if prefix not in seen_prefixes:
                        seen_prefixes.add(prefix)
                        node.count += 1
        self.browse_root = root

    def _content_hash(self) -> str:
        h = hashlib.sha256()
        for rec in self.records:
            h.update(json.dumps(rec.to_dict(), sort_keys=True).encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()

    # -- query evaluation ---------------------------------------------

    def _term_ords(self, fname: str, token: str) -> np.ndarray:
        if fname not in KNOWN_FIELDS:
            raise UnknownFieldError(fname, 0)
        p = self.postings.get((fname, token))
        if p is None:
            return np.empty(0, dtype=np.int64)
        return p[0]

    def _eval(self, node: QueryNode) -> np.ndarray:
        if isinstance(node, Term):
            return self._term_ords(node.field, node.token)
        if isinstance(node, FieldSet):
            arrs = [self._term_ords(node.field, v) for v in node.values]
            out = arrs[0]
            for a in arrs[1:]:
                out = np.union1d(out, a)
            return out
        if isinstance(node, And):
            arrs = sorted((self._eval(c) for c in node.children), key=len)
            out = arrs[0]
            for a in arrs[1:]:
                if len(out) == 0:
                    break
                out = np.intersect1d(out, a, assume_unique=True)
            return out
        if isinstance(node, Or):
            out = self._eval(node.children[0])
            for c in node.children[1:]:
                out = np.union1d(out, self._eval(c))
            return out
        raise TypeError(f"not a query node: {node!r}")

    def _apply_filters(
        self,
        ords: np.ndarray,
        date_range: Optional[DateRange],
        bbox: Optional[BoundingBox],
    ) -> np.ndarray:
        if date_range is not None and len(ords):
            qs = date_range.start.toordinal()
            qe = date_range.end.toordinal()
            mask = (
                self.has_temporal[ords]
                & (self.t_start[ords] <= qe)
                & (self.t_end[ords] >= qs)
            )
            ords = ords[mask]
        if bbox is not None and len(ords):
            lat = (
                self.has_spatial[ords]
                & (self.bb_south[ords] <= bbox.north)
                & (self.bb_north[ords] >= bbox.south)
            )
            lon = np.zeros(len(ords), dtype=bool)
            doc_wraps = self.bb_west[ords] > self.bb_east[ords]
            for qw, qe_ in bbox.lon_intervals():
                # non-wrapping documents: single interval test
                plain = (~doc_wraps) & (self.bb_west[ords] <= qe_) & (self.bb_east[ords] >= qw)
                # wrapping documents: [west, 180] or [-180, east]
                wrap = doc_wraps & ((self.bb_west[ords] <= qe_) | (self.bb_east[ords] >= qw))
                lon |= plain | wrap
            ords = ords[lat & lon]
        return ords

    def _scores(self, cands: np.ndarray, terms: list[tuple[str, str]]) -> np.ndarray:
        scores = np.zeros(len(cands), dtype=np.float64)
        if not len(cands):
            return scores
        n = self.n_docs
        for fname, token in terms:
            p = self.postings.get((fname, token))
            if p is None:
                continue
            ords, tfs = p
            df = len(ords)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            pos = np.searchsorted(ords, cands)
            pos = np.minimum(pos, df - 1)
            present = ords[pos] == cands
            if not present.any():
                continue
            tf = tfs[pos][present]
            dl = self.doc_len[fname][cands[present]]
            avg = self.avg_len[fname]
            norm = 1.0 - BM25_B + (BM25_B * dl / avg if avg > 0 else 0.0)
            scores[present] += idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm)
        return scores

    def _order(self, cands: np.ndarray, scores: np.ndarray, sort: str) -> np.ndarray:
        if sort == "index_rank":
            key = -scores
        elif sort == "period_of_record":
            key = self._period_key[cands]
        elif sort == "source":
            key = self._ds_key[cands]
        elif sort == "project":
            key = self._proj_key[cands]
        else:
            raise ValueError(f"unknown sort key '{sort}'")
        # secondary key: ordinal ascending == id ascending
        return cands[np.lexsort((cands, key))]

    def search(
        self,
        ast: Optional[QueryNode],
        date_range: Optional[DateRange] = None,
        bbox: Optional[BoundingBox] = None,
        sort: str = "index_rank",
        start: int = 0,
        rows: int = 10,
    ) -> SearchResult:
        """Boolean match, filter, score, sort, page.

        ``ast=None`` matches all documents (filter-only and match-all
        queries). Documents without a temporal/spatial extent never match
        when the corresponding filter is present.
        """
        if ast is not None:
            cands = self._eval(ast)
        else:
            cands = np.arange(self.n_docs, dtype=np.int64)
        cands = self._apply_filters(cands, date_range, bbox)
        terms = collect_terms(ast) if ast is not None else []
        scores = self._scores(cands, terms)
        ordered = self._order(cands, scores, sort)
        total = int(len(cands))
        page = ordered[start : start + rows] if rows > 0 else ordered[:0]
        # cands stays sorted through evaluation and filtering
        page_pos = np.searchsorted(cands, page)
        hits = [
            Hit(
                id=self.ids[o],
                score=float(scores[p]),
                matched_fields=self._matched_fields(o, terms),
            )
            for o, p in zip(page.tolist(), page_pos.tolist())
        ]
        top = float(scores.max()) if len(scores) else 0.0
        return SearchResult(total=total, hits=hits, candidate_ords=cands, top_score=top)

    def _matched_fields(self, ordn: int, terms: list[tuple[str, str]]) -> dict:
        out: dict[str, list[str]] = {}
        for fname, token in terms:
            p = self.postings.get((fname, token))
            if p is None:
                continue
            ords = p[0]
            i = np.searchsorted(ords, ordn)
            if i < len(ords) and ords[i] == ordn:
                out.setdefault(fname, []).append(token)
        return out

    def facet_counts(
        self,
        candidate_ords: np.ndarray,
        facet_fields: Iterable[str] = FACET_FIELDS,
        top_k: Optional[int] = None,
    ) -> dict[str, list[tuple[str, int]]]:
        """Per-field (value, count) over the candidate set, sorted by count
        descending then value ascending, truncated to top_k."""
        out: dict[str, list[tuple[str, int]]] = {}
        cands = np.asarray(candidate_ords, dtype=np.int64)
        for f in facet_fields:
            col = self.facet_columns.get(f)
            if col is None:
                raise UnknownFieldError(f, 0)
            if len(cands) == 0 or len(col.value_ids) == 0:
                out[f] = []
                continue
            lengths = col.offsets[cands + 1] - col.offsets[cands]
            total = int(lengths.sum())
            if total == 0:
                out[f] = []
                continue
            starts = col.offsets[cands]
            seg_origin = np.repeat(starts - (np.cumsum(lengths) - lengths), lengths)
            vals = col.value_ids[seg_origin + np.arange(total)]
            counts = np.bincount(vals, minlength=len(col.values))
            present = [
                (col.values[i], int(c)) for i, c in enumerate(counts.tolist()) if c > 0
            ]
            present.sort(key=lambda vc: (-vc[1], vc[0]))
            out[f] = present[:top_k] if top_k is not None else present
        return out

    def browse_children(self, path: tuple[str, ...]) -> Optional[list[tuple[str, int, bool]]]:
        """Children of a browse-tree node as (segment, record count,
        has_children), sorted by count desc then segment asc. None when the
        path does not exist."""
        node = self.browse_root
        for seg in path:
            node = node.children.get(seg.strip().lower())
            if node is None:
                return None
        children = [
            (seg, child.count, bool(child.children))
            for seg, child in node.children.items()
        ]
        children.sort(key=lambda c: (-c[1], c[0]))
        return children

    def get_record(self, record_id: str) -> Optional[MetadataRecord]:
        ordn = self.ord_by_id.get(record_id)
        return self.records[ordn] if ordn is not None else None


class SearchIndex:
    """Single-writer index facade: mutate, commit, read snapshots."""

    def __init__(self, records: Optional[Iterable[MetadataRecord]] = None):
        self._lock = threading.Lock()
        self._docs: dict[str, MetadataRecord] = {}
        if records:
            for rec in records:
                self.add(rec)
        self._snapshot = Snapshot(list(self._docs.values()))

    def add(self, record: MetadataRecord) -> None:
        violations = validate_record(record)
        if violations:
            raise InvalidRecordError(violations)
        with self._lock:
            self._docs[record.id] = record

    def delete(self, record_id: str) -> bool:
        with self._lock:
            return self._docs.pop(record_id, None) is not None

    def commit(self) -> Snapshot:
        with self._lock:
            snap = Snapshot(list(self._docs.values()))
            self._snapshot = snap
        return snap

    def current(self) -> Snapshot:
        return self._snapshot

    # -- persistence ---------------------------------------------------

    def save(self, path) -> None:
        payload = pickle.dumps([rec.to_dict() for rec in self._snapshot.records], protocol=4)
        blob = SNAPSHOT_MAGIC + struct.pack("<I", SNAPSHOT_FORMAT_VERSION) + payload
        tmp = str(path) + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(blob)
        import os

        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "SearchIndex":
        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < 8 or blob[:4] != SNAPSHOT_MAGIC:
            raise SnapshotFormatError(f"{path}: not an index snapshot")
        (version,) = struct.unpack("<I", blob[4:8])
        if version != SNAPSHOT_FORMAT_VERSION:
            raise SnapshotFormatError(
                f"{path}: snapshot format {version}, expected {SNAPSHOT_FORMAT_VERSION}"
            )
        try:
            dicts = pickle.loads(blob[8:])
            records = [MetadataRecord.from_dict(d) for d in dicts]
        except Exception as exc:  # corrupt payload forces a rebuild
            raise SnapshotFormatError(f"{path}: unreadable snapshot payload: {exc}") from exc
        idx = cls()
        for rec in records:
            idx.add(rec)
        idx.commit()
        return idx
