from .analysis import STOPWORDS, facet_token, tokenize
from .engine import (
    BM25_B,
    BM25_K1,
    Hit,
    InvalidRecordError,
    SearchIndex,
    SearchResult,
    Snapshot,
    SnapshotFormatError,
    bbox_intersects,
    date_overlaps,
    score_bm25,
)

__all__ = [
    "BM25_B",
    "BM25_K1",
    "Hit",
    "InvalidRecordError",
    "STOPWORDS",
    "SearchIndex",
    "SearchResult",
    "Snapshot",
    "SnapshotFormatError",
    "bbox_intersects",
    "date_overlaps",
    "facet_token",
    "score_bm25",
    "tokenize",
]
