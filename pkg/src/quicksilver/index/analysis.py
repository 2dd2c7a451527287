"""Text analysis for indexing and query terms.

Fixed rules, no stemming: analysis must be reproducible so that index
behavior can be checked against an independent per-document evaluation.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# 30 high-frequency English function words dropped from all indexed text.
STOPWORDS = frozenset(
    {
        "a", "an", "and", "are", "as", "at", "be", "but", "by", "for",
        "if", "in", "into", "is", "it", "no", "not", "of", "on", "or",
        "such", "that", "the", "their", "then", "there", "these", "they",
        "this", "to",
    }
)


def tokenize(text: str) -> list[str]:
    """Split on non-alphanumerics, lowercase, drop tokens shorter than 2
    characters and stopwords."""
    if not text:
        return []
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group().lower()
        if len(tok) < 2 or tok in STOPWORDS:
            continue
        out.append(tok)
    return out


_SLUG_RE = re.compile(r"[^0-9a-z]+")


def facet_token(value: str) -> str:
    """Canonical single-token form of a facet value, usable as a query
    term: lowercase with non-alphanumeric runs collapsed to '_'."""
    return _SLUG_RE.sub("_", value.lower()).strip("_")
