"""Shared XML and value-coercion helpers for the format parsers."""

from __future__ import annotations

import calendar
import re
import xml.etree.ElementTree as ET
from datetime import date
from typing import Iterator, Optional


class XmlParseError(ValueError):
    """Malformed XML; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int, line: int = 0, column: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
        self.line = line
        self.column = column


class RecordParseError(ValueError):
    """Document is well-formed but cannot yield a record (e.g. no title)."""


def parse_xml(raw: bytes) -> ET.Element:
    try:
        return ET.fromstring(raw)
    except ET.ParseError as exc:
        line, column = getattr(exc, "position", (1, 0))
        offset = _byte_offset(raw, line, column)
        raise XmlParseError(str(exc), offset, line, column) from exc


def _byte_offset(raw: bytes, line: int, column: int) -> int:
    lines = raw.split(b"\n")
    if line < 1 or line > len(lines):
        return len(raw)
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if "}" in tag else tag


def namespace(tag: str) -> str:
    if tag.startswith("{"):
        return tag[1:].split("}", 1)[0]
    return ""


def iter_local(elem: ET.Element, name: str) -> Iterator[ET.Element]:
    """All descendants (including elem) with the given local tag name."""
    for node in elem.iter():
        if localname(node.tag) == name:
            yield node


def first_local(elem: ET.Element, name: str) -> Optional[ET.Element]:
    return next(iter_local(elem, name), None)


def child_local(elem: ET.Element, name: str) -> Optional[ET.Element]:
    for node in elem:
        if localname(node.tag) == name:
            return node
    return None


_WS = re.compile(r"\s+")


def text_of(elem: Optional[ET.Element]) -> str:
    """Concatenated text content with whitespace runs collapsed."""
    if elem is None:
        return ""
    return _WS.sub(" ", "".join(elem.itertext())).strip()


_PATH_SPLIT = re.compile(r"\s*>\s*")


def keyword_path(text: str) -> tuple[str, ...]:
    """Split 'ROOT > CHILD > LEAF' keyword strings into a path."""
    parts = [p.strip() for p in _PATH_SPLIT.split(text)]
    return tuple(p for p in parts if p)


_YMD = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_COMPACT = re.compile(r"^(\d{4})(\d{2})(\d{2})$")
_YM = re.compile(r"^(\d{4})-(\d{2})$")
_Y = re.compile(r"^(\d{4})$")


def parse_date_text(text: str, role: str) -> Optional[date]:
    """Coerce common date spellings to a calendar day.

    Partial dates expand toward the edge named by ``role``: a bare year
    becomes Jan 1 for a range start and Dec 31 for a range end, a
    year-month the first or last day of that month. Returns None for
    anything uninterpretable (caller drops the field with a warning).
    """
    text = text.strip()
    m = _YMD.match(text) or _COMPACT.match(text)
    if m:
        try:
            return date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
        except ValueError:
            return None
    m = _YM.match(text)
    if m:
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            return None
        day = 1 if role == "start" else calendar.monthrange(year, month)[1]
        return date(year, month, day)
    m = _Y.match(text)
    if m:
        year = int(m.group(1))
        return date(year, 1, 1) if role == "start" else date(year, 12, 31)
    return None


def parse_coord(text: str) -> Optional[float]:
    try:
        return float(text.strip())
    except (TypeError, ValueError):
        return None
