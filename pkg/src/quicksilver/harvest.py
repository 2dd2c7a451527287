"""Harvesting: pull metadata documents from remote sources into the
store and index, with incremental change detection.

Two source families are supported. Listing-based sources (a web
directory / manifest or a mounted file tree) are harvested by comparing
content checksums against the per-source ledger; items that vanish from
the listing are deleted. OAI-PMH sources page through ListRecords with
resumption tokens and use the protocol's explicit deleted-status records
instead of deletion-by-absence.

Each item is atomic: fetch, parse, store, index, commit, then ledger
update. A crash mid-run keeps every previously committed item intact.
"""

from __future__ import annotations

import json
import os
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterator, Optional
from urllib.parse import quote, urljoin, urlsplit

import requests

from .index import InvalidRecordError, SearchIndex
from .parsers import RecordParseError, XmlParseError, detect_format, parse_record
from .records import (
    CategoryRuleSet,
    DEFAULT_CATEGORY_RULES,
    MetadataFormat,
    Provenance,
    content_checksum,
    finalize_record,
    utc_now,
    validate_record,
)
from .store import DocumentStore

OAI_NS = "{http://www.openarchives.org/OAI/2.0/}"

SOURCE_KINDS = ("web_directory", "file_set", "oai_pmh")


class SourceConfigError(ValueError):
    pass


class SourceListingError(RuntimeError):
    pass


class ItemFetchError(RuntimeError):
    pass


class OaiProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class HarvestSource:
    source_id: str
    kind: str
    endpoint: str
    format_hint: Optional[MetadataFormat] = None
    oai_metadata_prefix: Optional[str] = None
    oai_set: Optional[str] = None
    polite_delay_ms: int = 100
    max_parallel_fetches: int = 4
    label: Optional[str] = None

    def validate(self) -> None:
        if self.kind not in SOURCE_KINDS:
            raise SourceConfigError(f"source {self.source_id}: unknown kind '{self.kind}'")
        oai_fields = self.oai_metadata_prefix or self.oai_set
        if self.kind == "oai_pmh" and not self.oai_metadata_prefix:
            raise SourceConfigError(f"source {self.source_id}: oai_pmh requires oai_metadata_prefix")
        if self.kind != "oai_pmh" and oai_fields:
            raise SourceConfigError(f"source {self.source_id}: oai_* fields only apply to oai_pmh sources")
        if self.polite_delay_ms < 0 or self.max_parallel_fetches < 1:
            raise SourceConfigError(f"source {self.source_id}: bad politeness settings")


@dataclass(frozen=True)
class ItemRef:
    origin_url: str
    native_identifier: str
    last_modified: Optional[str] = None


@dataclass
class ItemState:
    checksum: str
    last_seen: str
    record_id: str
    native_identifier: str

    def to_dict(self) -> dict:
        return {
            "checksum": self.checksum,
            "last_seen": self.last_seen,
            "record_id": self.record_id,
            "native_identifier": self.native_identifier,
        }


@dataclass
class HarvestState:
    source_id: str
    last_run: Optional[str] = None
    oai_cursor: Optional[str] = None
    items: dict = field(default_factory=dict)  # origin_url -> ItemState

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "last_run": self.last_run,
            "oai_cursor": self.oai_cursor,
            "items": {url: st.to_dict() for url, st in self.items.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HarvestState":
        return cls(
            source_id=d["source_id"],
            last_run=d.get("last_run"),
            oai_cursor=d.get("oai_cursor"),
            items={url: ItemState(**st) for url, st in d.get("items", {}).items()},
        )

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True), "utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: Path, source_id: str) -> "HarvestState":
        if not path.exists():
            return cls(source_id=source_id)
        return cls.from_dict(json.loads(path.read_text("utf-8")))


@dataclass
class HarvestReport:
    source_id: str
    added: int = 0
    updated: int = 0
    unchanged: int = 0
    deleted: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)  # (origin_url, reason)
    warnings: list = field(default_factory=list)
    source_error: Optional[str] = None
    wall_time_s: float = 0.0

    @property
    def examined(self) -> int:
        return self.added + self.updated + self.unchanged + self.deleted + self.failed

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "added": self.added,
            "updated": self.updated,
            "unchanged": self.unchanged,
            "deleted": self.deleted,
            "failed": self.failed,
            "examined": self.examined,
            "failures": [{"origin_url": u, "reason": r} for u, r in self.failures],
            "warnings": list(self.warnings),
            "source_error": self.source_error,
            "wall_time_s": round(self.wall_time_s, 3),
        }


class _LinkExtractor(HTMLParser):
    def __init__(self):
        super().__init__()
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)


class _HostLimiter:
    """Spaces requests to the same host by the source's polite delay."""

    def __init__(self, delay_ms: int):
        self.delay = delay_ms / 1000.0
        self._lock = threading.Lock()
        self._next_ok: dict[str, float] = {}

    def wait(self, host: str) -> None:
        if self.delay <= 0:
            return
        while True:
            with self._lock:
                now = time.monotonic()
                when = self._next_ok.get(host, 0.0)
                if now >= when:
                    self._next_ok[host] = now + self.delay
                    return
            time.sleep(max(0.0, when - now))


def list_source(
    source: HarvestSource, session: Optional[requests.Session] = None
) -> tuple[list[ItemRef], list[str]]:
    """Enumerate harvestable items. file_set scans for *.xml recursively;
    web_directory reads an HTML index page or a one-URL-per-line manifest.
    Returns (items, warnings)."""
    if source.kind == "file_set":
        root = Path(source.endpoint)
        if not root.is_dir():
            raise SourceListingError(f"{source.endpoint}: not a directory")
        items = [
            ItemRef(origin_url=str(p), native_identifier=str(p.relative_to(root)))
            for p in sorted(root.rglob("*.xml"))
        ]
        return items, []
    if source.kind == "web_directory":
        session = session or requests.Session()
        try:
            resp = session.get(source.endpoint, timeout=30)
            resp.raise_for_status()
        except requests.RequestException as exc:
            raise SourceListingError(f"{source.endpoint}: {exc}") from exc
        body = resp.text
        content_type = resp.headers.get("Content-Type", "")
        if "html" in content_type or body.lstrip()[:1] == "<":
            extractor = _LinkExtractor()
            extractor.feed(body)
            items = [
                ItemRef(origin_url=urljoin(source.endpoint, href), native_identifier=href)
                for href in extractor.hrefs
                if href.split("?")[0].endswith(".xml")
            ]
            warnings = [] if items else [f"{source.endpoint}: HTML index lists no .xml entries"]
            return items, warnings
        items = []
        for line in body.splitlines():
            line = line.strip()
            if line.endswith(".xml"):
                items.append(ItemRef(origin_url=urljoin(source.endpoint, line), native_identifier=line))
        return items, []
    raise SourceConfigError(f"source {source.source_id}: kind {source.kind} is not listable")


def fetch_item(
    item: ItemRef,
    source: HarvestSource,
    session: Optional[requests.Session] = None,
    limiter: Optional[_HostLimiter] = None,
) -> tuple[bytes, str]:
    """Read one item's bytes; HTTP fetches honor the per-host polite delay
    and are retried once."""
    if source.kind == "file_set" or not item.origin_url.startswith(("http://", "https://")):
        try:
            raw = Path(item.origin_url).read_bytes()
        except OSError as exc:
            raise ItemFetchError(f"{item.origin_url}: {exc}") from exc
        return raw, content_checksum(raw)
    session = session or requests.Session()
    limiter = limiter or _HostLimiter(source.polite_delay_ms)
    host = urlsplit(item.origin_url).netloc
    last_error: Exception = ItemFetchError(f"{item.origin_url}: unreachable")
    for _ in range(2):
        try:
            limiter.wait(host)
            resp = session.get(item.origin_url, timeout=30)
            resp.raise_for_status()
            raw = resp.content
            return raw, content_checksum(raw)
        except requests.RequestException as exc:
            last_error = exc
    raise ItemFetchError(f"{item.origin_url}: {last_error}")


@dataclass(frozen=True)
class OaiRecord:
    native_identifier: str
    datestamp: str
    payload: Optional[bytes]
    deleted: bool


def _oai_get(session: requests.Session, endpoint: str, params: dict) -> ET.Element:
    try:
        resp = session.get(endpoint, params=params, timeout=30)
        resp.raise_for_status()
    except requests.RequestException as exc:
        raise OaiProtocolError(f"{endpoint}: {exc}") from exc
    try:
        root = ET.fromstring(resp.content)
    except ET.ParseError as exc:
        raise OaiProtocolError(f"{endpoint}: malformed OAI response: {exc}") from exc
    if not root.tag.endswith("OAI-PMH"):
        raise OaiProtocolError(f"{endpoint}: not an OAI-PMH envelope (root {root.tag})")
    return root


def oai_identify(source: HarvestSource, session: Optional[requests.Session] = None) -> str:
    """Connectivity check; returns the repository name."""
    session = session or requests.Session()
    root = _oai_get(session, source.endpoint, {"verb": "Identify"})
    name = root.find(f"{OAI_NS}Identify/{OAI_NS}repositoryName")
    return name.text.strip() if name is not None and name.text else ""


def oai_list_records(
    source: HarvestSource,
    from_datestamp: Optional[str] = None,
    session: Optional[requests.Session] = None,
) -> Iterator[OaiRecord]:
    """Stream ListRecords pages, following resumption tokens.

    noRecordsMatch yields an empty stream. One badResumptionToken triggers
    a restart from the beginning (already-yielded identifiers are skipped);
    a second failure raises.
    """
    session = session or requests.Session()
    initial = {"verb": "ListRecords", "metadataPrefix": source.oai_metadata_prefix}
    if source.oai_set:
        initial["set"] = source.oai_set
    if from_datestamp:
        initial["from"] = from_datestamp
    params = dict(initial)
    restarted = False
    yielded: set[str] = set()
    while True:
        root = _oai_get(session, source.endpoint, params)
        error = root.find(f"{OAI_NS}error")
        if error is not None:
            code = error.get("code", "")
            if code == "noRecordsMatch":
                return
            if code == "badResumptionToken" and not restarted and "resumptionToken" in params:
                restarted = True
                params = dict(initial)
                continue
            raise OaiProtocolError(f"{source.endpoint}: OAI error {code}: {error.text or ''}".strip())
        lst = root.find(f"{OAI_NS}ListRecords")
        if lst is None:
            raise OaiProtocolError(f"{source.endpoint}: response has no ListRecords element")
        for rec in lst.findall(f"{OAI_NS}record"):
            header = rec.find(f"{OAI_NS}header")
            if header is None:
                raise OaiProtocolError(f"{source.endpoint}: record without header")
            identifier = (header.findtext(f"{OAI_NS}identifier") or "").strip()
            datestamp = (header.findtext(f"{OAI_NS}datestamp") or "").strip()
            deleted = header.get("status") == "deleted"
            if not identifier or identifier in yielded:
                continue
            yielded.add(identifier)
            payload = None
            if not deleted:
                metadata = rec.find(f"{OAI_NS}metadata")
                if metadata is not None and len(metadata):
                    payload = ET.tostring(metadata[0], encoding="utf-8")
            yield OaiRecord(identifier, datestamp, payload, deleted)
        token = lst.find(f"{OAI_NS}resumptionToken")
        if token is None or not (token.text or "").strip():
            return
        params = {"verb": "ListRecords", "resumptionToken": token.text.strip()}


def _parse_item(
    raw: bytes,
    checksum: str,
    origin_url: str,
    native_identifier: str,
    source: HarvestSource,
    rules: CategoryRuleSet,
    fetched_at,
):
    fmt = source.format_hint or detect_format(raw)
    if fmt is None:
        raise RecordParseError("unknown metadata schema")
    provenance = Provenance(
        source_id=source.source_id,
        fetched_at=fetched_at,
        checksum=checksum,
        origin_url=origin_url,
    )
    result = parse_record(
        raw,
        fmt,
        source.source_id,
        native_identifier=native_identifier,
        provenance=provenance,
    )
    record = finalize_record(result.record, rules)
    violations = validate_record(record)
    if violations:
        raise RecordParseError("; ".join(f"{v.field}: {v.message}" for v in violations))
    return record


def harvest_run(
    source: HarvestSource,
    state: HarvestState,
    index: SearchIndex,
    store: DocumentStore,
    rules: Optional[CategoryRuleSet] = None,
    state_path: Optional[Path] = None,
    session: Optional[requests.Session] = None,
) -> tuple[HarvestReport, HarvestState]:
    """One synchronization pass over a source. Item failures are isolated;
    a listing/protocol failure aborts with source_error set and no state
    mutation beyond items already committed."""
    rules = DEFAULT_CATEGORY_RULES if rules is None else rules
    report = HarvestReport(source_id=source.source_id)
    t0 = time.monotonic()
    session = session or requests.Session()
    if source.kind == "oai_pmh":
        _harvest_oai(source, state, index, store, rules, state_path, session, report)
    else:
        _harvest_listing(source, state, index, store, rules, state_path, session, report)
    if report.source_error is None:
        state.last_run = utc_now().isoformat()
        _persist(state, state_path)
    report.wall_time_s = time.monotonic() - t0
    return report, state


def _persist(state: HarvestState, state_path: Optional[Path]) -> None:
    if state_path is not None:
        state.save(state_path)


def _fetch_all(
    items: list[ItemRef],
    source: HarvestSource,
    session: requests.Session,
) -> list:
    """Fetch every item, up to max_parallel_fetches at a time; results are
    aligned with the input order, exceptions captured per item."""
    limiter = _HostLimiter(source.polite_delay_ms)

    def one(item: ItemRef):
        try:
            return fetch_item(item, source, session, limiter)
        except Exception as exc:
            return exc

    if source.max_parallel_fetches <= 1 or len(items) <= 1:
        return [one(item) for item in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=source.max_parallel_fetches) as pool:
        return list(pool.map(one, items))


def _harvest_listing(source, state, index, store, rules, state_path, session, report) -> None:
    try:
        items, warnings = list_source(source, session)
    except (SourceListingError, SourceConfigError) as exc:
        report.source_error = str(exc)
        return
    report.warnings.extend(warnings)
    ledger_before = set(state.items)
    listed = set()
    results = _fetch_all(items, source, session)
    for item, result in zip(items, results):
        listed.add(item.origin_url)
        if isinstance(result, Exception):
            report.failed += 1
            report.failures.append((item.origin_url, str(result)))
            continue
        raw, checksum = result
        prior = state.items.get(item.origin_url)
        now = utc_now()
        if prior is not None and prior.checksum == checksum:
            prior.last_seen = now.isoformat()
            _persist(state, state_path)
            report.unchanged += 1
            continue
        try:
            record = _parse_item(
                raw, checksum, item.origin_url, item.native_identifier, source, rules, now
            )
        except (ValueError, InvalidRecordError) as exc:
            report.failed += 1
            report.failures.append((item.origin_url, str(exc)))
            continue
        record = store.save(record, raw)
        index.add(record)
        index.commit()
        state.items[item.origin_url] = ItemState(
            checksum=checksum,
            last_seen=now.isoformat(),
            record_id=record.id,
            native_identifier=item.native_identifier,
        )
        _persist(state, state_path)
        if prior is not None:
            report.updated += 1
        else:
            report.added += 1
    vanished = sorted(ledger_before - listed)
    for url in vanished:
        item_state = state.items.pop(url)
        index.delete(item_state.record_id)
        store.delete(item_state.record_id)
        report.deleted += 1
    if vanished:
        index.commit()
        _persist(state, state_path)


def _harvest_oai(source, state, index, store, rules, state_path, session, report) -> None:
    try:
        oai_identify(source, session)
    except OaiProtocolError as exc:
        report.source_error = str(exc)
        return
    prefix = quote(source.oai_metadata_prefix or "")
    max_datestamp = state.oai_cursor or ""
    try:
        for oai_rec in oai_list_records(source, from_datestamp=state.oai_cursor, session=session):
            origin_url = (
                f"{source.endpoint}?verb=GetRecord&metadataPrefix={prefix}"
                f"&identifier={quote(oai_rec.native_identifier)}"
            )
            max_datestamp = max(max_datestamp, oai_rec.datestamp)
            if oai_rec.deleted:
                prior = state.items.pop(origin_url, None)
                if prior is not None:
                    index.delete(prior.record_id)
                    store.delete(prior.record_id)
                    index.commit()
                    _persist(state, state_path)
                    report.deleted += 1
                continue
            if oai_rec.payload is None:
                report.failed += 1
                report.failures.append((origin_url, "record has no metadata payload"))
                continue
            checksum = content_checksum(oai_rec.payload)
            prior = state.items.get(origin_url)
            now = utc_now()
            if prior is not None and prior.checksum == checksum:
                prior.last_seen = now.isoformat()
                _persist(state, state_path)
                report.unchanged += 1
                continue
            try:
                record = _parse_item(
                    oai_rec.payload, checksum, origin_url,
                    oai_rec.native_identifier, source, rules, now,
                )
            except (ValueError, InvalidRecordError) as exc:
                report.failed += 1
                report.failures.append((origin_url, str(exc)))
                continue
            record = store.save(record, oai_rec.payload)
            index.add(record)
            index.commit()
            state.items[origin_url] = ItemState(
                checksum=checksum,
                last_seen=now.isoformat(),
                record_id=record.id,
                native_identifier=oai_rec.native_identifier,
            )
            _persist(state, state_path)
            if prior is not None:
                report.updated += 1
            else:
                report.added += 1
    except OaiProtocolError as exc:
        report.source_error = str(exc)
        return
    # only advance the incremental cursor when nothing failed, so failed
    # records are retried on the next run
    if report.failed == 0 and max_datestamp:
        state.oai_cursor = max_datestamp
