"""On-disk document store: raw source XML plus canonical record JSON.

The store is the durable source of truth; the search index snapshot can
always be rebuilt from it.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator, Optional

from .records import MetadataRecord


class DocumentStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _json_path(self, record_id: str) -> Path:
        return self.root / f"{record_id}.json"

    def _xml_path(self, record_id: str) -> Path:
        return self.root / f"{record_id}.xml"

    def save(self, record: MetadataRecord, raw: bytes) -> MetadataRecord:
        """Persist raw bytes and the canonical record; returns the record
        with raw_document_ref pointing at the stored bytes."""
        xml_path = self._xml_path(record.id)
        _atomic_write(xml_path, raw)
        from dataclasses import replace

        record = replace(record, raw_document_ref=xml_path.name)
        _atomic_write(
            self._json_path(record.id),
            json.dumps(record.to_dict(), sort_keys=True, indent=1).encode("utf-8"),
        )
        return record

    def delete(self, record_id: str) -> bool:
        found = False
        for path in (self._json_path(record_id), self._xml_path(record_id)):
            if path.exists():
                path.unlink()
                found = True
        return found

    def load(self, record_id: str) -> Optional[MetadataRecord]:
        path = self._json_path(record_id)
        if not path.exists():
            return None
        return MetadataRecord.from_dict(json.loads(path.read_text("utf-8")))

    def load_raw(self, ref: str) -> Optional[bytes]:
        path = self.root / ref
        if not path.is_file():
            return None
        return path.read_bytes()

    def iter_records(self) -> Iterator[MetadataRecord]:
        for path in sorted(self.root.glob("*.json")):
            yield MetadataRecord.from_dict(json.loads(path.read_text("utf-8")))

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*.json"))


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
