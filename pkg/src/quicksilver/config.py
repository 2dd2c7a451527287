"""System configuration: one JSON file drives the CLI and the server."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .harvest import HarvestSource, SourceConfigError
from .records import CategoryRule, CategoryRuleSet, DEFAULT_CATEGORY_RULES, MetadataFormat


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    admin_token: str = ""
    base_url: Optional[str] = None

    def public_base(self) -> str:
        return self.base_url or f"http://{self.host}:{self.port}"


@dataclass(frozen=True)
class Defaults:
    rows: int = 10
    snippet_chars: int = 600
    polite_delay_ms: int = 100
    max_parallel_fetches: int = 4


@dataclass
class SystemConfig:
    sources: list
    state_dir: Path
    index_dir: Path
    document_store_dir: Path
    category_rules: CategoryRuleSet
    server: ServerConfig = field(default_factory=ServerConfig)
    defaults: Defaults = field(default_factory=Defaults)
    ui_dir: Optional[Path] = None

    def source(self, source_id: str) -> Optional[HarvestSource]:
        for src in self.sources:
            if src.source_id == source_id:
                return src
        return None

    def ensure_dirs(self) -> None:
        for path in (self.state_dir, self.index_dir, self.document_store_dir):
            Path(path).mkdir(parents=True, exist_ok=True)

    def state_path(self, source_id: str) -> Path:
        return Path(self.state_dir) / f"{source_id}.json"

    def snapshot_path(self) -> Path:
        return Path(self.index_dir) / "index.snapshot"

    def datasource_labels(self) -> dict[str, str]:
        return {src.source_id: (src.label or src.source_id) for src in self.sources}


def _parse_source(raw: dict, defaults: Defaults) -> HarvestSource:
    try:
        fmt = raw.get("format_hint")
        src = HarvestSource(
            source_id=raw["source_id"],
            kind=raw["kind"],
            endpoint=raw["endpoint"],
            format_hint=MetadataFormat(fmt) if fmt else None,
            oai_metadata_prefix=raw.get("oai_metadata_prefix"),
            oai_set=raw.get("oai_set"),
            polite_delay_ms=int(raw.get("polite_delay_ms", defaults.polite_delay_ms)),
            max_parallel_fetches=int(raw.get("max_parallel_fetches", defaults.max_parallel_fetches)),
            label=raw.get("label"),
        )
        src.validate()
        return src
    except KeyError as exc:
        raise ConfigError(f"source entry missing {exc}") from exc
    except (ValueError, SourceConfigError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Path) -> SystemConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    defaults_raw = raw.get("defaults", {})
    defaults = Defaults(
        rows=int(defaults_raw.get("rows", 10)),
        snippet_chars=int(defaults_raw.get("snippet_chars", 600)),
        polite_delay_ms=int(defaults_raw.get("polite_delay_ms", 100)),
        max_parallel_fetches=int(defaults_raw.get("max_parallel_fetches", 4)),
    )
    sources = [_parse_source(s, defaults) for s in raw.get("sources", [])]
    ids = [s.source_id for s in sources]
    if len(ids) != len(set(ids)):
        raise ConfigError("source_ids must be unique")

    server_raw = raw.get("server", {})
    port = int(server_raw.get("port", 8765))
    if not 0 < port < 65536:
        raise ConfigError(f"invalid port {port}")
    server = ServerConfig(
        host=server_raw.get("host", "127.0.0.1"),
        port=port,
        admin_token=server_raw.get("admin_token", ""),
        base_url=server_raw.get("base_url"),
    )

    if "category_rules" in raw:
        rules = [CategoryRule.from_dict(r) for r in raw["category_rules"]]
    else:
        rules = list(DEFAULT_CATEGORY_RULES)

    base = path.parent

    def _dir(key: str, default: str) -> Path:
        value = raw.get(key, default)
        p = Path(value)
        return p if p.is_absolute() else base / p

    ui_dir = raw.get("ui_dir")
    return SystemConfig(
        sources=sources,
        state_dir=_dir("state_dir", "state"),
        index_dir=_dir("index_dir", "index"),
        document_store_dir=_dir("document_store_dir", "documents"),
        category_rules=rules,
        server=server,
        defaults=defaults,
        ui_dir=(Path(ui_dir) if Path(ui_dir).is_absolute() else base / ui_dir) if ui_dir else None,
    )
