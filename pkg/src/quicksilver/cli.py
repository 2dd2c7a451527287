"""Operator CLI: harvest sources, manage the index, serve the API, and
run ad-hoc queries.

Exit codes: 0 success, 2 configuration/environment error, 3 user-input
error. Machine-readable output goes to stdout as JSON; diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from .config import ConfigError, SystemConfig, load_config
from .harvest import HarvestState, harvest_run
from .index import SearchIndex, SnapshotFormatError
from .service import BadRequest, QuerySyntax, SearchRequest, SearchService, ServiceError
from .store import DocumentStore

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_USAGE = 3


def load_index(config: SystemConfig, store: DocumentStore) -> SearchIndex:
    """Load the committed snapshot, rebuilding from the document store when
    it is missing, corrupt, or from another format version."""
    snapshot_path = config.snapshot_path()
    if snapshot_path.exists():
        try:
            return SearchIndex.load(snapshot_path)
        except SnapshotFormatError as exc:
            print(f"warning: {exc}; rebuilding from document store", file=sys.stderr)
    index = SearchIndex()
    for record in store.iter_records():
        index.add(record)
    index.commit()
    return index


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_harvest(config: SystemConfig, args: argparse.Namespace) -> int:
    config.ensure_dirs()
    if args.source == "all":
        sources = config.sources
    else:
        src = config.source(args.source)
        if src is None:
            print(f"error: no source '{args.source}' in config", file=sys.stderr)
            return EXIT_CONFIG
        sources = [src]
    store = DocumentStore(config.document_store_dir)
    index = load_index(config, store)
    failed_sources = 0
    for source in sources:
        state_path = config.state_path(source.source_id)
        state = HarvestState.load(state_path, source.source_id)
        report, state = harvest_run(
            source, state, index, store,
            rules=config.category_rules, state_path=state_path,
        )
        _emit(report.to_dict())
        if report.source_error is not None:
            failed_sources += 1
    index.save(config.snapshot_path())
    return EXIT_OK if failed_sources == 0 else 1


def cmd_index(config: SystemConfig, args: argparse.Namespace) -> int:
    config.ensure_dirs()
    store = DocumentStore(config.document_store_dir)
    snapshot_path = config.snapshot_path()
    if args.action == "rebuild":
        if snapshot_path.exists():
            try:
                SearchIndex.load(snapshot_path)
            except SnapshotFormatError as exc:
                print(f"warning: existing snapshot unusable: {exc}", file=sys.stderr)
        index = SearchIndex()
        for record in store.iter_records():
            index.add(record)
        snap = index.commit()
        index.save(snapshot_path)
        _emit({"record_count": snap.n_docs, "snapshot_version": snap.version})
        return EXIT_OK
    index = load_index(config, store)
    snap = index.current()
    per_source: dict[str, int] = {}
    for rec in snap.records:
        per_source[rec.data_source] = per_source.get(rec.data_source, 0) + 1
    _emit(
        {
            "record_count": snap.n_docs,
            "snapshot_version": snap.version,
            "per_source": per_source,
        }
    )
    return EXIT_OK


def cmd_serve(config: SystemConfig, args: argparse.Namespace) -> int:
    import uvicorn

    from .app import create_app

    config.ensure_dirs()
    host, port = config.server.host, config.server.port
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"error: cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        probe.close()
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def cmd_query(config: SystemConfig, args: argparse.Namespace) -> int:
    config.ensure_dirs()
    store = DocumentStore(config.document_store_dir)
    index = load_index(config, store)
    service = SearchService(index, store, config)
    request = SearchRequest(
        q=args.query,
        start=args.start,
        rows=args.rows,
        sort=args.sort,
        date_start=args.date_start,
        date_end=args.date_end,
        bbox=args.bbox,
        match_all=args.match_all,
    )
    try:
        if args.format == "rss":
            sys.stdout.write(service.render_rss(request).decode("utf-8") + "\n")
            return EXIT_OK
        response = service.handle_search(request)
    except (QuerySyntax, BadRequest) as exc:
        detail = f" at offset {exc.offset}" if exc.offset is not None else ""
        print(f"error: {exc.message}{detail}", file=sys.stderr)
        return EXIT_USAGE
    except ServiceError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    if args.format == "table":
        print(f"total: {response['total']}")
        for hit in response["hits"]:
            dr = hit["date_range"]
            period = f"{dr['start']} to {dr['end']}" if dr else "-"
            stars = "*" * hit["stars"] if hit["stars"] else "-"
            print(f"{hit['title']}\t{period}\t{hit['datasource']['value']}\t{stars}")
    else:
        _emit(response)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quicksilver",
        description="Federated metadata harvest, index, and search",
    )
    parser.add_argument(
        "--config",
        default=os.environ.get("QUICKSILVER_CONFIG"),
        help="path to the system JSON config (env: QUICKSILVER_CONFIG)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_harvest = sub.add_parser("harvest", help="run harvests and update the index")
    p_harvest.add_argument("--source", default="all", help="source id or 'all'")

    p_index = sub.add_parser("index", help="manage the search index")
    p_index.add_argument("action", choices=["rebuild", "status"])

    sub.add_parser("serve", help="serve the HTTP API")

    p_query = sub.add_parser("query", help="run a search from the terminal")
    p_query.add_argument("query", help="query text, e.g. 'fullText:carbon'")
    p_query.add_argument("--rows", type=int, default=10)
    p_query.add_argument("--start", type=int, default=0)
    p_query.add_argument("--sort", default="index_rank")
    p_query.add_argument("--date-start", dest="date_start", default=None)
    p_query.add_argument("--date-end", dest="date_end", default=None)
    p_query.add_argument("--bbox", default=None, help="west,south,east,north")
    p_query.add_argument("--match-all", dest="match_all", action="store_true")
    p_query.add_argument("--format", choices=["json", "rss", "table"], default="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        print("error: --config (or QUICKSILVER_CONFIG) is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(Path(args.config))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "harvest": cmd_harvest,
        "index": cmd_index,
        "serve": cmd_serve,
        "query": cmd_query,
    }
    return handlers[args.command](config, args)


if __name__ == "__main__":
    sys.exit(main())
