"""HTTP API: a FastAPI service wrapping the search core.

Endpoints:
    GET  /api/search   fielded/faceted/geotemporal search, JSON
    GET  /api/record/{id}?style=summary|fgdc_text
    GET  /api/browse?path=seg1/seg2
    GET  /api/rss      same parameters as /api/search, RSS 2.0
    GET  /api/health
    POST /api/admin/harvest/{source_id}   (X-Admin-Token header)

When a built web UI is configured it is served under /ui/.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .config import SystemConfig
from .harvest import harvest_run
from .index import SearchIndex
from .service import NotFound, SearchRequest, SearchService, ServiceError, Unauthorized
from .store import DocumentStore


class DatasourceModel(BaseModel):
    value: str
    label: str


class HitModel(BaseModel):
    id: str
    title: str
    date_range: Optional[dict] = None
    datasource: DatasourceModel
    project: Optional[str] = None
    snippet: str
    stars: Optional[int] = Field(default=None, ge=1, le=10)
    score: float
    data_link: Optional[str] = None
    metadata_link: Optional[str] = None
    matched_fields: dict = Field(default_factory=dict)


class FacetEntryModel(BaseModel):
    value: str
    label: str
    count: int


class SearchResponseModel(BaseModel):
    total: int
    start: int
    rows: int
    sort: str
    q: str
    hits: list[HitModel]
    facets: dict[str, list[FacetEntryModel]]
    bookmark_url: str


class SummaryRowModel(BaseModel):
    label: str
    value: str


class RecordSummaryModel(BaseModel):
    id: str
    style: str
    rows: list[SummaryRowModel]


class BrowseChildModel(BaseModel):
    segment: str
    count: int
    has_children: bool


class BrowseNodeModel(BaseModel):
    path: list[str]
    children: list[BrowseChildModel]


class HealthModel(BaseModel):
    status: str
    record_count: int
    snapshot_version: str


class HarvestReportModel(BaseModel):
    source_id: str
    added: int
    updated: int
    unchanged: int
    deleted: int
    failed: int
    examined: int
    failures: list[dict]
    warnings: list[str]
    source_error: Optional[str] = None
    wall_time_s: float


def create_app(
    config: SystemConfig,
    index: Optional[SearchIndex] = None,
    store: Optional[DocumentStore] = None,
) -> FastAPI:
    config.ensure_dirs()
    store = store or DocumentStore(config.document_store_dir)
    if index is None:
        from .cli import load_index

        index = load_index(config, store)
    service = SearchService(index, store, config)
    harvest_lock = threading.Lock()

    app = FastAPI(title="quicksilver", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.state.config = config
    app.state.index = index
    app.state.store = store
    app.state.service = service

    @app.exception_handler(ServiceError)
    async def service_error_handler(_, exc: ServiceError):
        return JSONResponse(status_code=exc.http_status, content={"error": exc.to_dict()})

    def _request_from_params(
        q: str,
        start: int,
        rows: int,
        sort: str,
        date_start: Optional[str],
        date_end: Optional[str],
        bbox: Optional[str],
        match_all: bool,
    ) -> SearchRequest:
        return SearchRequest(
            q=q,
            start=start,
            rows=rows,
            sort=sort,
            date_start=date_start or None,
            date_end=date_end or None,
            bbox=bbox or None,
            match_all=match_all,
        )

    @app.get("/api/search", response_model=SearchResponseModel)
    def api_search(
        q: str = Query(default=""),
        start: int = Query(default=0),
        rows: int = Query(default=config.defaults.rows),
        sort: str = Query(default="index_rank"),
        date_start: Optional[str] = Query(default=None),
        date_end: Optional[str] = Query(default=None),
        bbox: Optional[str] = Query(default=None),
        match_all: bool = Query(default=False),
    ):
        req = _request_from_params(q, start, rows, sort, date_start, date_end, bbox, match_all)
        return service.handle_search(req)

    @app.get("/api/record/{record_id}")
    def api_record(record_id: str, style: str = Query(default="summary")):
        view = service.get_record(record_id, style)
        if style == "fgdc_text":
            return PlainTextResponse(view)
        return JSONResponse(view)

    @app.get("/api/browse", response_model=BrowseNodeModel)
    def api_browse(path: str = Query(default="")):
        return service.browse(path)

    @app.get("/api/rss")
    def api_rss(
        q: str = Query(default=""),
        start: int = Query(default=0),
        rows: int = Query(default=config.defaults.rows),
        sort: str = Query(default="index_rank"),
        date_start: Optional[str] = Query(default=None),
        date_end: Optional[str] = Query(default=None),
        bbox: Optional[str] = Query(default=None),
        match_all: bool = Query(default=False),
    ):
        req = _request_from_params(q, start, rows, sort, date_start, date_end, bbox, match_all)
        body = service.render_rss(req)
        return Response(content=body, media_type="application/rss+xml")

    @app.get("/api/health", response_model=HealthModel)
    def api_health():
        return service.health()

    @app.post("/api/admin/harvest/{source_id}", response_model=HarvestReportModel)
    def api_admin_harvest(source_id: str, x_admin_token: Optional[str] = Header(default=None)):
        expected = config.server.admin_token
        if not expected or x_admin_token != expected:
            raise Unauthorized("missing or invalid admin token")
        source = config.source(source_id)
        if source is None:
            raise NotFound(f"no source '{source_id}' configured")
        from .harvest import HarvestState

        with harvest_lock:
            state_path = config.state_path(source_id)
            state = HarvestState.load(state_path, source_id)
            report, state = harvest_run(
                source,
                state,
                index,
                store,
                rules=config.category_rules,
                state_path=state_path,
            )
            index.save(config.snapshot_path())
        return report.to_dict()

    ui_dir = config.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
