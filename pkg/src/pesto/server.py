"""HTTP JSON API over a dataset snapshot and the active evaluation model.

The server never talks to GitHub: crawling happens in the CLI, and this
process serves whatever the CSV currently holds. Dataset and model are
each swapped atomically as wholes, so any response is computed against
one consistent snapshot pair; a failed reload or invalid config never
evicts the last good state.
"""

from __future__ import annotations

import json
import logging
import threading
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .datastore import Dataset, read_csv, record_to_dict
from .errors import InvalidConfigError, PestoError
from .evaluation import (
    EvaluationModel,
    load_bundled_model,
    load_model,
    model_from_dict,
    model_to_dict,
    render_comparison_json,
    score_overall,
)
from .timeutil import utcnow

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8030

# Local development UIs (any port on loopback) may call the API.
_CORS_ORIGIN_REGEX = r"https?://(localhost|127\.0\.0\.1)(:\d+)?"


class ServerState:
    """Current (dataset, model) pair, swapped under a lock."""

    def __init__(self, data_path: Path, config_path: Path) -> None:
        self.data_path = data_path
        self.config_path = config_path
        self.started_at: datetime = utcnow()
        self._lock = threading.Lock()
        self._dataset = read_csv(data_path)
        if config_path.exists():
            self._model = load_model(config_path)
        else:
            self._model = load_bundled_model("osspal")

    def snapshot(self) -> tuple[Dataset, EvaluationModel]:
        with self._lock:
            return self._dataset, self._model

    def reload_dataset(self) -> None:
        dataset = read_csv(self.data_path)  # parse first, swap only on success
        with self._lock:
            self._dataset = dataset

    def replace_model(self, model: EvaluationModel) -> None:
        text = json.dumps(model_to_dict(model), indent=2) + "\n"
        self.config_path.write_text(text, encoding="utf-8")
        with self._lock:
            self._model = model


def create_app(
    data_path: Path | str,
    config_path: Path | str,
    static_dir: Path | str | None = None,
) -> FastAPI:
    """Build the application; raises if the initial dataset is unreadable."""
    state = ServerState(Path(data_path), Path(config_path))
    app = FastAPI(title="oss-pesto", docs_url=None, redoc_url=None)
    app.state.pesto = state
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=_CORS_ORIGIN_REGEX,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/candidates")
    def get_candidates() -> Response:
        dataset, _ = state.snapshot()
        payload = [record_to_dict(record) for record in dataset.records]
        return JSONResponse(payload)

    @app.get("/api/config")
    def get_config() -> Response:
        _, model = state.snapshot()
        return JSONResponse(model_to_dict(model))

    @app.put("/api/config")
    async def put_config(request: Request) -> Response:
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"detail": "request body is not valid JSON"}, 422)
        try:
            model = model_from_dict(body)
        except InvalidConfigError as exc:
            return JSONResponse({"detail": str(exc)}, 422)
        state.replace_model(model)
        return Response(status_code=204)

    @app.get("/api/comparison")
    def get_comparison(
        category: str | None = None, candidates: str | None = None
    ) -> Response:
        dataset, model = state.snapshot()
        if candidates is not None:
            wanted = {name for name in candidates.split(",") if name}
            dataset = Dataset(
                records=tuple(
                    r for r in dataset.records if r.full_name in wanted
                ),
                schema_version=dataset.schema_version,
            )
        result = score_overall(model, dataset)
        try:
            text = render_comparison_json(result, category)
        except KeyError:
            valid = ", ".join(c.name for c in model.categories)
            return JSONResponse(
                {"detail": f"unknown category {category!r}; valid: {valid}"}, 404
            )
        return Response(content=text, media_type="application/json")

    @app.post("/api/reload")
    def post_reload() -> Response:
        try:
            state.reload_dataset()
        except (PestoError, OSError, ValueError) as exc:
            logger.warning("reload failed, keeping previous snapshot: %s", exc)
            return JSONResponse({"detail": f"reload failed: {exc}"}, 500)
        return Response(status_code=204)

    @app.get("/api/health")
    def get_health() -> Response:
        dataset, model = state.snapshot()
        return JSONResponse(
            {
                "status": "ok",
                "dataset_rows": len(dataset),
                "model_name": model.model_name,
            }
        )

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True))

    return app


def run(
    data_path: Path | str,
    config_path: Path | str,
    *,
    port: int = DEFAULT_PORT,
    host: str = "127.0.0.1",
    static_dir: Path | str | None = None,
) -> None:
    """Serve until interrupted (read-only: shutdown flushes nothing)."""
    import uvicorn

    app = create_app(data_path, config_path, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
