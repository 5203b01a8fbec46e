"""JSON inference service.

Endpoints (HTTP/1.1, JSON bodies, UTF-8):

    POST /v1/predict/{mode}   body {"inputs": {...}, "mode"?: str}
    GET  /v1/health
    GET  /v1/models

Every response uses the envelope {"ok": bool, "result": ... | null,
"error": str | null}. Artifacts are loaded once at startup into a
read-only registry; request handling is stateless and concurrent.

Environment: MULTIDX_PORT (default 8080), MULTIDX_MODEL_DIR,
MULTIDX_CORS_ORIGIN (default "*").
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .audio import AudioError
from .cnn.network import CnnModel
from .imaging import ImagingError
from .modelstore import MODES, ModelArtifact, StoreError
from .modelstore import load as load_artifact
from .pipelines import infer
from .stacking import StackedModel
from .tabular import DataError

MAX_REQUEST_BYTES = 20 * 1024 * 1024  # 20 MiB
DEFAULT_PORT = 8080


@dataclass
class LoadedModel:
    artifact: ModelArtifact
    model: Union[StackedModel, CnnModel]


Registry = Dict[str, LoadedModel]


def load_registry(model_dir: Union[str, Path]) -> Registry:
    """Load every .mdx under model_dir, keyed by mode (last one wins)."""
    registry: Registry = {}
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        return registry
    for path in sorted(model_dir.glob("*.mdx")):
        artifact = load_artifact(path)
        registry[artifact.mode] = LoadedModel(artifact=artifact, model=artifact.build_model())
    return registry


def _envelope(result=None, error: Optional[str] = None, status: int = 200) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"ok": error is None, "result": result, "error": error},
    )


def create_app(registry: Registry, cors_origin: str = "*") -> FastAPI:
    app = FastAPI(title="multidx inference service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.get("/v1/health")
    async def health():
        modes = sorted(registry)
        return _envelope(
            result={
                "status": "ok" if modes else "degraded",
                "modes": modes,
                "versions": {m: registry[m].artifact.version_label for m in modes},
            }
        )

    @app.get("/v1/models")
    async def models():
        detail = [
            {
                "mode": mode,
                "model_version": entry.artifact.version_label,
                "payload_kind": entry.artifact.payload_kind,
                "descriptor": _descriptor_summary(entry.artifact),
            }
            for mode, entry in sorted(registry.items())
        ]
        return _envelope(result={"models": detail})

    @app.post("/v1/predict/{mode}")
    async def predict(mode: str, request: Request):
        declared = request.headers.get("content-length")
        if declared is not None and int(declared) > MAX_REQUEST_BYTES:
            return _envelope(error="request too large (cap 20 MiB)", status=413)
        body = await request.body()
        if len(body) > MAX_REQUEST_BYTES:
            return _envelope(error="request too large (cap 20 MiB)", status=413)
        if mode not in MODES:
            return _envelope(error=f"unknown mode {mode!r}", status=400)
        entry = registry.get(mode)
        if entry is None:
            return _envelope(error=f"model for mode {mode!r} not loaded", status=503)

        import json

        try:
            payload = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return _envelope(error=f"invalid JSON body: {exc}", status=400)
        if not isinstance(payload, dict) or "inputs" not in payload:
            return _envelope(error='body must be {"inputs": {...}}', status=400)
        if "mode" in payload and payload["mode"] != mode:
            return _envelope(
                error=f"body mode {payload['mode']!r} does not match endpoint {mode!r}",
                status=400,
            )

        start = time.perf_counter()
        try:
            result = infer(entry.artifact, entry.model, payload["inputs"])
        except (DataError, AudioError, ImagingError, StoreError) as exc:
            return _envelope(error=str(exc), status=400)
        result["latency_ms"] = (time.perf_counter() - start) * 1000.0
        return _envelope(result=result)

    return app


def _descriptor_summary(artifact: ModelArtifact) -> dict:
    desc = artifact.descriptor
    if desc.get("kind") == "tabular":
        schema = desc["schema"]
        return {
            "kind": "tabular",
            "feature_names": list(schema["feature_names"]),
            "class_names": list(schema["class_names"]),
        }
    return {k: v for k, v in desc.items()}


def serve(model_dir: Union[str, Path], port: int = DEFAULT_PORT, cors_origin: str = "*") -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    registry = load_registry(model_dir)
    app = create_app(registry, cors_origin=cors_origin)
    uvicorn.run(app, host="0.0.0.0", port=port, log_level="warning")
