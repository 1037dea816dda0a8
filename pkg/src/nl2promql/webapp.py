"""HTTP front for the tool service.

One JSON-RPC endpoint plus liveness and GPU-readiness probes. The RPC
endpoint always answers 200 with a JSON-RPC envelope (errors included),
except for notifications which get 204. ``/readyz/gpu`` flips to 200 once
the background GPU discovery attempt has finished, successfully or not.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .pipeline import SmartDiscoveryService
from .rpc import TOOLS, handle_rpc

__all__ = ["create_app"]


def create_app(service: SmartDiscoveryService) -> FastAPI:
    app = FastAPI(title="nl2promql", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.post("/rpc")
    async def rpc(request: Request):
        raw = await request.body()
        response = handle_rpc(service, raw)
        if response is None:
            return Response(status_code=204)
        return JSONResponse(response)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/readyz/gpu")
    async def readyz_gpu():
        if service.gpu_done.is_set():
            body = {"status": "ready"}
            if service.gpu_error:
                body["last_error"] = service.gpu_error
            if service.gpu_result is not None:
                body["primary_vendor"] = service.gpu_result.primary_vendor
                body["discovered"] = len(service.gpu_result.entries)
            return JSONResponse(body)
        return JSONResponse({"status": "pending"}, status_code=503)

    @app.get("/tools")
    async def tools():
        return {
            "tools": [
                {
                    "name": t.name,
                    "description": t.description,
                    "params_schema": t.params_schema,
                }
                for t in TOOLS
            ]
        }

    return app
