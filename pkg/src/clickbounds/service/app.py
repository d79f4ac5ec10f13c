"""HTTP surface: one POST route per computation, mirroring the CLI."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    CertificateError,
    ClickboundsError,
    InfeasibleDataError,
    InvalidParameterError,
)
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="clickbounds",
        version=__version__,
        description=(
            "Certified bounds on photon-number statistics from multiplexed "
            "on/off detector click data"
        ),
    )

    @app.exception_handler(InvalidParameterError)
    @app.exception_handler(InfeasibleDataError)
    async def _bad_data(request: Request, exc: ClickboundsError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(CertificateError)
    async def _cert_failure(request: Request, exc: CertificateError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/state", response_model=schemas.StateResponse)
    def state(req: schemas.StateRequest):
        return handlers.run_state(req)

    @app.post("/v1/clicks", response_model=schemas.ClicksResponse)
    def clicks(req: schemas.ClicksRequest):
        return handlers.run_clicks(req)

    @app.post("/v1/bounds", response_model=schemas.BoundsResponse)
    def bounds(req: schemas.BoundsRequest):
        return handlers.run_bounds(req)

    @app.post("/v1/region", response_model=schemas.RegionResponse)
    def region(req: schemas.RegionRequest):
        return handlers.run_region(req)

    @app.post("/v1/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        return handlers.run_sweep(req)

    @app.post("/v1/estimator", response_model=schemas.EstimatorResponse)
    def estimator(req: schemas.EstimatorRequest):
        return handlers.run_estimator(req)

    @app.post("/v1/hbt1", response_model=schemas.Hbt1Response)
    def hbt1(req: schemas.Hbt1Request):
        return handlers.run_hbt1(req)

    @app.post("/v1/hbt2", response_model=schemas.Hbt2Response)
    def hbt2(req: schemas.Hbt2Request):
        return handlers.run_hbt2(req)

    @app.post("/v1/selftest", response_model=schemas.SelftestResponse)
    def selftest(req: schemas.SelftestRequest):
        return handlers.run_selftest(req)

    return app
