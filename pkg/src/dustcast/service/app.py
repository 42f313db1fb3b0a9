"""FastAPI application over an immutable model bundle.

The service never trains: it loads a bundle and the merged history once,
precomputes attribution reports, and serves forecasts, scenarios and
directives from that snapshot. Every response, including errors, carries
schema_version.
"""

from __future__ import annotations

from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..bundle import ModelBundle, load_bundle
from ..config import AppConfig, load_config
from ..controller import directives_for_forecast, directives_to_json
from ..forecast import ScenarioSpec, pipeline_forecast
from ..ingestion import MergedDailyRecord, read_merged_csv
from ..pipeline import PipelineAttributions, attribution_reports
from .schemas import (
    DirectivesResponse,
    ForecastResponse,
    HealthResponse,
    ScenarioRequest,
    Stage1AttributionsResponse,
    Stage2AttributionsResponse,
)

API_SCHEMA_VERSION = 1


def create_app(bundle: Optional[ModelBundle] = None,
               history: Optional[list[MergedDailyRecord]] = None,
               config: Optional[AppConfig] = None,
               attributions: Optional[PipelineAttributions] = None) -> FastAPI:
    config = config if config is not None else load_config()
    app = FastAPI(title="dustcast service")
    app.state.bundle = bundle
    app.state.history = sorted(history, key=lambda r: r.date) if history else None
    app.state.config = config

    if attributions is None and bundle is not None and app.state.history:
        attributions = attribution_reports(
            bundle.hybrid, bundle.eff_model, app.state.history,
            seed=config.seed,
        )
    app.state.attributions = attributions

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        # body errors on /scenario are client contract violations -> 400;
        # query-parameter errors keep the framework's 422
        status = 400 if request.url.path.rstrip("/") == "/scenario" else 422
        return JSONResponse(
            status_code=status,
            content={"detail": jsonable_encoder(exc.errors()),
                     "schema_version": API_SCHEMA_VERSION},
        )

    @app.exception_handler(HTTPException)
    async def _on_http_error(request: Request, exc: HTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"detail": exc.detail, "schema_version": API_SCHEMA_VERSION},
        )

    def _loaded() -> ModelBundle:
        if app.state.bundle is None or app.state.history is None:
            raise HTTPException(status_code=409, detail="no model bundle loaded")
        return app.state.bundle

    def _run_forecast(horizon: Optional[int],
                      scenario: Optional[ScenarioSpec]) -> ForecastResponse:
        loaded = _loaded()
        pf = pipeline_forecast(
            loaded.hybrid, loaded.eff_model, app.state.history,
            horizon=horizon if horizon is not None else config.horizon_days,
            scenario=scenario,
        )
        return ForecastResponse(schema_version=API_SCHEMA_VERSION, **pf.to_dict())

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", schema_version=API_SCHEMA_VERSION)

    @app.get("/forecast", response_model=ForecastResponse)
    def forecast(horizon: Optional[int] = Query(default=None, gt=0)):
        return _run_forecast(horizon, scenario=None)

    @app.post("/scenario", response_model=ForecastResponse)
    def scenario(body: ScenarioRequest):
        if body.horizon is not None and body.horizon <= 0:
            raise HTTPException(status_code=422, detail="horizon must be > 0")
        spec = ScenarioSpec(delta_t2m=body.delta_t2m,
                            aod_multiplier=body.aod_multiplier,
                            label="custom")
        return _run_forecast(body.horizon, scenario=spec)

    @app.get("/directives", response_model=DirectivesResponse)
    def directives(horizon: Optional[int] = Query(default=None, gt=0)):
        loaded = _loaded()
        n = horizon if horizon is not None else config.horizon_days
        pf = pipeline_forecast(loaded.hybrid, loaded.eff_model,
                               app.state.history, horizon=n)
        per_day = directives_for_forecast(pf, settings=config.controller)
        return DirectivesResponse(
            schema_version=API_SCHEMA_VERSION,
            horizon=n,
            directives=directives_to_json(per_day),
        )

    @app.get("/attributions",
             response_model=Union[Stage1AttributionsResponse, Stage2AttributionsResponse])
    def attributions_endpoint(stage: int = Query(ge=1, le=2)):
        _loaded()
        reports: PipelineAttributions = app.state.attributions
        if reports is None:
            raise HTTPException(status_code=409, detail="attributions not computed")
        if stage == 1:
            return Stage1AttributionsResponse(
                schema_version=API_SCHEMA_VERSION, stage=1,
                static=reports.stage1_static.to_dict(),
                temporal=reports.stage1_temporal.to_dict(),
            )
        return Stage2AttributionsResponse(
            schema_version=API_SCHEMA_VERSION, stage=2,
            report=reports.stage2.to_dict(),
        )

    return app


def serve_api(config: AppConfig, bundle_path, data_path, host: Optional[str] = None,
              port: Optional[int] = None):
    """Load the bundle and history, then block serving HTTP."""
    import uvicorn

    bundle = load_bundle(bundle_path)
    history = read_merged_csv(data_path)
    app = create_app(bundle=bundle, history=history, config=config)
    uvicorn.run(app, host=host or config.api_host, port=port or config.api_port)
