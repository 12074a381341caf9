"""The HTTP service: the analysis pipeline behind four endpoints.

POST /api/analyze      full report (422 with the partial report when a
                       stage had to give up)
POST /api/portrait     deterministic SVG portrait plus status
POST /api/gamma-probe  separatrix algebraicity probe, optional control
GET  /api/health       version and schema-version stamp

Input errors (unparsable rates, non-rational p, bad config keys) map to
400. Analysis that runs but cannot complete (the invariant-curve solver
giving up, a non-hyperbolic divisor, an ill-conditioned probe) maps to
422, with as much of the result as exists in the body.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..config import DEFAULT_CONFIG, Config, config_from_mapping
from ..errors import (
    IllConditioned,
    NonRationalLiteral,
    ParseError,
    UnboundParameter,
)
from ..report import (
    SCHEMA_VERSION,
    build_report,
    gamma_probe_report,
    tool_version,
)
from ..svg import render_portrait
from ..system import PlanarSystem, family_two, system_from_strings
from .models import (
    AnalyzeRequest,
    GammaProbeRequest,
    HealthResponse,
    PortraitRequest,
    PortraitResponse,
)


def _config_from(request: AnalyzeRequest) -> Config:
    if not request.config:
        return DEFAULT_CONFIG
    try:
        return config_from_mapping(request.config)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _fraction(text: str | int, label: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise HTTPException(
            status_code=400, detail=f"{label} must be an exact rational, got {text!r}"
        )


def _system_from(request: AnalyzeRequest) -> tuple[PlanarSystem, Fraction | None]:
    if request.p is not None:
        p = _fraction(request.p, "p")
        return family_two(p), p
    spec = request.system
    params = {
        name: _fraction(value, f"parameter {name!r}")
        for name, value in spec.parameters.items()
    }
    try:
        return system_from_strings(spec.x_rate, spec.y_rate, params), None
    except (ParseError, UnboundParameter, NonRationalLiteral) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(title="darbouxcubic", version=tool_version())

    # request-shape problems are argument errors (400), not the
    # analysis-incomplete condition that 422 signals here
    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"detail": jsonable_encoder(exc.errors())}
        )

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok", version=tool_version(), schema_version=SCHEMA_VERSION
        )

    @app.post("/api/analyze")
    def analyze(request: AnalyzeRequest) -> JSONResponse:
        config = _config_from(request)
        system, p = _system_from(request)
        report = build_report(
            system, p=p, max_degree=request.max_degree, config=config
        )
        code = 200 if report["status"] == "complete" else 422
        return JSONResponse(status_code=code, content=report)

    @app.post("/api/portrait")
    def portrait(request: PortraitRequest) -> JSONResponse:
        config = _config_from(request)
        system, p = _system_from(request)
        report = build_report(
            system, p=p, max_degree=request.max_degree, config=config
        )
        svg = render_portrait(
            system,
            report,
            seed=request.seed,
            orbit_count=request.orbit_count,
            config=config,
        )
        payload = PortraitResponse(
            svg=svg, status=report["status"], problems=report["problems"]
        )
        code = 200 if report["status"] == "complete" else 422
        return JSONResponse(status_code=code, content=payload.model_dump())

    @app.post("/api/gamma-probe")
    def gamma_probe(request: GammaProbeRequest) -> JSONResponse:
        try:
            report = gamma_probe_report(
                request.count,
                (request.y_min, request.y_max),
                request.maxdeg,
                control=request.control,
            )
        except IllConditioned as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return JSONResponse(status_code=200, content=report)

    return app
