"""Stateless HTTP service and the response builders the CLI shares.

Responses are built as pydantic models, dumped in field order, and
serialized through the canonical encoder, so an HTTP body and the CLI's
stdout for the same request are byte-identical. Errors map the package's
semantic codes onto 400/422 with a fixed {"error", "message"} body.
"""

from __future__ import annotations

import math
import os

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .closed_forms import threshold_table
from .curve import TradeoffCurve, gamma_path, sweep
from .dispatch import risk_ratio, solve_request
from .errors import PrivshareError
from .geometry import layout_report, slabs
from .jsonio import canonical_dumps, instance_digest
from .model import Instance, mu_max, validate_instance
from .solver import Solution

DEFAULT_PORT = 8211
DEFAULT_BIND = "127.0.0.1"


# --- request payloads --------------------------------------------------------


class InstancePayload(BaseModel):
    categories: list[str] | None = None
    q: list[float]
    p: list[float]
    w: list[float]


class SolvePayload(BaseModel):
    instance: InstancePayload
    kind: str = "sed"
    mu: float
    mode: str = "strict"


class CurvePayload(BaseModel):
    instance: InstancePayload
    kind: str = "sed"
    points: int = 200


class GeometryPayload(BaseModel):
    instance: InstancePayload
    kind: str = "sed"
    path_points: int = Field(0, description="sample count for the dual path; 0 omits it")


class ThresholdsPayload(BaseModel):
    instance: InstancePayload


# --- response models (field order = wire order) ------------------------------


class SolveResponse(BaseModel):
    delta: list[float]
    t: list[float]
    risk: float
    alpha: float
    beta: float
    activity: list[str]
    method: str
    residuals: list[float]
    risk_ratio: float
    mu: float
    mu_max: float
    instance_digest: str


class CurvePointResponse(BaseModel):
    mu: float
    risk: float
    delta: list[float]
    alpha: float
    beta: float
    activity: list[str]
    method: str
    inserted: bool


class CurveResponse(BaseModel):
    kind: str
    mu_max: float
    points: list[CurvePointResponse]
    breakpoints: list[float]
    instance_digest: str


class SlabResponse(BaseModel):
    z: list[float]
    lower: float
    upper: float


class VertexResponse(BaseModel):
    i: int
    j: int
    a: int
    b: int
    gamma: list[float]


class GeometryResponse(BaseModel):
    slabs: list[SlabResponse]
    origin: list[float] | None
    conical: bool
    vertices: list[VertexResponse]
    gamma_path: list[list[float]]


class ThresholdCellResponse(BaseModel):
    k: int
    j: int
    zeros: list[int]
    ones: list[int]
    interior: list[int]
    mu_formula: float | None
    mu_lo: float | None
    mu_hi: float | None
    covered: bool


class ThresholdsResponse(BaseModel):
    n3: list[float | None] | None
    cells: list[ThresholdCellResponse]
    mu_max: float
    instance_digest: str


# --- builders (shared by HTTP and CLI) ---------------------------------------


def build_solve_response(kind, instance: Instance, solution: Solution) -> SolveResponse:
    return SolveResponse(
        delta=[float(d) for d in solution.delta],
        t=[float(x) for x in solution.t],
        risk=float(solution.risk),
        alpha=float(solution.gamma.alpha),
        beta=float(solution.gamma.beta),
        activity=list(solution.activity),
        method=solution.method,
        residuals=[float(r) for r in solution.residuals],
        risk_ratio=risk_ratio(kind, instance, solution),
        mu=float(solution.mu),
        mu_max=mu_max(instance),
        instance_digest=instance_digest(instance),
    )


def build_curve_response(curve: TradeoffCurve) -> CurveResponse:
    return CurveResponse(
        kind=curve.kind,
        mu_max=mu_max(curve.instance),
        points=[
            CurvePointResponse(
                mu=p.mu,
                risk=p.risk,
                delta=[float(d) for d in p.delta],
                alpha=p.gamma.alpha,
                beta=p.gamma.beta,
                activity=list(p.activity),
                method=p.method,
                inserted=p.inserted,
            )
            for p in curve.points
        ],
        breakpoints=list(curve.breakpoints),
        instance_digest=instance_digest(curve.instance),
    )


def build_geometry_response(kind, instance: Instance, path_points: int = 0) -> GeometryResponse:
    report = layout_report(kind, instance)
    path: list[list[float]] = []
    if path_points:
        path = [list(t) for t in gamma_path(sweep(kind, instance, path_points))]
    return GeometryResponse(
        slabs=[
            SlabResponse(z=[s.z[0], s.z[1]], lower=s.lower, upper=s.upper)
            for s in slabs(kind, instance)
        ],
        origin=None if report.origin is None else [float(x) for x in report.origin],
        conical=report.conical,
        vertices=[
            VertexResponse(i=i, j=j, a=a, b=b, gamma=[float(g[0]), float(g[1])])
            for (i, j, a, b), g in sorted(report.vertices.items())
        ],
        gamma_path=path,
    )


def build_thresholds_response(instance: Instance) -> ThresholdsResponse:
    table = threshold_table(instance)

    def _finite(x):
        return float(x) if x is not None and math.isfinite(x) else None

    return ThresholdsResponse(
        n3=None if table.n3 is None else [_finite(x) for x in table.n3],
        cells=[
            ThresholdCellResponse(
                k=k,
                j=j,
                zeros=list(cell.zeros),
                ones=list(cell.ones),
                interior=list(cell.interior),
                mu_formula=_finite(cell.mu_formula),
                mu_lo=_finite(cell.mu_lo),
                mu_hi=_finite(cell.mu_hi),
                covered=bool(cell.covered),
            )
            for (k, j), cell in sorted(table.conical.items())
        ],
        mu_max=mu_max(instance),
        instance_digest=instance_digest(instance),
    )


def response_bytes(model: BaseModel) -> str:
    return canonical_dumps(model.model_dump())


# --- app ----------------------------------------------------------------------


def _json(content: str, status: int = 200) -> Response:
    return Response(content=content, status_code=status, media_type="application/json")


def create_app() -> FastAPI:
    app = FastAPI(title="privshare", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(PrivshareError)
    async def _domain_error(_request: Request, exc: PrivshareError):
        body = canonical_dumps({"error": exc.code, "message": exc.message})
        return _json(body, status=exc.http_status)

    @app.exception_handler(RequestValidationError)
    async def _shape_error(_request: Request, exc: RequestValidationError):
        body = canonical_dumps({"error": "INVALID_INPUT", "message": str(exc.errors())})
        return _json(body, status=422)

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/solve", response_model=SolveResponse)
    async def solve_endpoint(payload: SolvePayload):
        instance, solution = solve_request(
            payload.instance.model_dump(), payload.kind, payload.mu, payload.mode
        )
        return _json(response_bytes(build_solve_response(payload.kind, instance, solution)))

    @app.post("/v1/curve", response_model=CurveResponse)
    async def curve_endpoint(payload: CurvePayload):
        instance = validate_instance(payload.instance.model_dump())
        curve = sweep(payload.kind, instance, payload.points)
        return _json(response_bytes(build_curve_response(curve)))

    @app.post("/v1/geometry", response_model=GeometryResponse)
    async def geometry_endpoint(payload: GeometryPayload):
        instance = validate_instance(payload.instance.model_dump())
        body = build_geometry_response(payload.kind, instance, payload.path_points)
        return _json(response_bytes(body))

    @app.post("/v1/thresholds", response_model=ThresholdsResponse)
    async def thresholds_endpoint(payload: ThresholdsPayload):
        instance = validate_instance(payload.instance.model_dump())
        return _json(response_bytes(build_thresholds_response(instance)))

    return app


app = create_app()


def run(port: int | None = None, bind: str | None = None) -> None:
    """Blocking uvicorn runner honoring PRIVSHARE_PORT / PRIVSHARE_BIND."""
    import uvicorn

    port = port if port is not None else int(os.environ.get("PRIVSHARE_PORT", DEFAULT_PORT))
    bind = bind if bind is not None else os.environ.get("PRIVSHARE_BIND", DEFAULT_BIND)
    uvicorn.run(app, host=bind, port=port, log_level="warning")
