"""Stateless HTTP facade over integrate, classify, bisect, and the guide curves.

Every response echoes the request it answered and reports server-side compute
time. Malformed bodies get 400; well-formed but ill-posed requests get 422
with a machine-readable reason slug; each request runs under a wall-clock
budget and is refused with reason "budget-exceeded" when it runs out.
"""

from __future__ import annotations

import time
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict

from .analysis import GUIDES, ClassifierParams
from .equations import EquationId
from .exceptions import (BudgetExceeded, CoverageError, InconclusiveEndpoint,
                         InsufficientOscillation, InvalidInput,
                         NearZeroDenominator, NoSignChange,
                         NotStrictlyPositive, OutOfRangeError, P4LabError,
                         RejectedInput, UnsupportedMultipleZeros)
from .fastpath import integrate_equation
from .ode import (Span, State, StepControl, Trajectory, _ascending_view,
                  _refine_extremum, eval_dense)
from .search import Family, bisect_threshold
from .serialize import (SCHEMA, TRAJECTORY_JSONSCHEMA, behavior_to_dict,
                        regions_to_dict, sanitize, threshold_to_dict)

BUDGET_SECONDS = 2.0

_REASONS = (
    (BudgetExceeded, "budget-exceeded"),
    (NearZeroDenominator, "near-zero-denominator"),
    (NoSignChange, "no-sign-change"),
    (InconclusiveEndpoint, "inconclusive-endpoint"),
    (CoverageError, "coverage-error"),
    (UnsupportedMultipleZeros, "multiple-zeros"),
    (NotStrictlyPositive, "not-strictly-positive"),
    (InsufficientOscillation, "insufficient-oscillation"),
    (OutOfRangeError, "out-of-range"),
    (InvalidInput, "invalid-input"),
    (RejectedInput, "rejected-input"),
)


def _reason(exc: P4LabError) -> str:
    for cls, slug in _REASONS:
        if isinstance(exc, cls):
            return slug
    return "error"


class IcModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    t: float = 0.0
    y: float
    v: float


class SpanModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    t0: float
    t1: float


class TolModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rtol: Optional[float] = None
    atol: Optional[float] = None


class ParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    min_crossings: int = 3
    linger_dist: float = 0.05
    linger_span: float = 1.0
    n_samples: int = 4000


_EqTag = Literal["p", "pbar", "phalf", "pbarhalf"]


class IntegrateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    equation: _EqTag
    ic: IcModel
    span: SpanModel
    tolerances: TolModel = TolModel()
    max_samples: int = 2000


class ClassifyBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    equation: _EqTag
    ic: IcModel
    window: SpanModel
    tolerances: TolModel = TolModel()
    params: ParamsModel = ParamsModel()


class BisectBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    equation: _EqTag
    t0: float = 0.0
    y0: float
    window: SpanModel
    lo: float
    hi: float
    tol: float = 1e-10
    tolerances: TolModel = TolModel()
    params: ParamsModel = ParamsModel()


def _control(tol: TolModel) -> StepControl:
    kw = {}
    if tol.rtol is not None:
        kw["rtol"] = tol.rtol
    if tol.atol is not None:
        kw["atol"] = tol.atol
    return StepControl(**kw)


def _params(p: ParamsModel) -> ClassifierParams:
    return ClassifierParams(min_crossings=p.min_crossings,
                            linger_dist=p.linger_dist,
                            linger_span=p.linger_span,
                            n_samples=p.n_samples)


def _extrema_times(traj: Trajectory) -> np.ndarray:
    tn, _, vn, _ = _ascending_view(traj)
    sign = np.sign(vn)
    flips = np.flatnonzero((sign[:-1] != 0) & (sign[1:] != 0) & (sign[:-1] != sign[1:]))
    return np.asarray([_refine_extremum(traj, float(tn[i]), float(tn[i + 1]))
                       for i in flips])


def downsampled_samples(traj: Trajectory, max_samples: int) -> tuple[list, bool]:
    """Resampled (t, y, v) dicts: a uniform grid plus every refined extremum.

    The uniform grid gets whatever budget the extrema leave over, which caps
    the largest gap at twice the all-uniform gap as long as extrema take at
    most half the budget; more extrema than that cannot be preserved and is
    refused rather than silently dropped.
    """
    if max_samples < 16:
        raise RejectedInput("max_samples must be >= 16")
    if traj.n <= max_samples:
        return ([{"t": float(t), "y": float(y), "v": float(v)}
                 for t, y, v in zip(traj.t, traj.y, traj.v)], False)

    ext = _extrema_times(traj)
    if ext.size > (max_samples - 1) // 2:
        raise RejectedInput(
            f"{ext.size} extrema cannot be preserved within max_samples="
            f"{max_samples}; raise max_samples")
    k_uniform = max_samples - ext.size
    grid = np.linspace(traj.t_min, traj.t_max, k_uniform)
    ts = np.sort(np.concatenate((grid, ext)))
    # drop near-duplicates (an extremum can land on a grid point)
    eps = 1e-9 * (traj.t_max - traj.t_min) / max_samples
    keep = np.concatenate(([True], np.diff(ts) > eps))
    ts = ts[keep]
    y, v = eval_dense(traj, ts)
    return ([{"t": float(a), "y": float(b), "v": float(c)}
             for a, b, c in zip(ts, y, v)], True)


def _trajectory_response(traj: Trajectory, max_samples: int) -> dict:
    samples, downsampled = downsampled_samples(traj, max_samples)
    ic = traj.initial
    return {
        "schema": SCHEMA,
        "equation": traj.eq.value if traj.eq is not None else None,
        "ic": {"t": ic.t, "y": ic.y, "v": ic.v},
        "samples": samples,
        "termination": traj.termination.as_dict(),
        "control": {"rtol": traj.control.rtol, "atol": traj.control.atol},
        "downsampled": downsampled,
        "n_nodes": traj.n,
    }


def create_app(budget_seconds: float = BUDGET_SECONDS) -> FastAPI:
    app = FastAPI(title="p4lab", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "reason": "malformed",
            "detail": jsonable_encoder(exc.errors(),
                                       custom_encoder={Exception: str}),
        })

    @app.exception_handler(P4LabError)
    async def _ill_posed(request: Request, exc: P4LabError):
        body = {"reason": _reason(exc), "message": str(exc)}
        if isinstance(exc, BudgetExceeded):
            body["partial"] = False
        return JSONResponse(status_code=422, content=body)

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.get("/api/schema")
    def schema() -> dict:
        return {"trajectory": TRAJECTORY_JSONSCHEMA}

    @app.post("/api/integrate")
    def api_integrate(body: IntegrateBody) -> JSONResponse:
        started = time.perf_counter()
        deadline = time.monotonic() + budget_seconds
        eq = EquationId(body.equation)
        traj = integrate_equation(eq, State(body.ic.t, body.ic.y, body.ic.v),
                                  Span(body.span.t0, body.span.t1),
                                  _control(body.tolerances), deadline=deadline)
        out = _trajectory_response(traj, body.max_samples)
        out["request"] = body.model_dump()
        out["compute_ms"] = 1e3 * (time.perf_counter() - started)
        return JSONResponse(sanitize(out))

    @app.post("/api/classify")
    def api_classify(body: ClassifyBody) -> JSONResponse:
        started = time.perf_counter()
        deadline = time.monotonic() + budget_seconds
        eq = EquationId(body.equation)
        family = Family(eq, body.ic.t, body.ic.y,
                        Span(body.window.t0, body.window.t1),
                        _control(body.tolerances))
        behavior = family.classify_at(body.ic.v, _params(body.params),
                                      deadline=deadline)
        out = {
            "schema": SCHEMA,
            "kind": "classification",
            "behavior": behavior_to_dict(behavior),
            "request": body.model_dump(),
            "compute_ms": 1e3 * (time.perf_counter() - started),
        }
        return JSONResponse(sanitize(out))

    @app.post("/api/bisect")
    def api_bisect(body: BisectBody) -> JSONResponse:
        started = time.perf_counter()
        deadline = time.monotonic() + budget_seconds
        eq = EquationId(body.equation)
        family = Family(eq, body.t0, body.y0,
                        Span(body.window.t0, body.window.t1),
                        _control(body.tolerances))
        th = bisect_threshold(family, body.lo, body.hi, tol=body.tol,
                              params=_params(body.params), deadline=deadline)
        out = threshold_to_dict(th)
        out["request"] = body.model_dump()
        out["compute_ms"] = 1e3 * (time.perf_counter() - started)
        return JSONResponse(sanitize(out))

    @app.get("/api/regions")
    def api_regions(tmin: float = -10.0, tmax: float = 1.0,
                    n: int = 500) -> JSONResponse:
        started = time.perf_counter()
        out = regions_to_dict(GUIDES.polylines(tmin, tmax, n))
        out["request"] = {"tmin": tmin, "tmax": tmax, "n": n}
        out["compute_ms"] = 1e3 * (time.perf_counter() - started)
        return JSONResponse(out)

    return app
