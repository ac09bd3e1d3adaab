"""HTTP service exposing the core operations.

Run with: uvicorn twistlocal.service:app

Every endpoint is a stateless POST taking a small JSON body and returning
the same JSON the library's to_json methods produce, so the CLI's --server
mode can print responses verbatim. Domain failures map to 422 with a detail
message (plus the per-hypothesis report for density preflights); precision
exhaustion maps to 500.
"""

from __future__ import annotations

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .classpoly import hilbert_class_poly
from .errors import BoundExceededError, DomainError, PrecisionError, PreflightError, SpecError
from .localpoints import TwistSpec, everywhere_local, verdict_at_prime
from .picard import (
    CuspidalModel,
    cusp_order_composite,
    cusp_order_prime,
    mw_sieve_check,
    parse_sieve_data,
    pic1_verdict_composite,
    pic1_verdict_prime,
    solve_cuspidal_relations,
)
from .twistsearch import SearchConfig, SearchDiagnostics, count_admissible_twists, search_twists

app = FastAPI(title="twistlocal", version=__version__)


# every anticipated error carries a "kind" so the CLI's thin-client mode can
# reproduce the in-process exit codes exactly


@app.exception_handler(PreflightError)
async def _preflight_handler(_, exc: PreflightError):
    return JSONResponse(
        status_code=422,
        content={
            "detail": str(exc),
            "kind": "preflight",
            "report": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in exc.report],
        },
    )


@app.exception_handler(SpecError)
async def _spec_handler(_, exc: SpecError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "spec"})


@app.exception_handler(DomainError)
async def _domain_handler(_, exc: DomainError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "domain"})


@app.exception_handler(BoundExceededError)
async def _bound_handler(_, exc: BoundExceededError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "bound"})


@app.exception_handler(PrecisionError)
async def _precision_handler(_, exc: PrecisionError):
    return JSONResponse(status_code=500, content={"detail": str(exc), "kind": "precision"})


class VerdictRequest(BaseModel):
    m: list[int]
    d: list[int]
    prime: int | None = None
    include_verdicts: bool = False


class SearchRequest(BaseModel):
    m: list[int]
    bound: int
    limit: int | None = None


class DensityRequest(BaseModel):
    m1: int
    m2: int
    d1: int
    X: int
    B: int | None = None


class ClasspolyRequest(BaseModel):
    disc: int


class CuspOrderRequest(BaseModel):
    level: list[int]


class Pic1Request(BaseModel):
    level: list[int]
    inert: bool


class CuspidalRequest(BaseModel):
    n: int
    relations: list[tuple[int, int]]


@app.get("/healthz")
async def healthz():
    return {"status": "ok", "version": __version__}


@app.post("/verdict")
async def post_verdict(req: VerdictRequest):
    spec = TwistSpec(tuple(req.m), tuple(req.d))
    if req.prime is not None:
        return verdict_at_prime(spec, req.prime).to_json()
    return everywhere_local(spec).to_json(include_verdicts=req.include_verdicts)


@app.post("/search")
async def post_search(req: SearchRequest):
    diag = SearchDiagnostics()
    hits = [h.to_json() for h in search_twists(SearchConfig(tuple(req.m), req.bound, req.limit), diag)]
    return {
        "hits": hits,
        "diagnostics": {
            "candidates": diag.candidates,
            "emitted": diag.emitted,
            "suppressed_unknown": diag.suppressed_unknown,
            "suppressed_no": diag.suppressed_no,
        },
    }


@app.post("/density")
async def post_density(req: DensityRequest):
    count, report = count_admissible_twists(req.m1, req.m2, req.d1, req.X, req.B)
    return {"count": count, "report": report.to_json(), "csv": report.to_csv()}


@app.post("/classpoly")
async def post_classpoly(req: ClasspolyRequest):
    poly = hilbert_class_poly(req.disc)
    return {
        "disc": poly.disc,
        "degree": poly.degree,
        "coeffs": list(poly.coeffs),
        "pretty": poly.pretty(),
        "record": poly.record_line(),
    }


@app.post("/picard/cusp-order")
async def post_cusp_order(req: CuspOrderRequest):
    if len(req.level) == 1:
        return {"order": cusp_order_prime(req.level[0])}
    return {"order": cusp_order_composite(req.level[0], tuple(req.level[1:]))}


@app.post("/picard/pic1")
async def post_pic1(req: Pic1Request):
    if len(req.level) == 1:
        return pic1_verdict_prime(req.level[0], req.inert).to_json()
    return pic1_verdict_composite(req.level[0], tuple(req.level[1:]), req.inert).to_json()


@app.post("/picard/cuspidal")
async def post_cuspidal(req: CuspidalRequest):
    model = CuspidalModel.from_pairs(req.n, req.relations)
    return {"n": req.n, "solutions": sorted(solve_cuspidal_relations(model))}


@app.post("/sieve")
async def post_sieve(payload: dict = Body(...)):
    return {"outcome": mw_sieve_check(parse_sieve_data(payload)).value}
