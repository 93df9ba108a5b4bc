"""FastAPI application exposing the simulator over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import QannealError
from . import handlers, schemas

app = FastAPI(
    title="qanneal",
    description=(
        "Exact-diagonalization service for fermionic, bosonic and Ising "
        "quantum annealers on random 3-regular graph-partitioning instances."
    ),
    version="0.1.0",
)


def _run(handler, request):
    try:
        return handler(request)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except QannealError as exc:
        raise HTTPException(status_code=500, detail=f"numerical failure: {exc}") from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/graphs/generate", response_model=schemas.GenerateResponse)
def generate(request: schemas.GenerateRequest) -> schemas.GenerateResponse:
    return _run(handlers.handle_generate, request)


@app.post("/partition/solve", response_model=schemas.SolveResponse)
def solve(request: schemas.SolveRequest) -> schemas.SolveResponse:
    return _run(handlers.handle_solve, request)


@app.post("/anneal", response_model=schemas.AnnealResponse)
def anneal(request: schemas.AnnealRequest) -> schemas.AnnealResponse:
    return _run(handlers.handle_anneal, request)


@app.post("/spectrum", response_model=schemas.SpectrumResponse)
def spectrum(request: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    return _run(handlers.handle_spectrum, request)


@app.post("/records/aggregate", response_model=schemas.AggregateResponse)
def aggregate(request: schemas.AggregateRequest) -> schemas.AggregateResponse:
    return _run(handlers.handle_aggregate, request)


@app.post("/records/compare", response_model=schemas.CompareResponse)
def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    return _run(handlers.handle_compare, request)
