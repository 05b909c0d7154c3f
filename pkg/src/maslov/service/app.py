"""HTTP front end: one POST endpoint per command, pydantic-validated.

Input errors map to 400 (pydantic validation itself yields 422), numerical
aborts (degenerate crossings, unresolved clusters, integrator failures) to
409 with the diagnostic message.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..engine.errors import NumericalAbort
from . import handlers
from .schemas import (BrakeIndexRequest, ClmRequest, HillRequest,
                      HormanderRequest, OscillatorRequest, RsRequest,
                      TripleRequest)

app = FastAPI(title="maslov", version="0.1.0",
              description="Maslov-type intersection indices and brake-orbit "
                          "Morse indices")


@app.exception_handler(ValueError)
async def _value_error(_: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"error": str(exc)})


@app.exception_handler(NumericalAbort)
async def _numerical_abort(_: Request, exc: NumericalAbort):
    return JSONResponse(status_code=409, content={"error": str(exc),
                                                  "kind": type(exc).__name__})


@app.get("/v1/health")
def health():
    return {"status": "ok", "schema": handlers.SCHEMA_VERSION}


@app.post("/v1/clm")
def clm(req: ClmRequest):
    return handlers.run_clm(req)


@app.post("/v1/rs")
def rs(req: RsRequest):
    return handlers.run_rs(req)


@app.post("/v1/triple")
def triple(req: TripleRequest):
    return handlers.run_triple(req)


@app.post("/v1/hormander")
def hormander(req: HormanderRequest):
    return handlers.run_hormander(req)


@app.post("/v1/brake-index")
def brake_index(req: BrakeIndexRequest):
    return handlers.run_brake_index(req)


@app.post("/v1/oscillator")
def oscillator(req: OscillatorRequest):
    return handlers.run_oscillator(req)


@app.post("/v1/hill")
def hill(req: HillRequest):
    return handlers.run_hill(req)
