from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException

from .. import __version__
from .handlers import ConfigError, run
from .schemas import Health, Report, RunConfig

app = FastAPI(title="limsym", version=__version__)

# mpmath keeps its working precision in global state
_lock = threading.Lock()


def _call(command: str, cfg: RunConfig) -> dict:
    try:
        with _lock:
            return run(command, cfg)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health", response_model=Health)
def health():
    return Health(version=__version__)


@app.post("/cosets", response_model=Report)
def cosets(cfg: RunConfig):
    return _call("cosets", cfg)


@app.post("/encode", response_model=Report)
def encode(cfg: RunConfig):
    return _call("encode", cfg)


@app.post("/lms", response_model=Report)
def lms(cfg: RunConfig):
    return _call("lms", cfg)


@app.post("/lyapunov", response_model=Report)
def lyapunov(cfg: RunConfig):
    return _call("lyapunov", cfg)


@app.post("/pair", response_model=Report)
def pair(cfg: RunConfig):
    return _call("pair", cfg)


@app.post("/verify-theorem", response_model=Report)
def verify_theorem(cfg: RunConfig):
    return _call("verify-theorem", cfg)
