"""Request and response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator

from ..cosets import SubgroupSpec
from ..pairing import DEFAULT_TOL_IDENTITY, DEFAULT_TOL_PATH, DEFAULT_TOL_PERIOD


class RunConfig(BaseModel):
    """Everything a subcommand needs.  Unused fields are ignored."""

    group: str = "full"
    weight: int = Field(0, ge=0)
    nm: str | None = None
    point: str | None = None
    nmax: int = Field(50, ge=1)
    tol_path: float = Field(DEFAULT_TOL_PATH, gt=0)
    tol_period: float = Field(DEFAULT_TOL_PERIOD, gt=0)
    tol_identity: float = Field(DEFAULT_TOL_IDENTITY, gt=0)
    seed: int | None = None
    threads: int = Field(1, ge=1)
    form: str | None = None
    n_list: list[int] = Field(default_factory=lambda: [20, 40, 80])
    terms: int | None = Field(None, ge=1)

    @field_validator("group")
    @classmethod
    def _group(cls, v: str) -> str:
        return str(SubgroupSpec.parse(v))


class Report(BaseModel):
    command: Literal["cosets", "encode", "lms", "lyapunov", "pair", "verify-theorem"]
    version: str
    config: dict[str, Any]
    tolerances: dict[str, float]
    result: dict[str, Any]


class Health(BaseModel):
    status: str = "ok"
    version: str
