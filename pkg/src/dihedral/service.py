"""HTTP service exposing the check registry.

A thin FastAPI layer over :mod:`dihedral.reports`: one endpoint per check
family plus a full-suite endpoint.  Parameters are exact rationals in
"p/q" syntax, exactly as on the command line.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, field_validator

from . import reports
from .cas import rational_from_string

__all__ = ["app", "CheckRequest", "CheckReportModel"]


class CheckRequest(BaseModel):
    l0: Optional[str] = None
    l1: Optional[str] = None
    alpha: Optional[str] = None
    z: Optional[str] = None
    tol: Optional[float] = None
    n: Optional[int] = None
    full: bool = False

    @field_validator("l0", "l1", "alpha", "z")
    @classmethod
    def _rational_syntax(cls, v):
        if v is not None:
            rational_from_string(v)
        return v


class CheckReportModel(BaseModel):
    check_id: str
    params: dict[str, str]
    status: str
    residual: str
    notes: str


def _kwargs(req: CheckRequest) -> dict:
    out = {}
    for name, key in (("l0", "l0_value"), ("l1", "l1_value"),
                      ("alpha", "alpha_value"), ("z", "z_value")):
        v = getattr(req, name)
        if v is not None:
            out[key] = rational_from_string(v)
    if req.tol is not None:
        out["tol"] = req.tol
    if req.n is not None:
        out["n"] = req.n
    out["full"] = req.full
    return out


def _models(records) -> list[CheckReportModel]:
    return [CheckReportModel(**r.to_dict()) for r in records]


app = FastAPI(title="dihedral", version="0.1.0")


@app.get("/checks")
def list_checks() -> list[str]:
    return sorted(reports.CHECKS)


@app.post("/checks/{name}")
def run_check(name: str, req: CheckRequest) -> list[CheckReportModel]:
    if name not in reports.CHECKS:
        raise HTTPException(status_code=404, detail=f"unknown check id: {name}")
    try:
        return _models(reports.run_check(name, **_kwargs(req)))
    except (ValueError, ZeroDivisionError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/report")
def report(req: CheckRequest) -> list[CheckReportModel]:
    try:
        return _models(reports.run_all(**_kwargs(req)))
    except (ValueError, ZeroDivisionError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
