"""Pydantic request models: the JSON wire contract of the service and CLI.

Frames are given by name ("dirichlet", "neumann", "diagonal" with an "n"),
by a row-major matrix, as the graph of a symplectic matrix, or as a product
of two frames.  Systems are named models ("oscillator", "ball", "seifert"),
an explicit mechanical Hessian, or a sampled coefficient table.
"""

from __future__ import annotations

import os
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator


def default_tol() -> float:
    env = os.environ.get("MASLOV_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise ValueError(f"MASLOV_TOL={env!r} is not a number")
    return 1e-9


class NumericsOptions(BaseModel):
    tol: float = Field(default_factory=default_tol, gt=0.0,
                       description="relative rank tolerance")
    grid: int = Field(2048, ge=16, le=1 << 20,
                      description="crossing pre-scan nodes")
    flow_tol: float = Field(1e-10, gt=0.0,
                            description="symplectic defect target of the integrator")


class FrameSpec(BaseModel):
    """One Lagrangian frame; exactly one defining field must be present."""

    name: Literal["dirichlet", "neumann", "diagonal"] | None = None
    n: int | None = Field(None, ge=1)
    matrix: list[list[float]] | None = None
    space: Literal["standard", "double"] = "standard"
    graph_of: list[list[float]] | None = None
    product_of: list["FrameSpec"] | None = None

    @model_validator(mode="after")
    def _one_of(self):
        given = [f for f in ("name", "matrix", "graph_of", "product_of")
                 if getattr(self, f) is not None]
        if len(given) != 1:
            raise ValueError(
                f"frame needs exactly one of name/matrix/graph_of/product_of, got {given}")
        if self.name is not None and self.n is None:
            raise ValueError("named frames require 'n'")
        if self.product_of is not None and len(self.product_of) != 2:
            raise ValueError("'product_of' takes exactly two frames")
        return self

    def as_json_obj(self) -> dict:
        out: dict[str, Any] = {}
        if self.name is not None:
            out = {"name": self.name, "n": self.n}
        elif self.matrix is not None:
            out = {"matrix": self.matrix, "space": self.space}
            if self.n is not None:
                out["n"] = self.n
        elif self.graph_of is not None:
            out = {"graph_of": self.graph_of}
        else:
            out = {"product_of": [p.as_json_obj() for p in self.product_of]}
        return out


class SystemSpec(BaseModel):
    """A coefficient path B(t): named model, Hessian, or sampled table."""

    model: Literal["oscillator", "ball", "seifert"] | None = None
    mu: float | None = Field(None, gt=0)
    e: float | None = Field(None, gt=0)
    d0: float | None = None
    n: int | None = Field(None, ge=2)
    epsilon: float | None = Field(None, gt=0)
    T: float | None = Field(None, gt=0)
    wobble: float | None = None
    hessian: list[list[float]] | None = None
    t: list[float] | None = None
    B: list[list[list[float]]] | None = None
    mechanical: bool = False

    @model_validator(mode="after")
    def _consistent(self):
        table = self.t is not None or self.B is not None
        if table and (self.t is None or self.B is None):
            raise ValueError("a sampled table needs both 't' and 'B'")
        given = sum([self.model is not None, self.hessian is not None, table])
        if given != 1:
            raise ValueError("system needs exactly one of model/hessian/(t,B)")
        return self

    def as_json_obj(self) -> dict:
        out = self.model_dump(exclude_none=True, exclude_defaults=False)
        out.pop("mechanical", None)
        if self.t is not None:
            out["mechanical"] = self.mechanical
        return out


class ClmRequest(BaseModel):
    system: SystemSpec
    frame: FrameSpec = Field(
        default_factory=lambda: FrameSpec(name="neumann", n=2))
    reference: FrameSpec = Field(
        default_factory=lambda: FrameSpec(name="dirichlet", n=2))
    interval: tuple[float, float] | None = None
    options: NumericsOptions = Field(default_factory=NumericsOptions)

    @field_validator("interval")
    @classmethod
    def _ordered(cls, v):
        if v is not None and v[1] <= v[0]:
            raise ValueError("interval must be increasing")
        return v


class RsRequest(ClmRequest):
    pass


class TripleRequest(BaseModel):
    frames: list[FrameSpec] = Field(min_length=3, max_length=3)
    options: NumericsOptions = Field(default_factory=NumericsOptions)


class HormanderRequest(BaseModel):
    frames: list[FrameSpec] = Field(min_length=4, max_length=4)
    options: NumericsOptions = Field(default_factory=NumericsOptions)


class BrakeIndexRequest(BaseModel):
    model: Literal["oscillator"] | None = "oscillator"
    mu: float = Field(0.4, gt=0)
    e: float = Field(1.0, gt=0)
    d0: float = 0.0
    epsilon: float | None = Field(None, gt=0)
    system: SystemSpec | None = None
    T: float | None = Field(None, gt=0)
    n: int | None = Field(None, ge=1)
    with_oracle: bool = True
    options: NumericsOptions = Field(default_factory=NumericsOptions)

    @model_validator(mode="after")
    def _source(self):
        if self.system is not None and (self.T is None or self.n is None):
            raise ValueError("an explicit system needs 'T' and 'n'")
        return self


class OscillatorRequest(BaseModel):
    mu: float = Field(..., gt=0)
    e: float = Field(1.0, gt=0)
    d0: float = 0.0
    epsilon: float | None = Field(None, gt=0)
    options: NumericsOptions = Field(default_factory=NumericsOptions)


class HillRequest(BaseModel):
    model: Literal["homogeneous-singular", "anisotropic-kepler",
                   "anisotropic-oscillator", "oscillator"]
    alpha: float | None = Field(None, gt=0)
    nu: float | None = Field(None, gt=1)
    mu: float | None = Field(None, gt=0)
    k: float

    @model_validator(mode="after")
    def _param(self):
        kind = "anisotropic-oscillator" if self.model == "oscillator" else self.model
        needed = {"homogeneous-singular": "alpha", "anisotropic-kepler": "nu",
                  "anisotropic-oscillator": "mu"}[kind]
        if getattr(self, needed) is None:
            raise ValueError(f"model {kind!r} needs parameter {needed!r}")
        return self

    @property
    def kind(self) -> str:
        return "anisotropic-oscillator" if self.model == "oscillator" else self.model

    @property
    def parameter(self) -> float:
        return {"homogeneous-singular": self.alpha, "anisotropic-kepler": self.nu,
                "anisotropic-oscillator": self.mu}[self.kind]


REQUEST_TYPES = {
    "clm": ClmRequest,
    "rs": RsRequest,
    "triple": TripleRequest,
    "hormander": HormanderRequest,
    "brake-index": BrakeIndexRequest,
    "oscillator": OscillatorRequest,
    "hill": HillRequest,
}
