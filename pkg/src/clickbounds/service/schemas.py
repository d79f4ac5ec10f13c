"""Pydantic request/response models; the wire format of the service and the
interchange format between the CLI and the handlers."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class RunInfo(BaseModel):
    """Reproducibility header: enough to regenerate the run."""

    tool: str = "clickbounds"
    version: str
    timestamp: str
    command: str
    params: dict


class StateRequest(BaseModel):
    state: str = Field(description="state spec, e.g. 'thermal:nbar=2' or 'file:p.txt'")
    cutoff: int = Field(default=80, ge=0)


class StateResponse(BaseModel):
    run: RunInfo
    probabilities: list[float]
    tail_mass: float
    mean: float
    family: Optional[str] = None
    nbar: Optional[float] = None


class ClicksRequest(BaseModel):
    state: str
    channels: int = Field(ge=1)
    eta: float = Field(default=1.0, gt=0.0, le=1.0)
    cutoff: int = Field(default=80, ge=0)
    include_matrix: bool = False


class ClicksResponse(BaseModel):
    run: RunInfo
    clicks: list[float]
    deficit: float
    transmittances: list[float]
    vacuum_probabilities: list[float]
    click_matrix: Optional[list[list[float]]] = None


class BoundsRequest(BaseModel):
    state: str
    channels: int = Field(ge=1)
    eta: float = Field(default=1.0, gt=0.0, le=1.0)
    cutoff: int = Field(default=80, ge=0)
    form: Literal["vacuum", "click"] = "vacuum"
    targets: str = Field(
        default="pn:0-14",
        description="comma list of pn:<k>, pn:<a>-<b>, wigner, nbar",
    )


class BoundRow(BaseModel):
    family: str
    nbar: float
    channels: int
    eta: float
    cutoff: int
    target: str
    z_min: float
    z_max: float
    true_value: float
    gap_min: float
    gap_max: float
    cutoff_conditional: bool
    error: Optional[str] = None


class BoundsResponse(BaseModel):
    run: RunInfo
    rows: list[BoundRow]


class RegionRequest(BaseModel):
    state: str
    channels: int = Field(ge=1)
    eta: float = Field(default=1.0, gt=0.0, le=1.0)
    cutoff: int = Field(default=80, ge=0)
    form: Literal["vacuum", "click"] = "vacuum"
    j: int = Field(ge=0)
    k: int = Field(ge=0)
    angles: int = Field(default=100, ge=3)


class RegionPoint(BaseModel):
    phi: float
    pj: float
    pk: float


class RegionResponse(BaseModel):
    run: RunInfo
    j: int
    k: int
    points: list[RegionPoint]


class SweepRequest(BaseModel):
    family: Literal["thermal", "coherent", "squeezed", "subtracted"]
    nbars: list[float]
    channels: list[int]
    etas: list[float] = [1.0]
    cutoffs: list[int] = [80]
    target: str = "pn:5"
    form: Literal["vacuum", "click"] = "vacuum"


class SweepResponse(BaseModel):
    run: RunInfo
    rows: list[BoundRow]


class EstimatorRequest(BaseModel):
    channels: int = Field(ge=1)
    eta: float = Field(default=1.0, gt=0.0, le=1.0)
    cutoff: int = Field(default=80, ge=0)


class EstimatorResponse(BaseModel):
    run: RunInfo
    d_coeffs: list[float]
    g_coeffs: list[float]


class Hbt1Request(BaseModel):
    """Either raw (p0, q0) or a state spec to derive them from."""

    p0: Optional[float] = None
    q0: Optional[float] = None
    state: Optional[str] = None
    cutoff: int = Field(default=80, ge=0)


class Hbt1Response(BaseModel):
    run: RunInfo
    p0: float
    q0: float
    p1_lower: float
    p1_upper: float


class Hbt2Request(BaseModel):
    """Either the eight no-click probabilities or a state spec whose product
    state with itself supplies them."""

    p0a: Optional[float] = None
    p0b: Optional[float] = None
    p00: Optional[float] = None
    qa: Optional[float] = None
    qb: Optional[float] = None
    q0a: Optional[float] = None
    q0b: Optional[float] = None
    q00: Optional[float] = None
    state: Optional[str] = None
    cutoff: int = Field(default=80, ge=0)


class Hbt2Response(BaseModel):
    run: RunInfo
    d1: float
    d2: float
    d3: float
    p11_lower: float
    applicable: bool


class SelftestRequest(BaseModel):
    criteria: Optional[list[int]] = None
    seed: int = 20240801


class CriterionOutcome(BaseModel):
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float
    certificate_related: bool = False


class SelftestResponse(BaseModel):
    run: RunInfo
    results: list[CriterionOutcome]
    all_passed: bool
