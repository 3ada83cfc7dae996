"""Pydantic request/response models for the HTTP service.

Document shapes mirror the on-disk formats (plan JSON, parameter overrides,
measurement CSV carried as text), so a CLI client can forward files as-is.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

from .. import __version__
from ..geometry import FloorPlan, Point3, plan_from_dict
from ..models import (
    LinkBudget,
    ParamsBundle,
    Scenario,
    channel_to_frequency,
    params_bundle_from_dict,
)


class BudgetDoc(BaseModel):
    tx_power_dbm: float = 15.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0

    def to_budget(self) -> LinkBudget:
        return LinkBudget(self.tx_power_dbm, self.tx_gain_dbi, self.rx_gain_dbi)


class CustomMaterialSpec(BaseModel):
    name: str
    loss_db: float = Field(gt=0)


class CustomMaterialDoc(BaseModel):
    custom: CustomMaterialSpec


class WallDoc(BaseModel):
    ax: float
    ay: float
    bx: float
    by: float
    floor: int = 0
    material: str | CustomMaterialDoc = "concrete"


class PillarDoc(BaseModel):
    cx: float
    cy: float
    w: float = Field(0.6, gt=0)
    d: float = Field(0.6, gt=0)
    floor: int = 0


class PlanDoc(BaseModel):
    name: str = ""
    floor_count: int = Field(1, ge=1)
    floor_height_m: float = Field(3.0, gt=0)
    walls: list[WallDoc] = []
    pillars: list[PillarDoc] = []

    def to_plan(self) -> FloorPlan:
        return plan_from_dict(self.model_dump())


class PointDoc(BaseModel):
    x: float
    y: float
    floor: int = 0

    def to_point(self) -> Point3:
        return Point3(self.x, self.y, self.floor)


class ParamsDoc(BaseModel):
    """Partial overrides merged over the built-in tables."""

    tiplm: dict[str, Any] | None = None
    itu_r: dict[str, Any] | None = None
    log_distance: dict[str, Any] | None = None

    def to_bundle(self) -> ParamsBundle:
        doc = {k: v for k, v in self.model_dump().items() if v is not None}
        return params_bundle_from_dict(doc)


class RadioRequest(BaseModel):
    """Common channel/frequency selection: exactly one of the two."""

    channel: int | None = Field(None, ge=1, le=14)
    frequency_mhz: float | None = Field(None, gt=0)

    @model_validator(mode="after")
    def _exactly_one(self) -> "RadioRequest":
        if (self.channel is None) == (self.frequency_mhz is None):
            raise ValueError("supply exactly one of channel or frequency_mhz")
        return self

    def resolved_frequency(self) -> float:
        if self.channel is not None:
            return channel_to_frequency(self.channel)
        assert self.frequency_mhz is not None
        return self.frequency_mhz


ModelKey = Literal["tiplm", "itu_r", "log_distance"]


class PredictRequest(RadioRequest):
    model: ModelKey = "tiplm"
    distance_m: float = Field(gt=0)
    obstacles: dict[str, int] = {}
    floor_delta: int = 0
    scenario: Scenario = Scenario.BUSY_OFFICE
    budget: BudgetDoc = BudgetDoc()
    params: ParamsDoc | None = None

    @model_validator(mode="after")
    def _counts_non_negative(self) -> "PredictRequest":
        if any(c < 0 for c in self.obstacles.values()):
            raise ValueError("obstacle counts must be non-negative")
        return self


class PredictResponse(BaseModel):
    model: str
    frequency_mhz: float
    distance_m: float
    path_loss_db: float
    rssi_dbm: float


class FitRequest(RadioRequest):
    data_csv: str
    plan: PlanDoc | None = None
    parameter: Literal["nt", "gamma"] = "nt"
    d0_m: float = Field(1.0, gt=0)
    bin_width_m: float = Field(0.5, gt=0)
    budget: BudgetDoc = BudgetDoc()
    params: ParamsDoc | None = None
    weight_by_samples: bool = False


class FitResponse(BaseModel):
    parameter: str
    estimate: float
    residual_rms_db: float
    sample_count: int


class CompareRequest(RadioRequest):
    data_csv: str
    plan: PlanDoc | None = None
    scenario: Scenario = Scenario.BUSY_OFFICE
    bin_width_m: float = Field(0.5, gt=0)
    budget: BudgetDoc = BudgetDoc()
    params: ParamsDoc | None = None
    include_fits: bool = True


class ModelScoreDoc(BaseModel):
    name: str
    mse_db2: float
    bias_db: float


class CompareResponse(BaseModel):
    models: list[ModelScoreDoc]
    winner: str
    fits: dict[str, FitResponse] | None = None


class CoverageRequest(RadioRequest):
    plan: PlanDoc = PlanDoc()
    ap: PointDoc
    model: ModelKey = "tiplm"
    scenario: Scenario = Scenario.BUSY_OFFICE
    floor: int | None = None
    resolution_m: float = Field(0.5, gt=0)
    budget: BudgetDoc = BudgetDoc()
    params: ParamsDoc | None = None
    formats: list[Literal["csv", "pgm"]] = []


class CoverageResponse(BaseModel):
    origin_x: float
    origin_y: float
    resolution_m: float
    width: int
    height: int
    floor: int
    warning_count: int
    values: list[float | None]
    csv: str | None = None
    pgm: str | None = None


class SynthRequest(BaseModel):
    plan: PlanDoc = PlanDoc()
    ap: PointDoc
    channel: int = Field(1, ge=1, le=14)
    scenario: Scenario = Scenario.BUSY_OFFICE
    budget: BudgetDoc = BudgetDoc()
    noise_mean_db: float = 0.5
    noise_std_db: float = Field(3.58, ge=0)
    n_locations: int = Field(100, ge=1)
    samples_per_location: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    params: ParamsDoc | None = None


class SynthResponse(BaseModel):
    csv: str
    n_records: int


class NoiseDoc(BaseModel):
    mean_db: float
    std_db: float


class DefaultsResponse(BaseModel):
    channels_mhz: dict[int, float]
    wall_loss_db: dict[str, float]
    nt_busy: dict[int, dict[int, float]]
    nt_open: dict[int, float]
    nt_corridor: float
    faf_db: dict[int, float]
    itu_r_n: dict[str, float]
    itu_r_floor_penetration_db: dict[int, float]
    synth_noise: NoiseDoc


class ServiceInfo(BaseModel):
    service: str = "indoorpl"
    version: str = __version__
