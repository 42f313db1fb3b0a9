"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    schema_version: int


class ScenarioRequest(BaseModel):
    delta_t2m: float
    aod_multiplier: float = Field(gt=0)
    horizon: Optional[int] = None  # range-checked in the endpoint, not here


class ScenarioModel(BaseModel):
    delta_t2m: float
    aod_multiplier: float
    label: str


class ForecastResponse(BaseModel):
    schema_version: int
    start_date: str
    horizon: int
    aod: list[float]
    efficiency_loss_pct: list[float]
    solar_efficiency_pct: list[float]
    scenario: Optional[ScenarioModel] = None


class DirectiveModel(BaseModel):
    date: str
    severity: str
    ro_pressure_delta_pct: float
    robotic_cleaning: bool
    chemical_cleaning_deferral_h: int
    grid_import_increase_pct: float
    pretreatment: bool
    throughput_mode: str
    rationale: list[str]


class DirectivesResponse(BaseModel):
    schema_version: int
    horizon: int
    directives: list[DirectiveModel]


class AttributionReportModel(BaseModel):
    feature_names: list[str]
    base_value: float
    mean_abs_phi: list[float]
    std_abs_phi: list[float]
    rank: list[int]
    mode: str
    per_instance_phi: list[list[float]]
    predictions: list[float]


class Stage1AttributionsResponse(BaseModel):
    schema_version: int
    stage: int
    static: AttributionReportModel
    temporal: AttributionReportModel


class Stage2AttributionsResponse(BaseModel):
    schema_version: int
    stage: int
    report: AttributionReportModel
