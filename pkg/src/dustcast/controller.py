"""Dust-aware operational rules for the desalination plant.

Pure functions from forecast state to directives: AOD severity sets the
feed-pressure and cleaning response, while the energy and salinity rules
fire independently of severity.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Optional, Sequence, Union

from .forecast import PipelineForecast


class SeverityLevel(IntEnum):
    LOW = 0
    MODERATE = 1
    HIGH = 2
    SEVERE = 3


@dataclass(frozen=True)
class SeverityThresholds:
    """Upper bounds of LOW, MODERATE and HIGH; above the last is SEVERE."""

    low_max: float = 0.7
    moderate_max: float = 1.5
    high_max: float = 3.0

    def __post_init__(self):
        if not self.low_max < self.moderate_max < self.high_max:
            raise ValueError(
                f"thresholds must be strictly increasing, got "
                f"{self.low_max}, {self.moderate_max}, {self.high_max}"
            )


@dataclass(frozen=True)
class ControllerSettings:
    severity: SeverityThresholds = field(default_factory=SeverityThresholds)
    energy_floor_pct: float = 65.0
    salinity_limit_g_l: float = 45.0
    grid_import_increase_pct: float = 25.0


DEFAULT_SETTINGS = ControllerSettings()

# pressure response is keyed to severity alone
PRESSURE_DELTA_PCT = {
    SeverityLevel.SEVERE: -15.0,
    SeverityLevel.HIGH: -8.0,
    SeverityLevel.MODERATE: 0.0,
    SeverityLevel.LOW: 0.0,
}

RULE_SEVERE = "severe-dust-response"
RULE_HIGH = "high-dust-response"
RULE_DEFERRAL = "chemical-cleaning-deferral"
RULE_THROUGHPUT = "throughput-maximized"
RULE_GRID = "grid-import-increase"
RULE_PRETREATMENT = "salinity-pretreatment"


@dataclass(frozen=True)
class PlantState:
    predicted_aod: float
    solar_efficiency_pct: float
    salinity_g_l: Optional[float] = None
    sustained_high_dust: bool = False

    def __post_init__(self):
        if self.predicted_aod < 0:
            raise ValueError(f"predicted_aod < 0: {self.predicted_aod}")
        if not 0 <= self.solar_efficiency_pct <= 100:
            raise ValueError(
                f"solar_efficiency_pct out of [0, 100]: {self.solar_efficiency_pct}"
            )


@dataclass(frozen=True)
class ControlDirective:
    severity: SeverityLevel
    ro_pressure_delta_pct: float
    robotic_cleaning: bool
    chemical_cleaning_deferral_h: int
    grid_import_increase_pct: float
    pretreatment: bool
    throughput_mode: str  # "normal" | "maximized"
    rationale: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.name,
            "ro_pressure_delta_pct": self.ro_pressure_delta_pct,
            "robotic_cleaning": self.robotic_cleaning,
            "chemical_cleaning_deferral_h": self.chemical_cleaning_deferral_h,
            "grid_import_increase_pct": self.grid_import_increase_pct,
            "pretreatment": self.pretreatment,
            "throughput_mode": self.throughput_mode,
            "rationale": list(self.rationale),
        }


def classify_severity(aod: float,
                      thresholds: SeverityThresholds = DEFAULT_SETTINGS.severity
                      ) -> SeverityLevel:
    """Map AOD to a severity band; each boundary belongs to the band below."""
    if aod < 0:
        raise ValueError(f"aod must be >= 0, got {aod}")
    if aod <= thresholds.low_max:
        return SeverityLevel.LOW
    if aod <= thresholds.moderate_max:
        return SeverityLevel.MODERATE
    if aod <= thresholds.high_max:
        return SeverityLevel.HIGH
    return SeverityLevel.SEVERE


def decide_directive(state: PlantState,
                     settings: ControllerSettings = DEFAULT_SETTINGS) -> ControlDirective:
    severity = classify_severity(state.predicted_aod, settings.severity)
    rationale = []

    robotic = False
    deferral_h = 0
    throughput = "normal"
    if severity is SeverityLevel.SEVERE:
        robotic = True
        rationale.append(RULE_SEVERE)
    elif severity is SeverityLevel.HIGH:
        rationale.append(RULE_HIGH)
        if state.sustained_high_dust:
            deferral_h = 24
            rationale.append(RULE_DEFERRAL)
    else:
        throughput = "maximized"
        rationale.append(RULE_THROUGHPUT)

    grid = 0.0
    if state.solar_efficiency_pct < settings.energy_floor_pct:
        grid = settings.grid_import_increase_pct
        rationale.append(RULE_GRID)

    pretreatment = False
    if state.salinity_g_l is not None and state.salinity_g_l > settings.salinity_limit_g_l:
        pretreatment = True
        rationale.append(RULE_PRETREATMENT)

    return ControlDirective(
        severity=severity,
        ro_pressure_delta_pct=PRESSURE_DELTA_PCT[severity],
        robotic_cleaning=robotic,
        chemical_cleaning_deferral_h=deferral_h,
        grid_import_increase_pct=grid,
        pretreatment=pretreatment,
        throughput_mode=throughput,
        rationale=tuple(rationale),
    )


def directives_for_series(
    dates: Sequence[dt.date],
    aod_values: Sequence[float],
    solar_efficiency_pct: Sequence[float],
    salinity_series: Optional[Sequence[float]] = None,
    settings: ControllerSettings = DEFAULT_SETTINGS,
) -> list[tuple[dt.date, ControlDirective]]:
    """One directive per day of a projected series.

    Daily data cannot resolve sub-day persistence, so "sustained" high
    dust is proxied as severity >= HIGH today and tomorrow; the final day
    has no tomorrow and falls back to its own severity.
    """
    if not len(dates) == len(aod_values) == len(solar_efficiency_pct):
        raise ValueError("dates, AOD and efficiency series must share a length")
    severities = [classify_severity(v, settings.severity) for v in aod_values]
    if salinity_series is not None and len(salinity_series) != len(dates):
        raise ValueError(
            f"salinity series length {len(salinity_series)} != horizon {len(dates)}"
        )

    out = []
    for k, day in enumerate(dates):
        high_today = severities[k] >= SeverityLevel.HIGH
        if k + 1 < len(dates):
            sustained = high_today and severities[k + 1] >= SeverityLevel.HIGH
        else:
            sustained = high_today
        state = PlantState(
            predicted_aod=aod_values[k],
            solar_efficiency_pct=solar_efficiency_pct[k],
            salinity_g_l=None if salinity_series is None else salinity_series[k],
            sustained_high_dust=sustained,
        )
        out.append((day, decide_directive(state, settings)))
    return out


def directives_for_forecast(
    forecast: PipelineForecast,
    salinity_series: Optional[Sequence[float]] = None,
    settings: ControllerSettings = DEFAULT_SETTINGS,
) -> list[tuple[dt.date, ControlDirective]]:
    return directives_for_series(
        forecast.aod.dates, forecast.aod.values, forecast.solar_efficiency_pct,
        salinity_series=salinity_series, settings=settings,
    )


def directives_to_json(directives: Sequence[tuple[dt.date, ControlDirective]]) -> list[dict]:
    return [{"date": day.isoformat(), **directive.to_dict()}
            for day, directive in directives]


def write_directives_json(directives: Sequence[tuple[dt.date, ControlDirective]],
                          path: Union[str, Path]):
    Path(path).write_text(json.dumps(directives_to_json(directives), indent=2) + "\n")
