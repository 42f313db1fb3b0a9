"""Recursive AOD projection, efficiency chaining, and scenario stress.

The recursion feeds each day's prediction back into the lag/rolling
features for the next day. Static meteorology is frozen at the last
observed day; only the calendar month advances with the forecast date.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

from .errors import NotFittedError
from .features import SequenceFeatures, StaticFeatures
from .ingestion import MergedDailyRecord
from .models.hybrid import HybridAodModel
from .models.static import StaticRegressor

DEFAULT_HORIZON_DAYS = 30

# roll7 is the widest engineered window
MIN_HISTORY_DAYS = 7


class StepInputs(NamedTuple):
    lag1: float
    lag2: float
    roll3: float
    roll7: float


@dataclass(frozen=True)
class AodForecast:
    start_date: dt.date
    horizon_days: int
    values: tuple[float, ...]
    inputs_log: tuple[StepInputs, ...]
    clamped: tuple[bool, ...]

    def __post_init__(self):
        if self.horizon_days < 1:
            raise ValueError(f"horizon_days must be >= 1, got {self.horizon_days}")
        if len(self.values) != self.horizon_days or len(self.inputs_log) != self.horizon_days:
            raise ValueError("values/inputs_log length must equal horizon_days")
        if any(v < 0 for v in self.values):
            raise ValueError("forecast AOD values must be >= 0")

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(self.start_date + dt.timedelta(days=k)
                     for k in range(self.horizon_days))


@dataclass(frozen=True)
class ScenarioSpec:
    delta_t2m: float
    aod_multiplier: float
    label: str = ""

    def __post_init__(self):
        if self.aod_multiplier <= 0:
            raise ValueError(f"aod_multiplier must be > 0, got {self.aod_multiplier}")

    @property
    def is_identity(self) -> bool:
        return self.delta_t2m == 0 and self.aod_multiplier == 1

    def to_dict(self) -> dict:
        return {"delta_t2m": self.delta_t2m, "aod_multiplier": self.aod_multiplier,
                "label": self.label}


SCENARIO_PRESETS = {
    "paper": ScenarioSpec(delta_t2m=1.5, aod_multiplier=1.2, label="paper"),
}


@dataclass(frozen=True)
class PipelineForecast:
    aod: AodForecast
    efficiency_loss_pct: tuple[float, ...]
    solar_efficiency_pct: tuple[float, ...]
    loss_clamped: tuple[bool, ...]
    scenario: Optional[ScenarioSpec] = None

    def __post_init__(self):
        n = self.aod.horizon_days
        for name in ("efficiency_loss_pct", "solar_efficiency_pct", "loss_clamped"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length must equal horizon {n}")

    def to_dict(self) -> dict:
        return {
            "start_date": self.aod.start_date.isoformat(),
            "horizon": self.aod.horizon_days,
            "aod": list(self.aod.values),
            "efficiency_loss_pct": list(self.efficiency_loss_pct),
            "solar_efficiency_pct": list(self.solar_efficiency_pct),
            "scenario": None if self.scenario is None else self.scenario.to_dict(),
        }

    def write_csv(self, path: Union[str, Path]):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "aod", "efficiency_loss_pct", "solar_efficiency_pct"])
            for day, aod, loss, solar in zip(self.aod.dates, self.aod.values,
                                             self.efficiency_loss_pct,
                                             self.solar_efficiency_pct):
                writer.writerow([day.isoformat(), repr(aod), repr(loss), repr(solar)])


def _frozen_static(last: MergedDailyRecord, month: int) -> StaticFeatures:
    return StaticFeatures(t2m=last.t2m, t2mdew=last.t2mdew, ws2m=last.ws2m,
                          qv2m=last.qv2m, ps=last.ps, month=month)


def recursive_aod_forecast(model: HybridAodModel,
                           history: Sequence[MergedDailyRecord],
                           horizon: int = DEFAULT_HORIZON_DAYS) -> AodForecast:
    """Project AOD forward, feeding each prediction back into the features."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if len(history) < MIN_HISTORY_DAYS:
        raise ValueError(
            f"need at least {MIN_HISTORY_DAYS} history days, got {len(history)}"
        )
    if not model.fitted:
        raise NotFittedError("hybrid model used before fit")

    history = sorted(history, key=lambda r: r.date)
    last = history[-1]
    series = [r.aod for r in history]

    values, inputs_log, clamp_flags = [], [], []
    for k in range(horizon):
        day = last.date + dt.timedelta(days=k + 1)
        step = StepInputs(
            lag1=series[-1],
            lag2=series[-2],
            roll3=sum(series[-3:]) / 3,
            roll7=sum(series[-7:]) / 7,
        )
        seq = SequenceFeatures(aod_lag1=step.lag1, aod_lag2=step.lag2,
                               aod_roll3=step.roll3, aod_roll7=step.roll7)
        pred = model.predict_one(_frozen_static(last, day.month), seq)
        values.append(pred.value)
        inputs_log.append(step)
        clamp_flags.append(pred.clamped)
        series.append(pred.value)

    return AodForecast(
        start_date=last.date + dt.timedelta(days=1),
        horizon_days=horizon,
        values=tuple(values),
        inputs_log=tuple(inputs_log),
        clamped=tuple(clamp_flags),
    )


def chain_efficiency_forecast(aod_fc: AodForecast,
                              eff_model: StaticRegressor,
                              last_record: MergedDailyRecord,
                              scenario: Optional[ScenarioSpec] = None) -> PipelineForecast:
    """Predict per-day efficiency loss from the AOD forecast.

    Irradiances and meteorology are held at the last observation; the
    month column follows the forecast calendar. Losses outside [0, 100]
    are clamped with a flag.
    """
    if not eff_model.fitted:
        raise NotFittedError("efficiency regressor used before fit")

    import numpy as np

    rows = np.empty((aod_fc.horizon_days, 9))
    for k, (day, aod) in enumerate(zip(aod_fc.dates, aod_fc.values)):
        rows[k] = (aod, last_record.irradiance_actual, last_record.irradiance_clear_sky,
                   last_record.t2m, last_record.t2mdew, last_record.ws2m,
                   last_record.qv2m, last_record.ps, day.month)
    raw_loss = eff_model.predict(rows)
    clamped_loss = raw_loss.clip(0.0, 100.0)

    return PipelineForecast(
        aod=aod_fc,
        efficiency_loss_pct=tuple(float(v) for v in clamped_loss),
        solar_efficiency_pct=tuple(float(100.0 - v) for v in clamped_loss),
        loss_clamped=tuple(bool(r != c) for r, c in zip(raw_loss, clamped_loss)),
        scenario=None if scenario is None or scenario.is_identity else scenario,
    )


def apply_scenario(records: Sequence[MergedDailyRecord],
                   spec: ScenarioSpec) -> list[MergedDailyRecord]:
    """Stressed copy of the records: t2m shifted, AOD scaled.

    Derived features must be rebuilt downstream from the scaled series;
    nothing here touches the originals.
    """
    return [replace(r, t2m=r.t2m + spec.delta_t2m, aod=r.aod * spec.aod_multiplier)
            for r in records]


def pipeline_forecast(hybrid: HybridAodModel,
                      eff_model: StaticRegressor,
                      history: Sequence[MergedDailyRecord],
                      horizon: int = DEFAULT_HORIZON_DAYS,
                      scenario: Optional[ScenarioSpec] = None) -> PipelineForecast:
    """End-to-end projection: optional scenario, then stage 1, then stage 2."""
    if scenario is not None:
        history = apply_scenario(history, scenario)
    aod_fc = recursive_aod_forecast(hybrid, history, horizon)
    return chain_efficiency_forecast(aod_fc, eff_model, sorted(history, key=lambda r: r.date)[-1],
                                     scenario=scenario)
