"""Source data acquisition and daily merge.

Meteorological and AOD data arrive either from a live HTTP endpoint or
from committed fixture files (CSV, same format either way). The meteo
series defines the master calendar; AOD is spatially aggregated, merged
by date, gap-filled, and the efficiency-loss column derived.

Units follow the source dataset conventions: temperature degC, wind m/s,
humidity g/kg, pressure kPa, irradiance W/m^2. AOD is dimensionless after
the scale factor is applied; raw scaled integers never leave this module.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    EmptyRangeError,
    IngestionError,
    InterpolationError,
    MalformedRecordError,
    SourceUnreachableError,
)
from .physics import efficiency_loss_pct

METEO_HEADER = ("date", "t2m", "t2mdew", "ws2m", "qv2m", "ps", "irr_clear", "irr_actual")
AOD_HEADER = ("date", "pixel_values", "scale_factor")
MERGED_HEADER = METEO_HEADER + ("aod", "aod_interpolated", "efficiency_loss_pct")

DEFAULT_AOD_SCALE = 0.001


@dataclass(frozen=True)
class RegionOfInterest:
    name: str
    center_lat: float
    center_lon: float
    radius_km: float

    def __post_init__(self):
        if not -90 <= self.center_lat <= 90:
            raise ValueError(f"center_lat out of range: {self.center_lat}")
        if not -180 <= self.center_lon <= 180:
            raise ValueError(f"center_lon out of range: {self.center_lon}")
        if self.radius_km <= 0:
            raise ValueError(f"radius_km must be > 0: {self.radius_km}")


@dataclass(frozen=True)
class RawMeteoRecord:
    date: dt.date
    t2m: float
    t2mdew: float
    ws2m: float
    qv2m: float
    ps: float
    irradiance_clear_sky: float
    irradiance_actual: float

    def __post_init__(self):
        if self.irradiance_clear_sky < 0:
            raise ValueError(f"irradiance_clear_sky < 0 on {self.date}")
        if self.irradiance_actual < 0:
            raise ValueError(f"irradiance_actual < 0 on {self.date}")


@dataclass(frozen=True)
class RawAodSample:
    date: dt.date
    pixel_values: tuple[int, ...]
    scale_factor: float = DEFAULT_AOD_SCALE

    def __post_init__(self):
        if self.scale_factor <= 0:
            raise ValueError(f"scale_factor must be > 0: {self.scale_factor}")


@dataclass(frozen=True)
class MergedDailyRecord:
    date: dt.date
    t2m: float
    t2mdew: float
    ws2m: float
    qv2m: float
    ps: float
    irradiance_clear_sky: float
    irradiance_actual: float
    aod: float
    aod_interpolated: bool
    efficiency_loss_pct: Optional[float] = None

    def __post_init__(self):
        if self.aod < 0:
            raise ValueError(f"aod < 0 on {self.date}")


@dataclass(frozen=True)
class FixtureSource:
    """Replay a committed CSV fixture instead of hitting the network."""

    path: Union[str, Path]


@dataclass(frozen=True)
class HttpSource:
    """Live endpoint returning CSV in the fixture format."""

    url: str
    timeout_s: float = 30.0


DataSource = Union[FixtureSource, HttpSource]


def _read_source_text(source: DataSource, roi: RegionOfInterest,
                      start: dt.date, end: dt.date) -> str:
    if isinstance(source, FixtureSource):
        path = Path(source.path)
        try:
            return path.read_text()
        except OSError as exc:
            raise SourceUnreachableError(f"cannot read fixture {path}: {exc}") from exc
    if isinstance(source, HttpSource):
        import requests

        params = {
            "lat": roi.center_lat,
            "lon": roi.center_lon,
            "radius_km": roi.radius_km,
            "start": start.isoformat(),
            "end": end.isoformat(),
        }
        try:
            resp = requests.get(source.url, params=params, timeout=source.timeout_s)
            resp.raise_for_status()
        except Exception as exc:
            raise SourceUnreachableError(f"cannot reach {source.url}: {exc}") from exc
        return resp.text
    raise TypeError(f"unknown data source type: {type(source)!r}")


def _check_header(fieldnames: Sequence[str] | None, expected: Sequence[str]):
    if fieldnames is None or tuple(fieldnames) != tuple(expected):
        raise MalformedRecordError(
            "header", f"expected columns {','.join(expected)}, got {fieldnames}"
        )


def _parse_date(raw: str, field: str = "date") -> dt.date:
    try:
        return dt.date.fromisoformat(raw.strip())
    except ValueError as exc:
        raise MalformedRecordError(field, f"bad date {raw!r}") from exc


def _parse_float(row: dict, field: str) -> float:
    raw = row.get(field)
    if raw is None or raw.strip() == "":
        raise MalformedRecordError(field, f"missing on {row.get('date', '?')}")
    try:
        return float(raw)
    except ValueError as exc:
        raise MalformedRecordError(field, f"unparseable value {raw!r}") from exc


def fetch_meteo(source: DataSource, roi: RegionOfInterest,
                start: dt.date, end: dt.date) -> list[RawMeteoRecord]:
    """Fetch one meteo record per day in [start, end], sorted by date."""
    if start > end:
        raise EmptyRangeError(f"start {start} is after end {end}")
    text = _read_source_text(source, roi, start, end)
    reader = csv.DictReader(io.StringIO(text))
    _check_header(reader.fieldnames, METEO_HEADER)

    records = []
    seen: set[dt.date] = set()
    for row in reader:
        day = _parse_date(row["date"])
        if not start <= day <= end:
            continue
        if day in seen:
            raise MalformedRecordError("date", f"duplicate date {day}")
        seen.add(day)
        try:
            rec = RawMeteoRecord(
                date=day,
                t2m=_parse_float(row, "t2m"),
                t2mdew=_parse_float(row, "t2mdew"),
                ws2m=_parse_float(row, "ws2m"),
                qv2m=_parse_float(row, "qv2m"),
                ps=_parse_float(row, "ps"),
                irradiance_clear_sky=_parse_float(row, "irr_clear"),
                irradiance_actual=_parse_float(row, "irr_actual"),
            )
        except ValueError as exc:
            raise MalformedRecordError("irradiance", str(exc)) from exc
        records.append(rec)

    records.sort(key=lambda r: r.date)
    expected = (end - start).days + 1
    if len(records) != expected:
        missing = sorted({start + dt.timedelta(days=i) for i in range(expected)} - seen)
        shown = ", ".join(d.isoformat() for d in missing[:5])
        raise IngestionError(
            f"source covers {len(records)}/{expected} days; missing {shown}"
        )
    return records


def fetch_aod(source: DataSource, roi: RegionOfInterest,
              start: dt.date, end: dt.date) -> list[RawAodSample]:
    """Fetch AOD pixel samples in [start, end].

    Unlike meteo, satellite coverage is allowed to be sparse: days absent
    from the source are simply not returned.
    """
    if start > end:
        raise EmptyRangeError(f"start {start} is after end {end}")
    text = _read_source_text(source, roi, start, end)
    reader = csv.DictReader(io.StringIO(text))
    _check_header(reader.fieldnames, AOD_HEADER)

    samples = []
    for row in reader:
        day = _parse_date(row["date"])
        if not start <= day <= end:
            continue
        raw_pixels = (row.get("pixel_values") or "").strip()
        try:
            pixels = tuple(int(p) for p in raw_pixels.split(";") if p.strip() != "")
        except ValueError as exc:
            raise MalformedRecordError("pixel_values", f"on {day}: {exc}") from exc
        scale = _parse_float(row, "scale_factor")
        try:
            samples.append(RawAodSample(date=day, pixel_values=pixels, scale_factor=scale))
        except ValueError as exc:
            raise MalformedRecordError("scale_factor", str(exc)) from exc
    samples.sort(key=lambda s: s.date)
    return samples


def aggregate_aod(samples: Iterable[RawAodSample],
                  roi: RegionOfInterest) -> list[tuple[dt.date, Optional[float]]]:
    """Mean pixel value times scale factor per date; empty pixels -> missing.

    Samples are assumed to be already clipped to the region of interest by
    the source; the roi argument records provenance for live clients.
    """
    out = []
    for sample in sorted(samples, key=lambda s: s.date):
        if sample.scale_factor <= 0:
            raise ValueError(f"scale_factor must be > 0 on {sample.date}")
        if not sample.pixel_values:
            out.append((sample.date, None))
        else:
            mean_pixel = sum(sample.pixel_values) / len(sample.pixel_values)
            out.append((sample.date, mean_pixel * sample.scale_factor))
    return out


def merge_and_interpolate(
    meteo: Sequence[RawMeteoRecord],
    aod: Sequence[tuple[dt.date, Optional[float]]],
) -> list[MergedDailyRecord]:
    """Merge AOD onto the meteo calendar, filling gaps.

    Interior gaps are filled by linear interpolation between the nearest
    valid neighbors (in day units); leading/trailing gaps take the nearest
    valid value. Filled rows carry aod_interpolated=True.
    """
    meteo = sorted(meteo, key=lambda r: r.date)
    by_date = {day: value for day, value in aod}

    days = [r.date for r in meteo]
    values: list[Optional[float]] = [by_date.get(day) for day in days]

    known = [(i, v) for i, v in enumerate(values) if v is not None]
    if not known:
        raise InterpolationError("no valid AOD value in the entire series")

    filled = list(values)
    first_i, first_v = known[0]
    last_i, last_v = known[-1]
    for i in range(first_i):
        filled[i] = first_v
    for i in range(last_i + 1, len(filled)):
        filled[i] = last_v
    for (i0, v0), (i1, v1) in zip(known, known[1:]):
        if i1 - i0 > 1:
            d0, d1 = days[i0], days[i1]
            span = (d1 - d0).days
            for i in range(i0 + 1, i1):
                frac = (days[i] - d0).days / span
                filled[i] = v0 + (v1 - v0) * frac

    merged = []
    for rec, day, value, raw in zip(meteo, days, filled, values):
        merged.append(
            MergedDailyRecord(
                date=day,
                t2m=rec.t2m,
                t2mdew=rec.t2mdew,
                ws2m=rec.ws2m,
                qv2m=rec.qv2m,
                ps=rec.ps,
                irradiance_clear_sky=rec.irradiance_clear_sky,
                irradiance_actual=rec.irradiance_actual,
                aod=float(value),
                aod_interpolated=raw is None,
            )
        )
    return merged


def derive_efficiency_loss(records: Sequence[MergedDailyRecord]) -> list[MergedDailyRecord]:
    """Fill the efficiency-loss column from the two irradiance columns."""
    out = []
    for rec in records:
        if rec.irradiance_clear_sky <= 0:
            raise ValueError(
                f"zero clear-sky irradiance on {rec.date}; cannot derive efficiency loss"
            )
        loss = efficiency_loss_pct(rec.irradiance_clear_sky, rec.irradiance_actual)
        out.append(replace(rec, efficiency_loss_pct=loss))
    return out


def write_merged_csv(records: Sequence[MergedDailyRecord], path: Union[str, Path]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MERGED_HEADER)
        for r in records:
            writer.writerow([
                r.date.isoformat(),
                repr(r.t2m), repr(r.t2mdew), repr(r.ws2m), repr(r.qv2m), repr(r.ps),
                repr(r.irradiance_clear_sky), repr(r.irradiance_actual),
                repr(r.aod),
                "true" if r.aod_interpolated else "false",
                "" if r.efficiency_loss_pct is None else repr(r.efficiency_loss_pct),
            ])


def read_merged_csv(path: Union[str, Path]) -> list[MergedDailyRecord]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SourceUnreachableError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    _check_header(reader.fieldnames, MERGED_HEADER)
    records = []
    for row in reader:
        loss_raw = (row.get("efficiency_loss_pct") or "").strip()
        records.append(
            MergedDailyRecord(
                date=_parse_date(row["date"]),
                t2m=_parse_float(row, "t2m"),
                t2mdew=_parse_float(row, "t2mdew"),
                ws2m=_parse_float(row, "ws2m"),
                qv2m=_parse_float(row, "qv2m"),
                ps=_parse_float(row, "ps"),
                irradiance_clear_sky=_parse_float(row, "irr_clear"),
                irradiance_actual=_parse_float(row, "irr_actual"),
                aod=_parse_float(row, "aod"),
                aod_interpolated=(row.get("aod_interpolated", "").strip().lower() == "true"),
                efficiency_loss_pct=None if loss_raw == "" else float(loss_raw),
            )
        )
    records.sort(key=lambda r: r.date)
    return records
