"""Synthetic site data with known structure.

Generates a daily series whose AOD combines a 30-day cycle, an annual
cycle, weak meteorological coupling and AR(1) noise, then derives actual
irradiance from clear-sky irradiance through exponential attenuation at
the site's solar-noon air mass. Efficiency loss therefore follows the
physics exactly up to a small multiplicative measurement noise, which is
what makes the end-to-end pipeline testable against known ground truth.

Run as a module to write fixture CSVs:

    python -m dustcast.synthetic --days 1600 --out-dir data/
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .ingestion import (
    AOD_HEADER,
    METEO_HEADER,
    MergedDailyRecord,
    RawAodSample,
    derive_efficiency_loss,
    write_merged_csv,
)
from .physics import daily_air_mass

DEFAULT_DAYS = 1600
DEFAULT_SEED = 42
DEFAULT_SITE_LAT = 24.0
DEFAULT_START = dt.date(2020, 1, 1)

SEASONAL_PERIOD_DAYS = 30


def generate_synthetic_records(n_days: int = DEFAULT_DAYS,
                               seed: int = DEFAULT_SEED,
                               start_date: dt.date = DEFAULT_START,
                               site_lat: float = DEFAULT_SITE_LAT
                               ) -> list[MergedDailyRecord]:
    if n_days < 1:
        raise ValueError(f"n_days must be >= 1, got {n_days}")
    rng = np.random.default_rng(seed)
    dates = [start_date + dt.timedelta(days=i) for i in range(n_days)]
    doy = np.array([d.timetuple().tm_yday for d in dates], dtype=float)
    t = np.arange(n_days, dtype=float)

    annual = np.sin(2 * np.pi * (doy - 100) / 365.0)
    t2m = 28.0 + 8.0 * annual + rng.normal(0, 1.0, n_days)
    dew_spread = 8.0 + 2.0 * np.sin(2 * np.pi * doy / 365.0 + 1.0) + rng.normal(0, 0.8, n_days)
    t2mdew = t2m - np.clip(dew_spread, 1.0, None)
    ws2m = np.clip(4.5 + 1.5 * np.sin(2 * np.pi * t / SEASONAL_PERIOD_DAYS + 0.7)
                   + rng.normal(0, 0.9, n_days), 0.3, None)
    qv2m = np.clip(12.0 + 4.0 * annual + rng.normal(0, 0.8, n_days), 1.0, None)
    ps = 95.5 + 0.4 * np.sin(2 * np.pi * doy / 365.0 + 2.0) + rng.normal(0, 0.12, n_days)

    # AR(1) memory is what gives the lag features predictive value
    shocks = rng.normal(0, 0.035, n_days)
    ar = np.empty(n_days)
    ar[0] = shocks[0]
    for i in range(1, n_days):
        ar[i] = 0.78 * ar[i - 1] + shocks[i]

    aod = (0.45
           + 0.25 * np.sin(2 * np.pi * t / SEASONAL_PERIOD_DAYS)
           + 0.08 * np.sin(2 * np.pi * (doy - 30) / 365.0)
           + 0.012 * (ws2m - 4.5)
           + 0.004 * (t2m - 28.0)
           + ar)
    aod = np.clip(aod, 0.02, None)

    irr_clear = 1000.0 + 120.0 * np.sin(2 * np.pi * (doy - 81) / 365.0)
    air_mass = np.array([daily_air_mass(site_lat, d) for d in dates])
    irr_actual = irr_clear * np.exp(-aod * air_mass) * (1.0 + rng.normal(0, 0.01, n_days))
    irr_actual = np.clip(irr_actual, 0.0, irr_clear)

    records = [
        MergedDailyRecord(
            date=dates[i],
            t2m=float(t2m[i]),
            t2mdew=float(t2mdew[i]),
            ws2m=float(ws2m[i]),
            qv2m=float(qv2m[i]),
            ps=float(ps[i]),
            irradiance_clear_sky=float(irr_clear[i]),
            irradiance_actual=float(irr_actual[i]),
            aod=float(aod[i]),
            aod_interpolated=False,
        )
        for i in range(n_days)
    ]
    return derive_efficiency_loss(records)


def generate_aod_samples(records: Sequence[MergedDailyRecord],
                         seed: int = DEFAULT_SEED,
                         empty_fraction: float = 0.04,
                         scale_factor: float = 0.001) -> list[RawAodSample]:
    """Per-day satellite-style pixel lists; a few days are cloud-masked empty."""
    rng = np.random.default_rng(seed + 1)
    samples = []
    for rec in records:
        if rng.random() < empty_fraction:
            samples.append(RawAodSample(date=rec.date, pixel_values=(),
                                        scale_factor=scale_factor))
            continue
        n_pixels = int(rng.integers(12, 40))
        jitter = rng.normal(0, 0.01, n_pixels)
        pixels = np.maximum(np.round((rec.aod + jitter) / scale_factor), 0).astype(int)
        samples.append(RawAodSample(date=rec.date, pixel_values=tuple(int(p) for p in pixels),
                                    scale_factor=scale_factor))
    return samples


def write_meteo_csv(records: Sequence[MergedDailyRecord], path: Union[str, Path]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METEO_HEADER)
        for r in records:
            writer.writerow([
                r.date.isoformat(),
                repr(r.t2m), repr(r.t2mdew), repr(r.ws2m), repr(r.qv2m), repr(r.ps),
                repr(r.irradiance_clear_sky), repr(r.irradiance_actual),
            ])


def write_aod_csv(samples: Sequence[RawAodSample], path: Union[str, Path]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AOD_HEADER)
        for s in samples:
            writer.writerow([
                s.date.isoformat(),
                ";".join(str(p) for p in s.pixel_values),
                repr(s.scale_factor),
            ])


def write_fixture_set(out_dir: Union[str, Path], n_days: int = DEFAULT_DAYS,
                      seed: int = DEFAULT_SEED, start_date: dt.date = DEFAULT_START,
                      site_lat: float = DEFAULT_SITE_LAT) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = generate_synthetic_records(n_days, seed, start_date, site_lat)
    samples = generate_aod_samples(records, seed)
    paths = {
        "meteo": out / "meteo.csv",
        "aod": out / "aod.csv",
        "merged": out / "merged.csv",
    }
    write_meteo_csv(records, paths["meteo"])
    write_aod_csv(samples, paths["aod"])
    write_merged_csv(records, paths["merged"])
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate synthetic site fixtures (meteo, AOD pixels, merged)."
    )
    parser.add_argument("--days", type=int, default=DEFAULT_DAYS)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--start", type=dt.date.fromisoformat, default=DEFAULT_START,
                        help="first day, ISO format (default %(default)s)")
    parser.add_argument("--site-lat", type=float, default=DEFAULT_SITE_LAT)
    parser.add_argument("--out-dir", type=Path, required=True)
    args = parser.parse_args(argv)
    if args.days < 1:
        parser.error(f"--days must be >= 1, got {args.days}")

    paths = write_fixture_set(args.out_dir, args.days, args.seed, args.start,
                              args.site_lat)
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
