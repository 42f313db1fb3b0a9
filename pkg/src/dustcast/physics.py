"""Closed-form solar and desalination physics.

All functions are pure and stateless. Irradiance is in W/m^2, AOD is
dimensionless, angles are degrees unless noted.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class IrradianceSample:
    """One day's irradiance context for attenuation calculations."""

    irradiance_clear_sky: float
    irradiance_actual: float
    aod: float
    air_mass: float
    zenith_deg: float

    def __post_init__(self):
        if self.aod < 0:
            raise ValueError(f"aod must be >= 0, got {self.aod}")
        if not 0 <= self.zenith_deg < 90:
            raise ValueError(f"zenith_deg must be in [0, 90), got {self.zenith_deg}")
        if self.air_mass < 1:
            raise ValueError(f"air_mass must be >= 1, got {self.air_mass}")


@dataclass(frozen=True)
class ThermalPlantSpec:
    """Solar-thermal desalination unit parameters.

    mass_flow_kg_s is the freshwater mass flow rate, not to be confused
    with the (dimensionless) optical air mass used elsewhere.
    """

    mass_flow_kg_s: float
    latent_heat_kj_kg: float
    collector_area_m2: float

    def __post_init__(self):
        for name in ("mass_flow_kg_s", "latent_heat_kj_kg", "collector_area_m2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class PvSpec:
    """Photovoltaic panel parameters for the linear efficiency model."""

    eta_ref: float
    alpha_per_w_m2: float
    i_ref: float

    def __post_init__(self):
        if not 0 < self.eta_ref < 1:
            raise ValueError(f"eta_ref must be in (0, 1), got {self.eta_ref}")
        if self.i_ref <= 0:
            raise ValueError(f"i_ref must be > 0, got {self.i_ref}")


class PvEfficiency(NamedTuple):
    value: float
    clamped: bool


def efficiency_loss_pct(i_clear: float, i_actual: float) -> float:
    """Percent shortfall of actual vs clear-sky irradiance."""
    if i_clear <= 0:
        raise ValueError(f"clear-sky irradiance must be > 0, got {i_clear}")
    if i_actual < 0:
        raise ValueError(f"actual irradiance must be >= 0, got {i_actual}")
    return 100.0 * (i_clear - i_actual) / i_clear


def attenuate_irradiance(i_clear: float, aod: float, air_mass: float) -> float:
    """Exponential dust attenuation of clear-sky irradiance."""
    if i_clear < 0:
        raise ValueError(f"clear-sky irradiance must be >= 0, got {i_clear}")
    if aod < 0:
        raise ValueError(f"aod must be >= 0, got {aod}")
    if air_mass < 1:
        raise ValueError(f"air_mass must be >= 1, got {air_mass}")
    return i_clear * math.exp(-aod * air_mass)


def air_mass_coefficient(zenith_deg: float) -> float:
    """Secant-of-zenith path length factor; 1.0 for overhead sun."""
    if not 0 <= zenith_deg < 90:
        raise ValueError(
            f"zenith angle must be in [0, 90) degrees, got {zenith_deg}"
        )
    return 1.0 / math.cos(math.radians(zenith_deg))


def solar_declination_deg(day_of_year: int) -> float:
    """Solar declination via the standard sinusoidal approximation."""
    return 23.45 * math.sin(2.0 * math.pi * (284 + day_of_year) / 365.0)


def solar_noon_zenith_deg(latitude_deg: float, day_of_year: int) -> float:
    """Zenith angle at local solar noon for a given latitude and day."""
    if not -90 <= latitude_deg <= 90:
        raise ValueError(f"latitude must be in [-90, 90], got {latitude_deg}")
    return abs(latitude_deg - solar_declination_deg(day_of_year))


def daily_air_mass(latitude_deg: float, day: dt.date) -> float:
    """Air mass at local solar noon, the single value used per day."""
    zenith = solar_noon_zenith_deg(latitude_deg, day.timetuple().tm_yday)
    return air_mass_coefficient(zenith)


def thermal_efficiency(spec: ThermalPlantSpec, irradiance: float) -> float:
    """Thermal conversion efficiency of a solar still / collector.

    Latent heat arrives in kJ/kg and is converted to J/kg internally so
    the result is a dimensionless fraction.
    """
    if irradiance <= 0:
        raise ValueError(f"irradiance must be > 0, got {irradiance}")
    energy_out = spec.mass_flow_kg_s * spec.latent_heat_kj_kg * 1000.0
    energy_in = spec.collector_area_m2 * irradiance
    return energy_out / energy_in


def pv_efficiency(spec: PvSpec, irradiance: float) -> PvEfficiency:
    """Linear irradiance-sensitivity PV efficiency, clamped to [0, 1].

    The linear form is unbounded, so out-of-range values are clamped and
    flagged rather than returned silently.
    """
    if irradiance < 0:
        raise ValueError(f"irradiance must be >= 0, got {irradiance}")
    raw = spec.eta_ref * (1.0 + spec.alpha_per_w_m2 * (irradiance - spec.i_ref))
    clamped = min(max(raw, 0.0), 1.0)
    return PvEfficiency(clamped, clamped != raw)


def solar_efficiency_pct(efficiency_loss: float) -> float:
    """Complement of efficiency loss; the quantity plant rules act on."""
    if not 0 <= efficiency_loss <= 100:
        raise ValueError(
            f"efficiency loss must be in [0, 100], got {efficiency_loss}"
        )
    return 100.0 - efficiency_loss
