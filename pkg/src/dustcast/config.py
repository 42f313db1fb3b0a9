"""Application configuration: packaged defaults overlaid by a user TOML."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from importlib import resources

from .controller import ControllerSettings, SeverityThresholds
from .errors import ConfigError
from .forecast import ScenarioSpec
from .ingestion import RegionOfInterest
from .models.fusion import BACKEND_KINDS, FusionConfig
from .models.static import STATIC_FAMILIES


@dataclass(frozen=True)
class SiteConfig:
    name: str
    latitude: float
    longitude: float
    radius_km: float

    def roi(self) -> RegionOfInterest:
        return RegionOfInterest(name=self.name, center_lat=self.latitude,
                                center_lon=self.longitude, radius_km=self.radius_km)


@dataclass(frozen=True)
class AppConfig:
    site: Optional[SiteConfig]
    data_dir: Path
    test_fraction: float
    seed: int
    static_family: str
    stage2_family: str
    stage2_bootstrap: str
    oof_folds: int
    encoder_kind: str
    fusion: FusionConfig
    controller: ControllerSettings
    horizon_days: int
    scenario_presets: dict[str, ScenarioSpec] = field(default_factory=dict)
    api_host: str = "127.0.0.1"
    api_port: int = 8000

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ConfigError(f"split.test_fraction must be in (0, 1), got {self.test_fraction}")
        for key, family in (("static_family", self.static_family),
                            ("stage2_family", self.stage2_family)):
            if family not in STATIC_FAMILIES:
                raise ConfigError(
                    f"model.{key} {family!r} not one of {', '.join(STATIC_FAMILIES)}"
                )
        if self.encoder_kind not in BACKEND_KINDS:
            raise ConfigError(
                f"model.fusion.encoder_kind {self.encoder_kind!r} not one of "
                f"{', '.join(BACKEND_KINDS)}"
            )
        if self.stage2_bootstrap not in ("out-of-fold", "observed"):
            raise ConfigError(
                f"model.stage2_bootstrap must be 'out-of-fold' or 'observed', "
                f"got {self.stage2_bootstrap!r}"
            )
        if self.oof_folds < 2:
            raise ConfigError(f"model.oof_folds must be >= 2, got {self.oof_folds}")
        if self.horizon_days < 1:
            raise ConfigError(f"forecast.horizon_days must be >= 1, got {self.horizon_days}")
        if not 1 <= self.api_port <= 65535:
            raise ConfigError(f"api.port out of range: {self.api_port}")

    def require_site(self) -> SiteConfig:
        if self.site is None:
            raise ConfigError(
                "no [site] section configured; set name, latitude, longitude "
                "and radius_km in your config file"
            )
        return self.site


def _deep_merge(base: dict, overlay: dict) -> dict:
    out = dict(base)
    for key, value in overlay.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _load_toml(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    """Packaged defaults, with *path* (if given) merged on top."""
    default_text = resources.files("dustcast").joinpath("default_config.toml").read_bytes()
    data = tomllib.loads(default_text.decode())
    if path is not None:
        data = _deep_merge(data, _load_toml(Path(path)))

    site = None
    if "site" in data:
        try:
            site = SiteConfig(
                name=str(data["site"]["name"]),
                latitude=float(data["site"]["latitude"]),
                longitude=float(data["site"]["longitude"]),
                radius_km=float(data["site"]["radius_km"]),
            )
        except KeyError as exc:
            raise ConfigError(f"[site] section missing key {exc}") from exc

    model = data["model"]
    fusion_raw = model["fusion"]
    try:
        fusion = FusionConfig(
            hidden_dim=int(fusion_raw["hidden_dim"]),
            head_dims=tuple(int(d) for d in fusion_raw["head_dims"]),
            nonlinearity=str(fusion_raw["nonlinearity"]),
            epochs=int(fusion_raw["epochs"]),
            batch_size=int(fusion_raw["batch_size"]),
            learning_rate=float(fusion_raw["learning_rate"]),
            seed=int(model["seed"]),
        )
    except ValueError as exc:
        raise ConfigError(f"bad [model.fusion] settings: {exc}") from exc

    ctrl = data["controller"]
    try:
        controller = ControllerSettings(
            severity=SeverityThresholds(
                low_max=float(ctrl["low_max"]),
                moderate_max=float(ctrl["moderate_max"]),
                high_max=float(ctrl["high_max"]),
            ),
            energy_floor_pct=float(ctrl["energy_floor_pct"]),
            salinity_limit_g_l=float(ctrl["salinity_limit_g_l"]),
            grid_import_increase_pct=float(ctrl["grid_import_increase_pct"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    presets = {}
    for name, spec in data.get("scenario", {}).get("presets", {}).items():
        try:
            presets[name] = ScenarioSpec(
                delta_t2m=float(spec["delta_t2m"]),
                aod_multiplier=float(spec["aod_multiplier"]),
                label=name,
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad scenario preset {name!r}: {exc}") from exc

    return AppConfig(
        site=site,
        data_dir=Path(data["data"]["dir"]),
        test_fraction=float(data["split"]["test_fraction"]),
        seed=int(model["seed"]),
        static_family=str(model["static_family"]),
        stage2_family=str(model["stage2_family"]),
        stage2_bootstrap=str(model["stage2_bootstrap"]),
        oof_folds=int(model["oof_folds"]),
        encoder_kind=str(fusion_raw["encoder_kind"]),
        fusion=fusion,
        controller=controller,
        horizon_days=int(data["forecast"]["horizon_days"]),
        scenario_presets=presets,
        api_host=str(data["api"]["host"]),
        api_port=int(data["api"]["port"]),
    )
