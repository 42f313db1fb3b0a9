import pytest

from dustcast.config import AppConfig, SiteConfig, load_config
from dustcast.errors import ConfigError


def write_toml(tmp_path, text):
    path = tmp_path / "dustcast.toml"
    path.write_text(text)
    return path


class TestDefaults:
    def test_packaged_defaults(self):
        cfg = load_config()
        assert cfg.site is None
        assert cfg.seed == 42
        assert cfg.test_fraction == 0.2
        assert cfg.encoder_kind == "bidirectional-recurrent"
        assert cfg.fusion.epochs == 50
        assert cfg.stage2_bootstrap == "out-of-fold"
        assert cfg.horizon_days == 30

    def test_paper_preset_available(self):
        cfg = load_config()
        preset = cfg.scenario_presets["paper"]
        assert preset.delta_t2m == 1.5
        assert preset.aod_multiplier == 1.2

    def test_require_site_without_site(self):
        with pytest.raises(ConfigError, match="site"):
            load_config().require_site()


class TestOverlay:
    def test_partial_override_keeps_other_defaults(self, tmp_path):
        path = write_toml(tmp_path, """
[model]
seed = 7

[model.fusion]
epochs = 3
""")
        cfg = load_config(path)
        assert cfg.seed == 7
        assert cfg.fusion.epochs == 3
        # untouched siblings keep packaged values
        assert cfg.fusion.hidden_dim == 32
        assert cfg.test_fraction == 0.2

    def test_site_section(self, tmp_path):
        path = write_toml(tmp_path, """
[site]
name = "coastal-plant"
latitude = 25.3
longitude = 51.5
radius_km = 40.0
""")
        cfg = load_config(path)
        assert cfg.site == SiteConfig("coastal-plant", 25.3, 51.5, 40.0)
        roi = cfg.require_site().roi()
        assert roi.center_lat == 25.3
        assert roi.name == "coastal-plant"

    def test_controller_override(self, tmp_path):
        path = write_toml(tmp_path, """
[controller]
energy_floor_pct = 70.0
""")
        cfg = load_config(path)
        assert cfg.controller.energy_floor_pct == 70.0
        assert cfg.controller.salinity_limit_g_l == 45.0

    def test_extra_preset(self, tmp_path):
        path = write_toml(tmp_path, """
[scenario.presets.mild]
delta_t2m = 0.5
aod_multiplier = 1.05
""")
        cfg = load_config(path)
        assert set(cfg.scenario_presets) == {"paper", "mild"}
        assert cfg.scenario_presets["mild"].aod_multiplier == 1.05

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    def test_bad_toml(self, tmp_path):
        path = write_toml(tmp_path, "[model\nseed = ")
        with pytest.raises(ConfigError):
            load_config(path)


class TestValidation:
    @pytest.mark.parametrize("section,line", [
        ("[split]", "test_fraction = 0.0"),
        ("[split]", "test_fraction = 1.0"),
        ("[model]", 'static_family = "quantum"'),
        ("[model]", "oof_folds = 1"),
        ("[model]", 'stage2_bootstrap = "magic"'),
        ("[model.fusion]", 'encoder_kind = "transformer"'),
        ("[forecast]", "horizon_days = 0"),
        ("[api]", "port = 99999"),
    ])
    def test_rejected_values(self, tmp_path, section, line):
        path = write_toml(tmp_path, f"{section}\n{line}\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_appconfig_direct_validation(self):
        good = load_config()
        import dataclasses
        with pytest.raises(ConfigError):
            dataclasses.replace(good, test_fraction=2.0)
