import datetime as dt
import math

import numpy as np
import pytest

from dustcast import physics


class TestEfficiencyLoss:
    def test_no_shortfall_is_zero(self):
        assert physics.efficiency_loss_pct(1000.0, 1000.0) == 0.0

    def test_half_power(self):
        assert physics.efficiency_loss_pct(1000.0, 500.0) == pytest.approx(50.0)

    def test_total_loss(self):
        assert physics.efficiency_loss_pct(800.0, 0.0) == pytest.approx(100.0)

    def test_rejects_nonpositive_clear_sky(self):
        with pytest.raises(ValueError):
            physics.efficiency_loss_pct(0.0, 100.0)

    def test_rejects_negative_actual(self):
        with pytest.raises(ValueError):
            physics.efficiency_loss_pct(1000.0, -1.0)


class TestAttenuation:
    def test_clean_sky_identity(self):
        assert physics.attenuate_irradiance(950.0, 0.0, 1.3) == pytest.approx(950.0)

    def test_known_value(self):
        expected = 1000.0 * math.exp(-0.5 * 1.2)
        assert physics.attenuate_irradiance(1000.0, 0.5, 1.2) == pytest.approx(expected)

    def test_monotone_decrease_in_aod_and_air_mass(self):
        rng = np.random.default_rng(42)
        aods = np.sort(rng.uniform(0.01, 3.0, 40))
        masses = np.sort(rng.uniform(1.0, 2.5, 40))
        for m in masses[::8]:
            values = [physics.attenuate_irradiance(1000.0, a, m) for a in aods]
            assert all(x > y for x, y in zip(values, values[1:]))
        for a in aods[::8]:
            values = [physics.attenuate_irradiance(1000.0, a, m) for m in masses]
            assert all(x > y for x, y in zip(values, values[1:]))

    def test_rejects_air_mass_below_one(self):
        with pytest.raises(ValueError):
            physics.attenuate_irradiance(1000.0, 0.1, 0.99)

    def test_composes_with_loss(self):
        # attenuating then measuring loss collapses to 100*(1 - e^{-a*m})
        for aod, m in [(0.1, 1.0), (0.7, 1.4), (2.5, 2.0)]:
            actual = physics.attenuate_irradiance(1000.0, aod, m)
            loss = physics.efficiency_loss_pct(1000.0, actual)
            assert loss == pytest.approx(100.0 * (1 - math.exp(-aod * m)), abs=1e-9)


class TestAirMassAndGeometry:
    def test_overhead_sun(self):
        assert physics.air_mass_coefficient(0.0) == pytest.approx(1.0)

    def test_sixty_degrees_doubles_path(self):
        assert physics.air_mass_coefficient(60.0) == pytest.approx(2.0)

    def test_rejects_horizon(self):
        with pytest.raises(ValueError):
            physics.air_mass_coefficient(90.0)

    def test_declination_bounds(self):
        decl = [physics.solar_declination_deg(d) for d in range(1, 366)]
        assert max(decl) <= 23.45 + 1e-9
        assert min(decl) >= -23.45 - 1e-9

    def test_zenith_at_equinoxish_latitude(self):
        # day 81 has declination near zero, so zenith ~ |latitude|
        z = physics.solar_noon_zenith_deg(24.0, 81)
        assert z == pytest.approx(24.0, abs=0.5)

    def test_daily_air_mass_uses_noon_zenith(self):
        day = dt.date(2021, 3, 22)
        z = physics.solar_noon_zenith_deg(24.0, day.timetuple().tm_yday)
        assert physics.daily_air_mass(24.0, day) == pytest.approx(
            physics.air_mass_coefficient(z)
        )


class TestPlantEfficiencies:
    def test_thermal_unit_conversion(self):
        # 0.02 kg/s * 2257 kJ/kg * 1000 J/kJ over 100 m2 * 800 W/m2
        spec = physics.ThermalPlantSpec(mass_flow_kg_s=0.02,
                                        latent_heat_kj_kg=2257.0,
                                        collector_area_m2=100.0)
        eff = physics.thermal_efficiency(spec, 800.0)
        assert eff == pytest.approx(0.02 * 2257.0 * 1000.0 / (100.0 * 800.0))

    def test_thermal_rejects_zero_irradiance(self):
        spec = physics.ThermalPlantSpec(0.02, 2257.0, 100.0)
        with pytest.raises(ValueError):
            physics.thermal_efficiency(spec, 0.0)

    def test_pv_reference_point(self):
        spec = physics.PvSpec(eta_ref=0.2, alpha_per_w_m2=-0.0004, i_ref=1000.0)
        value, clamped = physics.pv_efficiency(spec, 1000.0)
        assert value == pytest.approx(0.2)
        assert not clamped

    def test_pv_clamps_and_flags(self):
        spec = physics.PvSpec(eta_ref=0.2, alpha_per_w_m2=0.01, i_ref=100.0)
        value, clamped = physics.pv_efficiency(spec, 10_000.0)
        assert value == 1.0
        assert clamped

    def test_solar_efficiency_is_complement(self):
        assert physics.solar_efficiency_pct(35.0) == pytest.approx(65.0)
        with pytest.raises(ValueError):
            physics.solar_efficiency_pct(101.0)


class TestSampleValidation:
    def test_valid_sample(self):
        s = physics.IrradianceSample(1000.0, 700.0, 0.4, 1.2, 30.0)
        assert s.aod == 0.4

    @pytest.mark.parametrize("kwargs", [
        {"aod": -0.1},
        {"zenith_deg": 95.0},
        {"air_mass": 0.5},
    ])
    def test_invalid_sample(self, kwargs):
        base = dict(irradiance_clear_sky=1000.0, irradiance_actual=700.0,
                    aod=0.4, air_mass=1.2, zenith_deg=30.0)
        base.update(kwargs)
        with pytest.raises(ValueError):
            physics.IrradianceSample(**base)
