import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hled.errors import NonPhysicalTemperature
from hled.model import GasReference, Geometry
from hled.pneumo import (
    SurfaceThermalParams,
    air_rise_from_force,
    force_from_air_rise,
    free_displacement,
    surface_rise,
)

GAS = GasReference()
GEOM = Geometry()


class TestForceFromAirRise:
    def test_anchor_60K(self):
        # Hand value: 101325 * pi * 0.0025^2 * 60 / 298.15 = 0.40037 N
        assert force_from_air_rise(60.0, GAS, GEOM) == pytest.approx(0.400373, rel=1e-4)

    def test_zero(self):
        assert force_from_air_rise(0.0, GAS, GEOM) == 0.0

    def test_linearity(self):
        assert force_from_air_rise(120.0, GAS, GEOM) == pytest.approx(
            2 * force_from_air_rise(60.0, GAS, GEOM), rel=1e-12
        )

    def test_nonphysical_temperature(self):
        with pytest.raises(NonPhysicalTemperature):
            force_from_air_rise(-GAS.T0, GAS, GEOM)

    def test_scaling_in_p0_and_diameter(self):
        base = force_from_air_rise(50.0, GAS, GEOM)
        doubled_p = force_from_air_rise(50.0, GasReference(P0=2 * GAS.P0), GEOM)
        assert doubled_p == pytest.approx(2 * base, rel=1e-12)
        doubled_d = force_from_air_rise(
            50.0, GAS, replace(GEOM, d_aperture=2 * GEOM.d_aperture)
        )
        assert doubled_d == pytest.approx(4 * base, rel=1e-12)


class TestInversePair:
    def test_anchor_inverse(self):
        assert air_rise_from_force(0.400373, GAS, GEOM) == pytest.approx(60.0, rel=1e-4)

    def test_zero(self):
        assert air_rise_from_force(0.0, GAS, GEOM) == 0.0

    @pytest.mark.parametrize("rise", [1.0, 10.0, 100.0])
    def test_round_trip_examples(self, rise):
        back = air_rise_from_force(force_from_air_rise(rise, GAS, GEOM), GAS, GEOM)
        assert back == pytest.approx(rise, rel=1e-12)

    @given(rise=st.floats(min_value=1e-6, max_value=1e3))
    def test_round_trip_property(self, rise):
        back = air_rise_from_force(force_from_air_rise(rise, GAS, GEOM), GAS, GEOM)
        assert back == pytest.approx(rise, rel=1e-12)


class TestFreeDisplacement:
    def test_anchor(self, device):
        z = free_displacement(60.0, device)
        assert z == pytest.approx(0.819e-3, rel=1e-2)
        assert z == pytest.approx(0.8189e-3, rel=1e-3)

    def test_zero(self, device):
        assert free_displacement(0.0, device) == 0.0

    def test_feedback_large_volume_limit(self, device):
        fb = replace(
            device,
            geometry=replace(device.geometry, V0=1.0),  # effectively infinite
            membrane=replace(device.membrane, volume_feedback=True),
        )
        z_fb = free_displacement(60.0, fb)
        z_off = free_displacement(60.0, device)
        assert z_fb == pytest.approx(z_off, rel=1e-6)

    def test_feedback_reduces_displacement(self, device):
        fb = replace(device, membrane=replace(device.membrane, volume_feedback=True))
        assert free_displacement(60.0, fb) < free_displacement(60.0, device)

    def test_monotone_in_air_rise(self, device):
        fb = replace(device, membrane=replace(device.membrane, volume_feedback=True))
        rises = np.linspace(0.0, 120.0, 25)
        zs = [free_displacement(r, fb) for r in rises]
        assert np.all(np.diff(zs) >= 0)


class TestSurfaceRise:
    def test_equilibrium_without_spreading(self):
        params = SurfaceThermalParams(G_through=1e-3, G_spread=0.0, C_surf=1e-3)
        air = np.full(20000, 5.0)
        out = surface_rise(air, params, dt=0.01)
        assert out[-1] == pytest.approx(5.0, rel=1e-6)

    def test_conductance_divider(self):
        # Steady value is G_through / (G_through + G_spread) of the air rise.
        g = 1e-3
        params = SurfaceThermalParams(G_through=g, G_spread=9 * g, C_surf=1e-3)
        air = np.full(20000, 10.0)
        out = surface_rise(air, params, dt=0.01)
        assert out[-1] == pytest.approx(1.0, rel=1e-6)

    def test_spreading_always_reduces_steady_rise(self):
        air = np.abs(np.sin(np.linspace(0, 20, 5000))) + 0.5
        base = SurfaceThermalParams(G_through=1e-3, G_spread=0.0, C_surf=5e-3)
        spread = SurfaceThermalParams(G_through=1e-3, G_spread=2e-3, C_surf=5e-3)
        a = surface_rise(air, base, dt=0.01)
        b = surface_rise(air, spread, dt=0.01)
        assert b[-1] < a[-1]
        assert np.all(b[1:] <= a[1:] + 1e-15)

    def test_massless_surface_is_instant_divider(self):
        params = SurfaceThermalParams(G_through=1e-3, G_spread=3e-3, C_surf=0.0)
        air = np.array([0.0, 4.0, 8.0])
        out = surface_rise(air, params, dt=0.1)
        assert np.allclose(out, air * 0.25)

    def test_starts_from_ambient(self):
        params = SurfaceThermalParams(G_through=1e-3, G_spread=0.0, C_surf=1e-2)
        out = surface_rise(np.full(10, 3.0), params, dt=0.01)
        assert out[0] == 0.0
