"""Gas-side outputs: pressure, blocked force, free displacement, surface heating.

Pressure is quasi-static (acoustic equilibration is far below all drive
timescales), so force follows the ideal gas law directly:

    F = P0 * A * dT_air / T0,    A = pi (d/2)^2  (d = aperture diameter)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NonPhysicalTemperature
from .model import DeviceParams, GasReference, Geometry


@dataclass(frozen=True)
class MechanicalOutput:
    pressure_delta: float  # Pa
    force: float  # N, blocked / isometric
    displacement: float  # m, free membrane center


@dataclass(frozen=True)
class SurfaceThermalParams:
    """One-node exterior surface model.

    G_through: through-membrane conductance from cavity air, W/K
    G_spread: extra lateral conductance added by the spreading layer, W/K
    C_surf: effective surface heat capacity, J/K
    """

    G_through: float
    G_spread: float
    C_surf: float

    def __post_init__(self):
        if self.G_through < 0 or self.G_spread < 0 or self.C_surf < 0:
            raise ValueError("surface thermal parameters must be >= 0")


def force_from_air_rise(dT_air, gas: GasReference, geom: Geometry):
    """Blocked force from cavity-air rise.  Accepts scalars or arrays."""
    if np.any(np.asarray(dT_air) <= -gas.T0):
        raise NonPhysicalTemperature(float(np.min(dT_air)), gas.T0)
    return gas.P0 * geom.aperture_area * dT_air / gas.T0


def air_rise_from_force(force, gas: GasReference, geom: Geometry):
    """Exact inverse of force_from_air_rise."""
    return force * gas.T0 / (gas.P0 * geom.aperture_area)


def _cap_volume(z, radius):
    """Spherical-cap volume of a membrane bulged to center height z."""
    return (np.pi * z / 6.0) * (3.0 * radius**2 + z**2)


def free_displacement(dT_air: float, device: DeviceParams) -> float:
    """Free membrane center displacement at quasi-static equilibrium.

    Without volume feedback: z = F/k_eff with F the blocked force.  With
    feedback: the heated gas occupies V0 + cap(z) and its gauge pressure must
    equal the membrane restoring pressure k_eff*z/A; solved by bisection.
    """
    if dT_air < 0:
        raise NonPhysicalTemperature(dT_air, device.gas.T0)
    gas, geom, mem = device.gas, device.geometry, device.membrane
    area = geom.aperture_area
    if not mem.volume_feedback:
        return force_from_air_rise(dT_air, gas, geom) / mem.k_eff
    if dT_air == 0.0:
        return 0.0

    radius = geom.d_aperture / 2.0
    temp_ratio = (gas.T0 + dT_air) / gas.T0

    def residual(z):
        gauge = gas.P0 * (temp_ratio * geom.V0 / (geom.V0 + _cap_volume(z, radius)) - 1.0)
        return gauge - mem.k_eff * z / area

    lo, hi = 0.0, geom.d_aperture
    if residual(lo) < 0 or residual(hi) > 0:
        raise NoConvergence("free-displacement bisection bracket failed")
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def surface_rise(trace_airT: np.ndarray, params: SurfaceThermalParams, dt: float) -> np.ndarray:
    """Integrate C_surf * dT_s' = G_through*(dT_air - dT_s) - G_spread*dT_s.

    Same fixed-step 4th-order one-step scheme as the engine; the driving air
    series is held constant over each step.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    air = np.asarray(trace_airT, dtype=float)
    out = np.zeros_like(air)
    if params.C_surf == 0.0:
        # Massless surface: instantaneous conductance divider.
        total = params.G_through + params.G_spread
        if total > 0:
            out[:] = air * params.G_through / total
        return out
    lam = -(params.G_through + params.G_spread) / params.C_surf
    z = lam * dt
    prop = 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    src = dt * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    gain = params.G_through / params.C_surf
    y = 0.0
    for i in range(1, len(air)):
        y = prop * y + src * gain * air[i - 1]
        out[i] = y
    return out
