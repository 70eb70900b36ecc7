"""Default calibrated device and trace-fitting.

The default parameter set is pinned to the measured/simulated anchors for the
reference pixel: epsilon = 0.72, tau = 440 ms, a 315.5 K absorber rise after a
100 ms / 2.5 W pulse, a 60 K peak air rise, and the 440 mN / 0.9 mm
force-displacement pair.  R_abs bridges the reported absorber temperature to
the thermal step response by inverting the closed-form rise at that anchor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from . import engine
from .analysis import FitResult
from .drive import DriveProgram, PeriodicDrive, expand_periodic
from .errors import HledError, NoConvergence
from .model import (
    DeviceParams,
    GasReference,
    Geometry,
    MembraneParams,
    ThermalParams,
    Trace,
)
from .pneumo import SurfaceThermalParams, surface_rise

EPSILON = 0.72
TAU = 0.44  # s

# Anchor pulse: 100 ms at 2.5 W optical.
ANCHOR_T = 0.1
ANCHOR_P = 2.5
ABS_RISE_ANCHOR = 315.5  # K, absorber rise at the anchor pulse end
AIR_RISE_ANCHOR = 60.0  # K, peak cavity-air rise
FORCE_ANCHOR = 0.440  # N, measured peak force
DISP_ANCHOR = 0.9e-3  # m, measured peak free displacement


def derive_defaults() -> DeviceParams:
    """Calibrated default device for the reference pixel."""
    r_abs = ABS_RISE_ANCHOR / (EPSILON * ANCHOR_P * (1.0 - math.exp(-ANCHOR_T / TAU)))
    return DeviceParams(
        geometry=Geometry(),
        gas=GasReference(),
        thermal=ThermalParams(
            R_abs=r_abs,
            C_abs=TAU / r_abs,
            kappa=AIR_RISE_ANCHOR / ABS_RISE_ANCHOR,
            epsilon=EPSILON,
        ),
        membrane=MembraneParams(k_eff=FORCE_ANCHOR / DISP_ANCHOR),
    )


# ---------------------------------------------------------------------------
# Surface-temperature calibration
#
# The exterior-surface anchors: 9.2 K rise after 2.5 s of duty-cycled drive
# without the spreading layer, 0.8 K with it.  G_through sets an arbitrary
# conductance scale; C_surf and G_spread are solved against those anchors
# under the reference drive below.

SURFACE_ANCHOR_NO_PGS = 9.2  # K at 2.5 s
SURFACE_ANCHOR_PGS = 0.8  # K at 2.5 s
SURFACE_G_THROUGH = 5e-4  # W/K

SURFACE_DRIVE = PeriodicDrive(rate_f=50.0, duty=0.2, power=2.5, n_pulses=125)
SURFACE_SIM = engine.SimConfig(dt=1e-4, t_end=2.5, record_every=10)


@dataclass(frozen=True)
class SurfaceCalibration:
    no_pgs: SurfaceThermalParams
    pgs: SurfaceThermalParams


def surface_drive_air_trace(t_end: float = 2.5) -> tuple[np.ndarray, float]:
    """Cavity-air rise under the surface reference drive; returns (series, dt)."""
    n = int(round(SURFACE_DRIVE.rate_f * t_end))
    spec = PeriodicDrive(
        rate_f=SURFACE_DRIVE.rate_f,
        duty=SURFACE_DRIVE.duty,
        power=SURFACE_DRIVE.power,
        n_pulses=n,
    )
    cfg = engine.SimConfig(
        dt=SURFACE_SIM.dt, t_end=t_end, record_every=SURFACE_SIM.record_every
    )
    trace = engine.simulate(derive_defaults(), expand_periodic(spec), cfg)
    return np.asarray(trace.channels["T_air"]), trace.dt


def _bisect(fn, lo: float, hi: float, tol: float, iters: int = 200) -> float:
    f_lo = fn(lo)
    if f_lo * fn(hi) > 0:
        raise NoConvergence("surface calibration bracket failed")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * max(abs(mid), 1.0):
            break
        if fn(mid) * f_lo <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=1)
def derive_surface_defaults() -> SurfaceCalibration:
    """Solve C_surf against the no-spreader anchor, then G_spread for the spreader."""
    air, dt = surface_drive_air_trace(2.5)
    g_t = SURFACE_G_THROUGH

    def end_rise(c_surf: float, g_spread: float) -> float:
        return float(
            surface_rise(air, SurfaceThermalParams(g_t, g_spread, c_surf), dt)[-1]
        )

    # End rise is monotone decreasing in the surface time constant C_surf/G_t.
    log_tau = _bisect(
        lambda lt: end_rise(g_t * math.exp(lt), 0.0) - SURFACE_ANCHOR_NO_PGS,
        math.log(1e-2),
        math.log(1e4),
        1e-12,
    )
    c_surf = g_t * math.exp(log_tau)
    # End rise is monotone decreasing in G_spread.  The upper bracket stays
    # inside the explicit scheme's stability region at the recorded dt.
    log_gsp = _bisect(
        lambda lg: end_rise(c_surf, math.exp(lg)) - SURFACE_ANCHOR_PGS,
        math.log(g_t * 1e-3),
        math.log(g_t * 1e3),
        1e-12,
    )
    return SurfaceCalibration(
        no_pgs=SurfaceThermalParams(g_t, 0.0, c_surf),
        pgs=SurfaceThermalParams(g_t, math.exp(log_gsp), c_surf),
    )


# ---------------------------------------------------------------------------
# Fitting device parameters to measured traces

FIT_PARAM_PATHS = {
    "R_abs": "thermal.R_abs",
    "C_abs": "thermal.C_abs",
    "kappa": "thermal.kappa",
    "k_eff": "membrane.k_eff",
}

# Channels that can contribute to the fit objective, in fixed order.
_FIT_CHANNELS = ("force", "displacement")


def fit_to_trace(
    measured: Trace,
    drive: DriveProgram,
    free_params,
    init: DeviceParams,
    budget: int = 2000,
    record: list | None = None,
) -> FitResult:
    """Fit the named device parameters to a measured trace.

    Direct-search simplex over log-parameters (all are positive), minimizing
    the normalized SSE between simulated and measured channels.  The force
    channel is required; a displacement channel, when present, also
    contributes (it is the only observation that constrains k_eff).
    """
    free_params = list(free_params)
    if not free_params:
        raise HledError("at least one free parameter is required")
    for name in free_params:
        if name not in FIT_PARAM_PATHS:
            raise HledError(f"unknown fit parameter {name!r}")
    if "force" not in measured.channels:
        raise HledError("measured trace must contain a force channel")

    channels = [c for c in _FIT_CHANNELS if c in measured.channels]
    targets = {c: np.asarray(measured.channels[c], dtype=float) for c in channels}
    scales = {c: max(float(np.max(np.abs(v))), 1e-30) for c, v in targets.items()}
    n = measured.n_samples
    cfg = engine.SimConfig(
        dt=measured.dt, t_end=(n - 1) * measured.dt, record_every=1
    )

    paths = [FIT_PARAM_PATHS[p] for p in free_params]
    x0 = np.log(
        [_get_path(init, path) for path in paths]
    )

    def objective(x: np.ndarray) -> float:
        values = np.exp(x)
        if record is not None:
            record.append(dict(zip(free_params, values)))
        device = engine.apply_params(init, dict(zip(paths, values)))
        sim = engine.simulate(device, drive, cfg)
        total = 0.0
        for c in channels:
            resid = (np.asarray(sim.channels[c])[:n] - targets[c]) / scales[c]
            total += float(np.dot(resid, resid))
        return total

    result = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": budget,
            "maxiter": budget,
            "xatol": 1e-10,
            "fatol": 1e-18,
        },
    )
    best = dict(zip(free_params, np.exp(result.x)))

    # Raw force-channel statistics at the optimum, for reporting.
    device = engine.apply_params(init, dict(zip(paths, np.exp(result.x))))
    sim = engine.simulate(device, drive, cfg)
    f_sim = np.asarray(sim.channels["force"])[:n]
    f_meas = targets["force"]
    sse = float(np.sum((f_sim - f_meas) ** 2))
    sst = float(np.sum((f_meas - f_meas.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    return FitResult(
        params=best,
        sse=sse,
        r2=r2,
        iterations=int(result.nfev),
        converged=bool(result.success),
    )


def _get_path(device: DeviceParams, path: str) -> float:
    obj = device
    for part in path.split("."):
        obj = getattr(obj, part)
    return float(obj)
