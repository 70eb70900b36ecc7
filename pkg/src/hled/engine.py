"""Fixed-step time integration and the parameter-sweep harness.

The thermal node is advanced with the classical explicit 4th-order one-step
scheme.  Because the right-hand side is linear with piecewise-constant input,
the scheme reduces within each constant-power segment to an affine update
    y <- prop(h) * y + src(h) * u
whose coefficients are the degree-4 truncations of e^z; this is bit-for-bit
the RK4 update and keeps long runs fast and deterministic.

Every pulse start/end is forced onto a step boundary, so piecewise-constant
drive is integrated without smearing, and recorded samples always sit on the
uniform grid dt * record_every.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from . import pneumo, thermal
from .drive import DriveProgram
from .errors import ConfigError, SweepSpecError
from .model import DeviceParams, Trace, validate_device

THREADS_ENV = "HLED_SIM_THREADS"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-5
    t_end: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be > 0")
        if self.t_end < self.dt:
            raise ConfigError("t_end must be >= dt")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")


def _rk4_affine(lam: float, h: float) -> tuple[float, float]:
    """Propagator and source weights of one RK4 step of y' = lam*y + u."""
    z = lam * h
    prop = 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    src = h * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    return prop, src


def _merge_grid(samples: np.ndarray, edges, tol: float):
    """Insert edge times into the sample grid.

    Returns (checkpoints, sample_index) where sample_index[i] is the index of
    the sample recorded at checkpoint i, or -1 for a pure edge checkpoint.
    Edges within tol of a sample snap onto it.
    """
    times = []
    which = []
    edges = sorted(e for e in edges if samples[0] + tol < e < samples[-1] - tol)
    j = 0
    for k, t in enumerate(samples):
        while j < len(edges) and edges[j] < t - tol:
            times.append(edges[j])
            which.append(-1)
            j += 1
        if j < len(edges) and abs(edges[j] - t) <= tol:
            j += 1  # edge coincides with a sample
        times.append(t)
        which.append(k)
    return np.asarray(times), which


def _power_schedule(prog: DriveProgram, checkpoints: np.ndarray) -> np.ndarray:
    """Constant power over each checkpoint interval, from interval midpoints."""
    mids = 0.5 * (checkpoints[:-1] + checkpoints[1:])
    powers = np.zeros_like(mids)
    for p in prog.pulses:
        powers[(mids >= p.t_start) & (mids < p.t_end)] = p.power
    return powers


def _power_samples(prog: DriveProgram, t: np.ndarray, tol: float) -> np.ndarray:
    out = np.zeros_like(t)
    for p in prog.pulses:
        out[(t >= p.t_start - tol) & (t < p.t_end - tol)] = p.power
    return out


def simulate(device: DeviceParams, prog: DriveProgram, cfg: SimConfig) -> Trace:
    """Integrate the device under a drive program; returns a full Trace.

    Deterministic: identical inputs give bit-identical channel arrays.
    """
    validate_device(device)
    if prog.pulses:
        shortest = min(p.duration for p in prog.pulses)
        if cfg.dt > shortest * (1 + 1e-12):
            raise ConfigError(
                f"dt={cfg.dt} exceeds shortest pulse duration {shortest}"
            )

    th = device.thermal
    lam = -1.0 / th.tau
    dt_out = cfg.dt * cfg.record_every
    n_out = int(np.floor(cfg.t_end / dt_out + 1e-9))
    samples = np.arange(n_out + 1) * dt_out
    tol = cfg.dt * 1e-6

    edges = [p.t_start for p in prog.pulses] + [p.t_end for p in prog.pulses]
    checkpoints, which = _merge_grid(samples, edges, tol)
    seg_powers = _power_schedule(prog, checkpoints)

    dT_abs = np.empty(n_out + 1)
    y = 0.0
    if which[0] >= 0:
        dT_abs[which[0]] = y
    inv_C = 1.0 / th.C_abs
    eps = th.epsilon
    for i in range(len(checkpoints) - 1):
        span = checkpoints[i + 1] - checkpoints[i]
        n_sub = max(1, int(np.ceil(span / cfg.dt - 1e-9)))
        prop, src = _rk4_affine(lam, span / n_sub)
        drive = src * eps * seg_powers[i] * inv_C
        for _ in range(n_sub):
            y = prop * y + drive
        k = which[i + 1]
        if k >= 0:
            dT_abs[k] = y

    dT_air = thermal.air_rise_from_abs(dT_abs, th.kappa)
    force = pneumo.force_from_air_rise(dT_air, device.gas, device.geometry)
    pressure = force / device.geometry.aperture_area
    if device.membrane.volume_feedback:
        disp = np.array([pneumo.free_displacement(x, device) for x in dT_air])
    else:
        disp = force / device.membrane.k_eff
    p_opt = _power_samples(prog, samples, tol)

    return Trace(
        dt=dt_out,
        channels={
            "P_opt": p_opt,
            "T_abs": dT_abs,
            "T_air": dT_air,
            "pressure_delta": pressure,
            "force": force,
            "displacement": disp,
        },
    )


@dataclass(frozen=True)
class SweepSpec:
    """Parameter variations over dotted paths into DeviceParams.

    params: ordered (path, values) pairs, e.g. ("thermal.R_abs", [700, 862, 950]).
    mode: "cartesian" (row-major product) or "paired" (zip; equal lengths).
    """

    params: tuple
    mode: str = "cartesian"

    def __post_init__(self):
        object.__setattr__(
            self, "params", tuple((p, tuple(v)) for p, v in self.params)
        )
        if len(self.params) < 1:
            raise SweepSpecError("sweep needs at least one parameter")
        if self.mode not in ("cartesian", "paired"):
            raise SweepSpecError(f"unknown sweep mode {self.mode!r}")
        if self.mode == "paired":
            lengths = {len(v) for _, v in self.params}
            if len(lengths) > 1:
                raise SweepSpecError("paired sweep requires equal-length value lists")


@dataclass(frozen=True)
class Envelope:
    """Pointwise min/max band plus the nominal (base-device) trace."""

    dt: float
    nominal: dict = field(default_factory=dict)
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)


def _set_path(obj, parts: list[str], value: float):
    name = parts[0]
    if not hasattr(obj, name):
        raise SweepSpecError(f"no such field: {'.'.join(parts)}")
    if len(parts) == 1:
        current = getattr(obj, name)
        if isinstance(current, bool) or not isinstance(current, (int, float)):
            raise SweepSpecError(f"path does not resolve to a numeric field: {name}")
        return replace(obj, **{name: value})
    return replace(obj, **{name: _set_path(getattr(obj, name), parts[1:], value)})


def apply_params(base: DeviceParams, assignment: dict) -> DeviceParams:
    device = base
    for path, value in assignment.items():
        device = _set_path(device, path.split("."), value)
    return device


def sweep_members(base: DeviceParams, spec: SweepSpec) -> list[DeviceParams]:
    """Deterministic member order: row-major cartesian product, or zip order."""
    paths = [p for p, _ in spec.params]
    if spec.mode == "cartesian":
        combos = product(*(v for _, v in spec.params))
    else:
        combos = zip(*(v for _, v in spec.params))
    return [apply_params(base, dict(zip(paths, combo))) for combo in combos]


def run_sweep(
    base: DeviceParams, spec: SweepSpec, prog: DriveProgram, cfg: SimConfig
) -> Envelope:
    """Simulate every sweep member; reduce to a pointwise min/max envelope."""
    members = sweep_members(base, spec)
    for m in members:
        validate_device(m)
    nominal = simulate(base, prog, cfg)

    n_threads = int(os.environ.get(THREADS_ENV, "0") or "0")
    if n_threads > 0:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            traces = list(pool.map(lambda d: simulate(d, prog, cfg), members))
    else:
        traces = [simulate(d, prog, cfg) for d in members]

    lower, upper = {}, {}
    for name in nominal.channels:
        stack = np.stack([t.channels[name] for t in traces])
        lower[name] = stack.min(axis=0)
        upper[name] = stack.max(axis=0)
    return Envelope(dt=nominal.dt, nominal=dict(nominal.channels), lower=lower, upper=upper)
