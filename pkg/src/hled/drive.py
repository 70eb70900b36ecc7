"""Optical drive programs: pulse schedules and the LED current-to-power map."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CurrentOutOfRange,
    DriveProgramError,
    NonPositiveField,
    TimeOutOfRange,
)

# One (I, P_L) anchor: 2400 mA drive emits about 2.5 W optical.
DEFAULT_SLOPE_W_PER_A = 2.5 / 2.4
DEFAULT_I_MAX = 2.4  # A


@dataclass(frozen=True)
class Pulse:
    """One constant-power optical pulse; interval [t_start, t_start+duration)."""

    t_start: float
    duration: float
    power: float

    def __post_init__(self):
        if self.t_start < 0:
            raise NonPositiveField("t_start")
        if not self.duration > 0:
            raise NonPositiveField("duration")
        if self.power < 0:
            raise NonPositiveField("power")

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration


@dataclass(frozen=True)
class PeriodicDrive:
    """Periodic pulse train: rate_f (Hz), duty in (0,1), power (W), n_pulses."""

    rate_f: float
    duty: float
    power: float
    n_pulses: int

    def __post_init__(self):
        if not self.rate_f > 0:
            raise NonPositiveField("rate_f")
        if not 0.0 < self.duty < 1.0:
            raise DriveProgramError("duty must lie strictly inside (0, 1)")
        if self.power < 0:
            raise NonPositiveField("power")
        if self.n_pulses < 1:
            raise DriveProgramError("n_pulses must be >= 1")

    @property
    def t_pulse(self) -> float:
        return self.duty / self.rate_f

    @property
    def period(self) -> float:
        return 1.0 / self.rate_f


@dataclass(frozen=True)
class DriveProgram:
    """Ordered, non-overlapping pulses covering [0, t_end]."""

    pulses: tuple = field(default_factory=tuple)
    t_end: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        prev_end = 0.0
        for i, p in enumerate(self.pulses):
            if p.t_start < prev_end - 1e-15:
                raise DriveProgramError(
                    f"pulse {i} overlaps or precedes its predecessor"
                )
            prev_end = p.t_end
        if self.pulses and prev_end > self.t_end * (1 + 1e-12):
            raise DriveProgramError("last pulse extends past t_end")


def expand_periodic(spec: PeriodicDrive) -> DriveProgram:
    """Lay out n_pulses equally spaced pulses; pulse k starts at k/rate_f."""
    width = spec.t_pulse
    pulses = tuple(
        Pulse(t_start=k / spec.rate_f, duration=width, power=spec.power)
        for k in range(spec.n_pulses)
    )
    return DriveProgram(pulses=pulses, t_end=spec.n_pulses / spec.rate_f)


@dataclass(frozen=True)
class LedModel:
    """Electro-optical map from drive current to emitted power.

    Linear through the origin by default; an optional piecewise-linear
    (current, power) table overrides the linear map.
    """

    slope_w_per_a: float = DEFAULT_SLOPE_W_PER_A
    i_max: float = DEFAULT_I_MAX
    table: tuple | None = None  # ((I0, P0), (I1, P1), ...) ascending in I


def power_from_current(current: float, led: LedModel = LedModel()) -> float:
    if current < 0 or current > led.i_max:
        raise CurrentOutOfRange(current, led.i_max)
    if led.table is not None:
        amps = [p[0] for p in led.table]
        watts = [p[1] for p in led.table]
        return float(np.interp(current, amps, watts))
    return led.slope_w_per_a * current


def absorbed_power(P_L: float, epsilon: float) -> float:
    """Optical power converted to heat in the photoabsorber."""
    if P_L < 0:
        raise NonPositiveField("P_L")
    return epsilon * P_L


def power_at(prog: DriveProgram, t: float) -> float:
    """Instantaneous power at t; pulse intervals are half-open."""
    if t < 0 or t > prog.t_end:
        raise TimeOutOfRange(t, prog.t_end)
    for p in prog.pulses:
        if p.t_start <= t < p.t_end:
            return p.power
        if p.t_start > t:
            break
    return 0.0


def per_pulse_energy(spec: PeriodicDrive, epsilon: float) -> float:
    """Absorbed energy per pulse: epsilon * P * duty / f."""
    return epsilon * spec.power * spec.duty / spec.rate_f
