"""Trace metrics and the regressions used for device characterization.

Covers peak extraction, the slow/ripple (F0 / Fpp) decomposition of pulse-train
responses, log-log power-law fitting, exponential cooling-constant fitting, and
the linear perceived-intensity model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateX,
    EmptyTrace,
    NonPositiveValue,
    NotDecaying,
    TooShort,
)
from .model import Trace


@dataclass(frozen=True)
class PpDecomposition:
    F0: float  # cycle-mean slow component
    Fpp: float  # peak-to-peak ripple over the analyzed cycle
    cycle_index: int


@dataclass(frozen=True)
class FitResult:
    params: dict
    sse: float
    r2: float
    iterations: int
    converged: bool


def peak(trace: Trace, channel: str) -> tuple[float, float]:
    """Global maximum of a channel; ties resolve to the earliest time."""
    series = np.asarray(trace.channels[channel])
    if series.size == 0:
        raise EmptyTrace(channel)
    idx = int(np.argmax(series))
    return idx * trace.dt, float(series[idx])


def pp_decompose(trace: Trace, channel: str, rate_f: float) -> PpDecomposition:
    """Slow / ripple split measured on the last full cycle of the trace.

    The final cycle is used (rather than an average) so the slow component
    has settled as far as the trace allows.
    """
    series = np.asarray(trace.channels[channel])
    period = 1.0 / rate_f
    span = (series.size - 1) * trace.dt
    if span < 10.0 * period:
        raise TooShort(
            f"trace spans {span:.4g} s; need >= 10 cycles ({10 * period:.4g} s)"
        )
    n_cycles = int(math.floor(span / period + 1e-9))
    start = (n_cycles - 1) * period
    i0 = int(round(start / trace.dt))
    i1 = min(int(round((start + period) / trace.dt)) + 1, series.size)
    window = series[i0:i1]
    return PpDecomposition(
        F0=float(window.mean()),
        Fpp=float(window.max() - window.min()),
        cycle_index=n_cycles - 1,
    )


def loglog_fit(points) -> FitResult:
    """OLS on (log10 x, log10 y); params are slope alpha and intercept beta."""
    points = list(points)
    if len(points) < 2:
        raise DegenerateX("need at least two points")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise NonPositiveValue("log-log fit requires strictly positive values")
    lx, ly = np.log10(xs), np.log10(ys)
    if np.ptp(lx) == 0.0:
        raise DegenerateX("all abscissae equal")
    alpha, beta = np.polyfit(lx, ly, 1)
    pred = alpha * lx + beta
    sse = float(np.sum((ly - pred) ** 2))
    sst = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    return FitResult(
        params={"alpha": float(alpha), "beta": float(beta)},
        sse=sse,
        r2=r2,
        iterations=1,
        converged=True,
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def cooling_fit(tail: np.ndarray, dt: float, tau_max: float = 100.0) -> FitResult:
    """Fit A * e^(-t/tau) to a decay tail.

    For each candidate tau the amplitude has a closed-form least-squares
    solution, leaving a 1-D SSE profile in tau that is searched by
    golden-section over [dt, tau_max] (in log-tau, relative tolerance 1e-6).
    """
    y = np.asarray(tail, dtype=float)
    if y.size < 3:
        raise NotDecaying("tail too short")
    t = np.arange(y.size) * dt

    def sse_at(log_tau: float) -> tuple[float, float]:
        e = np.exp(-t / math.exp(log_tau))
        amp = float(np.dot(y, e) / np.dot(e, e))
        return float(np.sum((y - amp * e) ** 2)), amp

    lo, hi = math.log(dt), math.log(tau_max)
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, _ = sse_at(c)
    fd, _ = sse_at(d)
    iters = 2
    while d - c > 1e-6:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc, _ = sse_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd, _ = sse_at(d)
        iters += 1
    log_tau = 0.5 * (a + b)
    sse, amp = sse_at(log_tau)
    tau = math.exp(log_tau)

    edge = 1e-5
    if amp <= 0 or log_tau - lo < edge or hi - log_tau < edge:
        raise NotDecaying(f"no interior optimum (tau={tau:.4g} s, A={amp:.4g})")
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    return FitResult(
        params={"tau": tau, "amplitude": amp},
        sse=sse,
        r2=r2,
        iterations=iters,
        converged=True,
    )


# Coefficients of the linear perceived-intensity regression.  The power unit
# is carried explicitly: with the default alpha, milliwatt inputs produce
# plausible magnitudes while watts do not.
@dataclass(frozen=True)
class PerceptualModel:
    alpha: float = 0.0197
    beta: float = -0.2693
    power_unit: str = "mW"


class ClampedPower(NamedTuple):
    power: float
    clamped: bool


def perceived_intensity(P_L: float, model: PerceptualModel = PerceptualModel()) -> float:
    """Magnitude estimate for a drive power in the model's power unit."""
    return model.alpha * P_L + model.beta


def power_for_intensity(
    intensity: float, model: PerceptualModel = PerceptualModel()
) -> ClampedPower:
    """Algebraic inverse of perceived_intensity, clamped at zero power."""
    power = (intensity - model.beta) / model.alpha
    if power < 0:
        return ClampedPower(0.0, True)
    return ClampedPower(power, False)
