"""Domain types and validation for one actuator pixel.

All temperatures carried by :class:`ThermalState` and :class:`Trace` are rises
above ambient (K); absolute values appear only at output boundaries where T0
is added back.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FractionOutOfRange, NonPositiveField

# Standard lab ambient; configurable per device.
DEFAULT_P0 = 101325.0  # Pa
DEFAULT_T0 = 298.15  # K

# Cylinder-stack estimate of the sealed gas volume (30 uL); only used when
# membrane volume feedback is enabled.
DEFAULT_V0 = 3.0e-8  # m^3


@dataclass(frozen=True)
class GasReference:
    """Ambient gas state sealed into the cavity."""

    P0: float = DEFAULT_P0  # Pa
    T0: float = DEFAULT_T0  # K


@dataclass(frozen=True)
class Geometry:
    """Pixel geometry in SI units (m, m^3)."""

    d_aperture: float = 5.0e-3
    d_absorber: float = 3.3e-3
    t_absorber: float = 17.0e-6
    t_membrane: float = 250.0e-6
    V0: float = DEFAULT_V0

    @property
    def aperture_area(self) -> float:
        return np.pi * (self.d_aperture / 2.0) ** 2


@dataclass(frozen=True)
class ThermalParams:
    """First-order photoabsorber thermal network constants.

    R_abs: absorber-to-environment thermal resistance, K/W
    C_abs: absorber heat capacity, J/K
    kappa: quasi-static air-coupling fraction, [0, 1]
    epsilon: absorbed fraction of incident optical power, (0, 1]
    """

    R_abs: float
    C_abs: float
    kappa: float
    epsilon: float

    @property
    def tau(self) -> float:
        return self.R_abs * self.C_abs


@dataclass(frozen=True)
class MembraneParams:
    """Linear effective stiffness membrane model.

    k_eff relates blocked force to free center displacement.  When
    volume_feedback is set, free-mode displacement accounts for gas expansion
    into the growing spherical-cap volume under the membrane.
    """

    k_eff: float
    volume_feedback: bool = False


@dataclass(frozen=True)
class DeviceParams:
    geometry: Geometry
    gas: GasReference
    thermal: ThermalParams
    membrane: MembraneParams


@dataclass(frozen=True)
class ThermalState:
    """Photoabsorber temperature rise above ambient, K."""

    dT_abs: float = 0.0


CHANNELS = ("P_opt", "T_abs", "T_air", "pressure_delta", "force", "displacement")


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled multi-channel time series.

    Channels (all equal length): P_opt (W), T_abs (K rise), T_air (K rise),
    pressure_delta (Pa), force (N), displacement (m).
    """

    dt: float
    channels: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.dt > 0:
            raise NonPositiveField("dt")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ValueError("trace channels have unequal lengths")

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.channels.values())))

    @property
    def time(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise NonPositiveField(name)


def validate_device(p: DeviceParams) -> None:
    """Raise on the first violated invariant; return None when all hold."""
    g = p.geometry
    for name in ("d_aperture", "d_absorber", "t_absorber", "t_membrane", "V0"):
        _require_positive(name, getattr(g, name))
    _require_positive("P0", p.gas.P0)
    _require_positive("T0", p.gas.T0)
    t = p.thermal
    _require_positive("R_abs", t.R_abs)
    _require_positive("C_abs", t.C_abs)
    if not 0.0 <= t.kappa <= 1.0:
        raise FractionOutOfRange("kappa")
    if not 0.0 < t.epsilon <= 1.0:
        raise FractionOutOfRange("epsilon")
    _require_positive("k_eff", p.membrane.k_eff)
