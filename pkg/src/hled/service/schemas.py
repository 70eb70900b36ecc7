"""Pydantic request/response models for the HTTP service.

Every model forbids unknown keys, so misspelled physics constants are
rejected at the boundary instead of silently ignored.
"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, model_validator

from .. import model as core
from ..drive import DriveProgram, PeriodicDrive, Pulse, expand_periodic


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryModel(Strict):
    d_aperture: float
    d_absorber: float
    t_absorber: float
    t_membrane: float
    V0: float


class GasModel(Strict):
    P0: float
    T0: float


class ThermalModel(Strict):
    R_abs: float
    C_abs: float
    kappa: float
    epsilon: float


class MembraneModel(Strict):
    k_eff: float
    volume_feedback: bool = False


class DeviceModel(Strict):
    geometry: GeometryModel
    gas: GasModel
    thermal: ThermalModel
    membrane: MembraneModel

    def to_core(self) -> core.DeviceParams:
        return core.DeviceParams(
            geometry=core.Geometry(**self.geometry.model_dump()),
            gas=core.GasReference(**self.gas.model_dump()),
            thermal=core.ThermalParams(**self.thermal.model_dump()),
            membrane=core.MembraneParams(**self.membrane.model_dump()),
        )

    @classmethod
    def from_core(cls, device: core.DeviceParams) -> "DeviceModel":
        g, gas, th, mem = device.geometry, device.gas, device.thermal, device.membrane
        return cls(
            geometry=GeometryModel(
                d_aperture=g.d_aperture,
                d_absorber=g.d_absorber,
                t_absorber=g.t_absorber,
                t_membrane=g.t_membrane,
                V0=g.V0,
            ),
            gas=GasModel(P0=gas.P0, T0=gas.T0),
            thermal=ThermalModel(
                R_abs=th.R_abs, C_abs=th.C_abs, kappa=th.kappa, epsilon=th.epsilon
            ),
            membrane=MembraneModel(
                k_eff=mem.k_eff, volume_feedback=mem.volume_feedback
            ),
        )


class PulseModel(Strict):
    t_start: float
    duration: float
    power: float


class PeriodicModel(Strict):
    rate_f: float
    duty: float
    power: float
    n_pulses: int


class DriveModel(Strict):
    """Exactly one of pulses / periodic."""

    pulses: list[PulseModel] | None = None
    periodic: PeriodicModel | None = None
    t_end: float | None = None

    @model_validator(mode="after")
    def _one_of(self):
        if (self.pulses is None) == (self.periodic is None):
            raise ValueError("provide exactly one of 'pulses' or 'periodic'")
        return self

    def to_program(self) -> DriveProgram:
        if self.periodic is not None:
            prog = expand_periodic(PeriodicDrive(**self.periodic.model_dump()))
            if self.t_end is not None and self.t_end > prog.t_end:
                prog = DriveProgram(pulses=prog.pulses, t_end=self.t_end)
            return prog
        pulses = tuple(Pulse(**p.model_dump()) for p in self.pulses)
        t_end = self.t_end if self.t_end is not None else max(p.t_end for p in pulses)
        return DriveProgram(pulses=pulses, t_end=t_end)


class SimSettings(Strict):
    dt: float = 1e-5
    t_end: float | None = None  # default: drive end + 5 thermal time constants
    record_every: int = 1


class SimulateRequest(Strict):
    device: DeviceModel | None = None
    drive: DriveModel
    sim: SimSettings = SimSettings()


class TraceResponse(Strict):
    dt: float
    T0: float
    channels: dict[str, list[float]]


class SweepParamModel(Strict):
    path: str
    values: list[float]


class SweepModel(Strict):
    params: list[SweepParamModel]
    mode: str = "cartesian"


class SweepRequest(Strict):
    device: DeviceModel | None = None
    drive: DriveModel
    sim: SimSettings = SimSettings()
    sweep: SweepModel


class EnvelopeResponse(Strict):
    dt: float
    nominal: dict[str, list[float]]
    lower: dict[str, list[float]]
    upper: dict[str, list[float]]


class FitRequest(Strict):
    dt: float
    force: list[float]
    displacement: list[float] | None = None
    drive: DriveModel
    free_params: list[str]
    init: DeviceModel | None = None
    budget: int = 2000


class FitResponse(Strict):
    params: dict[str, float]
    sse: float
    r2: float
    iterations: int
    converged: bool


class FigureResponse(Strict):
    name: str
    curves: dict[str, dict[str, list[float]]]
    manifest: list[dict]


class PowerResponse(Strict):
    current_a: float
    power_w: float
