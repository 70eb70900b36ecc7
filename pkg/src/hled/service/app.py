"""FastAPI service exposing the simulator, sweeps, fitting, and figure data."""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import calibration, engine, figures
from ..drive import power_from_current
from ..errors import HledError, UnknownFigure
from ..model import DeviceParams, Trace
from . import schemas


def _device_or_default(model: schemas.DeviceModel | None) -> DeviceParams:
    return model.to_core() if model is not None else calibration.derive_defaults()


def _listify(channels: dict) -> dict:
    return {name: np.asarray(v).tolist() for name, v in channels.items()}


def _sim_config(sim: schemas.SimSettings, prog, device: DeviceParams) -> engine.SimConfig:
    t_end = sim.t_end
    if t_end is None:
        t_end = prog.t_end + 5.0 * device.thermal.tau
    return engine.SimConfig(dt=sim.dt, t_end=t_end, record_every=sim.record_every)


def create_app() -> FastAPI:
    app = FastAPI(title="hled-sim", version="0.1.0")

    @app.exception_handler(HledError)
    async def _domain_error(_, exc: HledError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/device/defaults", response_model=schemas.DeviceModel)
    def device_defaults():
        return schemas.DeviceModel.from_core(calibration.derive_defaults())

    @app.get("/led/power", response_model=schemas.PowerResponse)
    def led_power(current: float):
        return schemas.PowerResponse(current_a=current, power_w=power_from_current(current))

    @app.post("/simulate", response_model=schemas.TraceResponse)
    def simulate(req: schemas.SimulateRequest):
        device = _device_or_default(req.device)
        prog = req.drive.to_program()
        cfg = _sim_config(req.sim, prog, device)
        trace = engine.simulate(device, prog, cfg)
        return schemas.TraceResponse(
            dt=trace.dt, T0=device.gas.T0, channels=_listify(trace.channels)
        )

    @app.post("/sweep", response_model=schemas.EnvelopeResponse)
    def sweep(req: schemas.SweepRequest):
        device = _device_or_default(req.device)
        prog = req.drive.to_program()
        cfg = _sim_config(req.sim, prog, device)
        spec = engine.SweepSpec(
            params=tuple((p.path, tuple(p.values)) for p in req.sweep.params),
            mode=req.sweep.mode,
        )
        env = engine.run_sweep(device, spec, prog, cfg)
        return schemas.EnvelopeResponse(
            dt=env.dt,
            nominal=_listify(env.nominal),
            lower=_listify(env.lower),
            upper=_listify(env.upper),
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        init = _device_or_default(req.init)
        channels = {"force": np.asarray(req.force)}
        if req.displacement is not None:
            channels["displacement"] = np.asarray(req.displacement)
        measured = Trace(dt=req.dt, channels=channels)
        result = calibration.fit_to_trace(
            measured, req.drive.to_program(), req.free_params, init, budget=req.budget
        )
        return schemas.FitResponse(
            params=result.params,
            sse=result.sse,
            r2=result.r2,
            iterations=result.iterations,
            converged=result.converged,
        )

    @app.get("/figures/{name}", response_model=schemas.FigureResponse)
    def figure(name: str):
        try:
            curves, manifest = figures.generate(name)
        except UnknownFigure as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return schemas.FigureResponse(
            name=name,
            curves={c: _listify(cols) for c, cols in curves.items()},
            manifest=manifest,
        )

    return app
