import os
from dataclasses import replace

import numpy as np
import pytest

from hled import engine
from hled.drive import DriveProgram, PeriodicDrive, Pulse, expand_periodic
from hled.errors import ConfigError, SweepSpecError
from hled.thermal import t_abs_step


def single_pulse(duration=0.1, power=2.5, t_end=0.5):
    return DriveProgram(pulses=(Pulse(0.0, duration, power),), t_end=t_end)


class TestSimulate:
    def test_zero_power_is_identically_zero(self, device):
        prog = single_pulse(power=0.0)
        cfg = engine.SimConfig(dt=1e-4, t_end=0.5)
        trace = engine.simulate(device, prog, cfg)
        for name, series in trace.channels.items():
            assert np.all(series == 0.0), name

    def test_matches_closed_form_during_pulse(self, device):
        cfg = engine.SimConfig(dt=1e-5, t_end=0.3)
        trace = engine.simulate(device, single_pulse(t_end=0.3), cfg)
        t = trace.time
        on = t <= 0.1
        expected = np.array([t_abs_step(x, 2.5, device.thermal) for x in t[on]])
        assert np.max(np.abs(trace.channels["T_abs"][on] - expected)) < 1e-6 * expected.max()

    def test_matches_closed_form_during_decay(self, device):
        cfg = engine.SimConfig(dt=1e-5, t_end=0.5)
        trace = engine.simulate(device, single_pulse(), cfg)
        t = trace.time
        peak = t_abs_step(0.1, 2.5, device.thermal)
        off = t >= 0.1
        expected = peak * np.exp(-(t[off] - 0.1) / device.thermal.tau)
        rel = np.abs(trace.channels["T_abs"][off] - expected) / peak
        assert rel.max() < 1e-6

    def test_halving_dt_is_converged(self, device):
        prog = single_pulse(t_end=0.2)
        f1 = engine.simulate(device, prog, engine.SimConfig(dt=2e-5, t_end=0.2)).channels["force"]
        f2 = engine.simulate(device, prog, engine.SimConfig(dt=1e-5, t_end=0.2)).channels["force"][::2]
        peak1, peak2 = f1.max(), f2.max()
        assert abs(peak1 - peak2) / peak2 < 1e-8

    def test_determinism_bit_identical(self, device):
        prog = expand_periodic(PeriodicDrive(rate_f=20.0, duty=0.3, power=2.0, n_pulses=5))
        cfg = engine.SimConfig(dt=1e-5, t_end=prog.t_end)
        a = engine.simulate(device, prog, cfg)
        b = engine.simulate(device, prog, cfg)
        for name in a.channels:
            assert a.channels[name].tobytes() == b.channels[name].tobytes()

    def test_dt_larger_than_pulse_rejected(self, device):
        prog = single_pulse(duration=1e-3)
        with pytest.raises(ConfigError):
            engine.simulate(device, prog, engine.SimConfig(dt=2e-3, t_end=0.5))

    def test_energy_bookkeeping(self, device):
        # First law on the absorber node: absorbed energy equals stored heat
        # plus the energy conducted away, via trapezoidal quadrature.
        cfg = engine.SimConfig(dt=1e-5, t_end=0.5)
        trace = engine.simulate(device, single_pulse(), cfg)
        th = device.thermal
        absorbed = th.epsilon * 2.5 * 0.1
        dT = trace.channels["T_abs"]
        stored = th.C_abs * dT[-1]
        conducted = np.trapezoid(dT / th.R_abs, dx=trace.dt)
        assert abs(absorbed - (stored + conducted)) / absorbed < 1e-6

    def test_superposition_of_nonoverlapping_pulses(self, device):
        cfg = engine.SimConfig(dt=1e-5, t_end=0.6)
        p1 = DriveProgram(pulses=(Pulse(0.0, 0.05, 2.0),), t_end=0.6)
        p2 = DriveProgram(pulses=(Pulse(0.2, 0.05, 1.5),), t_end=0.6)
        both = DriveProgram(pulses=(Pulse(0.0, 0.05, 2.0), Pulse(0.2, 0.05, 1.5)), t_end=0.6)
        a = engine.simulate(device, p1, cfg).channels["T_abs"]
        b = engine.simulate(device, p2, cfg).channels["T_abs"]
        c = engine.simulate(device, both, cfg).channels["T_abs"]
        assert np.max(np.abs(a + b - c)) < 1e-9 * c.max()

    def test_pulse_train_bias_rises_during_transient(self, device):
        # Period < tau: residual heat biases later cycles upward.
        f = 20.0
        prog = expand_periodic(PeriodicDrive(rate_f=f, duty=0.3, power=2.5, n_pulses=8))
        cfg = engine.SimConfig(dt=1e-5, t_end=prog.t_end)
        force = engine.simulate(device, prog, cfg).channels["force"]
        per = int(round(1.0 / f / cfg.dt))
        means = [force[k * per:(k + 1) * per].mean() for k in range(8)]
        assert np.all(np.diff(means) > 0)

    def test_edge_alignment_off_grid(self, device):
        # A pulse edge that is not a multiple of dt must still be integrated
        # without smearing: compare against the closed form at the samples.
        prog = DriveProgram(pulses=(Pulse(0.0, 0.0503e0, 2.5),), t_end=0.2)
        cfg = engine.SimConfig(dt=1e-4, t_end=0.2)
        trace = engine.simulate(device, prog, cfg)
        peak_expected = t_abs_step(0.0503, 2.5, device.thermal)
        t = trace.time
        after = t >= 0.0503
        expected = peak_expected * np.exp(-(t[after] - 0.0503) / device.thermal.tau)
        assert np.max(np.abs(trace.channels["T_abs"][after] - expected)) < 1e-6 * peak_expected

    def test_record_every_decimates(self, device):
        cfg1 = engine.SimConfig(dt=1e-4, t_end=0.2, record_every=1)
        cfg5 = engine.SimConfig(dt=1e-4, t_end=0.2, record_every=5)
        a = engine.simulate(device, single_pulse(t_end=0.2), cfg1)
        b = engine.simulate(device, single_pulse(t_end=0.2), cfg5)
        assert b.dt == pytest.approx(5e-4)
        assert np.allclose(a.channels["T_abs"][::5], b.channels["T_abs"], rtol=1e-12)

    def test_volume_feedback_displacement_channel(self, device):
        fb = replace(device, membrane=replace(device.membrane, volume_feedback=True))
        cfg = engine.SimConfig(dt=1e-4, t_end=0.2, record_every=10)
        trace = engine.simulate(fb, single_pulse(t_end=0.2), cfg)
        plain = engine.simulate(device, single_pulse(t_end=0.2), cfg)
        assert trace.channels["displacement"].max() < plain.channels["displacement"].max()


class TestSweep:
    cfg = engine.SimConfig(dt=1e-4, t_end=0.2, record_every=10)
    prog = single_pulse(t_end=0.2)

    def test_single_member_equal_to_base(self, device):
        spec = engine.SweepSpec(params=(("thermal.R_abs", [device.thermal.R_abs]),))
        env = engine.run_sweep(device, spec, self.prog, self.cfg)
        for name in env.nominal:
            assert np.array_equal(env.lower[name], env.nominal[name])
            assert np.array_equal(env.upper[name], env.nominal[name])

    def test_envelope_max_tracks_monotone_parameter(self, device):
        r = device.thermal.R_abs
        spec = engine.SweepSpec(params=(("thermal.R_abs", [0.9 * r, r, 1.1 * r]),))
        env = engine.run_sweep(device, spec, self.prog, self.cfg)
        # Oracle: three independent simulations compared pointwise.
        high = engine.simulate(
            engine.apply_params(device, {"thermal.R_abs": 1.1 * r}), self.prog, self.cfg
        )
        low = engine.simulate(
            engine.apply_params(device, {"thermal.R_abs": 0.9 * r}), self.prog, self.cfg
        )
        assert np.array_equal(env.upper["force"], high.channels["force"])
        assert np.array_equal(env.lower["force"], low.channels["force"])

    def test_off_nominal_single_value(self, device):
        r = device.thermal.R_abs
        spec = engine.SweepSpec(params=(("thermal.R_abs", [1.2 * r]),))
        env = engine.run_sweep(device, spec, self.prog, self.cfg)
        nominal = engine.simulate(device, self.prog, self.cfg)
        member = engine.simulate(
            engine.apply_params(device, {"thermal.R_abs": 1.2 * r}), self.prog, self.cfg
        )
        assert np.array_equal(env.nominal["force"], nominal.channels["force"])
        assert np.array_equal(env.upper["force"], member.channels["force"])

    def test_cartesian_member_count_and_order(self, device):
        r, c = device.thermal.R_abs, device.thermal.C_abs
        spec = engine.SweepSpec(
            params=(("thermal.R_abs", [r, 1.1 * r]), ("thermal.C_abs", [c, 1.1 * c]))
        )
        members = engine.sweep_members(device, spec)
        assert len(members) == 4
        assert members[0].thermal.R_abs == r and members[0].thermal.C_abs == c
        assert members[1].thermal.C_abs == pytest.approx(1.1 * c)  # row-major
        assert members[2].thermal.R_abs == pytest.approx(1.1 * r)

    def test_paired_mode(self, device):
        r, c = device.thermal.R_abs, device.thermal.C_abs
        spec = engine.SweepSpec(
            params=(("thermal.R_abs", [r, 1.1 * r]), ("thermal.C_abs", [c, 1.1 * c])),
            mode="paired",
        )
        assert len(engine.sweep_members(device, spec)) == 2
        with pytest.raises(SweepSpecError):
            engine.SweepSpec(
                params=(("thermal.R_abs", [r]), ("thermal.C_abs", [c, 1.1 * c])),
                mode="paired",
            )

    def test_bad_path_rejected(self, device):
        spec = engine.SweepSpec(params=(("thermal.R_abz", [1.0]),))
        with pytest.raises(SweepSpecError):
            engine.run_sweep(device, spec, self.prog, self.cfg)
        spec = engine.SweepSpec(params=(("membrane.volume_feedback", [1.0]),))
        with pytest.raises(SweepSpecError):
            engine.run_sweep(device, spec, self.prog, self.cfg)

    def test_parallel_matches_sequential(self, device, monkeypatch):
        r = device.thermal.R_abs
        spec = engine.SweepSpec(params=(("thermal.R_abs", [0.9 * r, r, 1.1 * r]),))
        seq = engine.run_sweep(device, spec, self.prog, self.cfg)
        monkeypatch.setenv(engine.THREADS_ENV, "2")
        par = engine.run_sweep(device, spec, self.prog, self.cfg)
        for name in seq.nominal:
            assert np.array_equal(seq.upper[name], par.upper[name])
            assert np.array_equal(seq.lower[name], par.lower[name])

    def test_empty_spec_rejected(self):
        with pytest.raises(SweepSpecError):
            engine.SweepSpec(params=())
