import pytest
from hypothesis import given, strategies as st

from hled.drive import (
    DriveProgram,
    LedModel,
    PeriodicDrive,
    Pulse,
    absorbed_power,
    expand_periodic,
    per_pulse_energy,
    power_at,
    power_from_current,
)
from hled.errors import CurrentOutOfRange, DriveProgramError, TimeOutOfRange


class TestExpandPeriodic:
    def test_three_pulse_train(self):
        prog = expand_periodic(PeriodicDrive(rate_f=10.0, duty=0.2, power=2.5, n_pulses=3))
        assert [p.t_start for p in prog.pulses] == [0.0, 0.1, 0.2]
        assert all(p.duration == pytest.approx(0.02) for p in prog.pulses)
        assert all(p.power == 2.5 for p in prog.pulses)
        assert prog.t_end == pytest.approx(0.3)

    def test_single_pulse_duty_03(self):
        prog = expand_periodic(PeriodicDrive(rate_f=5.0, duty=0.3, power=2.5, n_pulses=1))
        assert len(prog.pulses) == 1
        assert prog.pulses[0].duration == pytest.approx(0.06)

    def test_200hz_pulse_width(self):
        prog = expand_periodic(PeriodicDrive(rate_f=200.0, duty=0.2, power=1.0, n_pulses=5))
        assert prog.pulses[0].duration == pytest.approx(1e-3)

    @given(
        rate=st.floats(min_value=0.1, max_value=1000.0),
        duty=st.floats(min_value=1e-3, max_value=0.999),
        power=st.floats(min_value=0.0, max_value=10.0),
        n=st.integers(min_value=1, max_value=50),
    )
    def test_output_always_valid(self, rate, duty, power, n):
        spec = PeriodicDrive(rate_f=rate, duty=duty, power=power, n_pulses=n)
        prog = expand_periodic(spec)  # DriveProgram validates in __post_init__
        assert len(prog.pulses) == n


class TestDriveProgram:
    def test_rejects_overlap(self):
        with pytest.raises(DriveProgramError):
            DriveProgram(
                pulses=(Pulse(0.0, 0.2, 1.0), Pulse(0.1, 0.2, 1.0)), t_end=1.0
            )

    def test_rejects_pulse_past_end(self):
        with pytest.raises(DriveProgramError):
            DriveProgram(pulses=(Pulse(0.5, 1.0, 1.0),), t_end=1.0)

    def test_abutting_pulses_ok(self):
        DriveProgram(pulses=(Pulse(0.0, 0.1, 1.0), Pulse(0.1, 0.1, 2.0)), t_end=0.2)


class TestPowerFromCurrent:
    def test_max_current_anchor(self):
        assert power_from_current(2.4) == pytest.approx(2.5)

    def test_zero(self):
        assert power_from_current(0.0) == 0.0

    def test_linearity(self):
        assert power_from_current(1.2) == pytest.approx(1.25)

    @pytest.mark.parametrize("current", [-0.1, 2.5])
    def test_out_of_range(self, current):
        with pytest.raises(CurrentOutOfRange):
            power_from_current(current)

    def test_table_override(self):
        led = LedModel(table=((0.0, 0.0), (1.0, 1.2), (2.4, 2.5)))
        assert power_from_current(0.5, led) == pytest.approx(0.6)
        assert power_from_current(2.4, led) == pytest.approx(2.5)


class TestAbsorbedPower:
    def test_paper_anchor(self):
        assert absorbed_power(2.5, 0.72) == pytest.approx(1.8)

    def test_zero(self):
        assert absorbed_power(0.0, 0.72) == 0.0

    def test_half(self):
        assert absorbed_power(1.0, 0.5) == 0.5


class TestPowerAt:
    prog = DriveProgram(pulses=(Pulse(0.0, 0.1, 2.5),), t_end=0.5)

    def test_inside(self):
        assert power_at(self.prog, 0.05) == 2.5

    def test_half_open_boundary(self):
        assert power_at(self.prog, 0.1) == 0.0

    def test_after_pulse(self):
        assert power_at(self.prog, 0.3) == 0.0

    def test_out_of_range(self):
        with pytest.raises(TimeOutOfRange):
            power_at(self.prog, 0.6)


@given(
    rate=st.floats(min_value=1.0, max_value=500.0),
    duty=st.floats(min_value=0.05, max_value=0.95),
)
def test_per_pulse_energy_scales_as_inverse_rate(rate, duty):
    e1 = per_pulse_energy(PeriodicDrive(rate, duty, 2.5, 3), 0.72)
    e2 = per_pulse_energy(PeriodicDrive(2 * rate, duty, 2.5, 3), 0.72)
    assert e1 == 2 * e2  # exact in floating point: halving via *2 of rate
    assert e1 == 0.72 * 2.5 * duty / rate
