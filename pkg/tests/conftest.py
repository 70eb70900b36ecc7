import pytest

from hled import calibration, engine
from hled.drive import DriveProgram, Pulse


@pytest.fixture(scope="session")
def device():
    return calibration.derive_defaults()


@pytest.fixture(scope="session")
def anchor_program():
    """The 100 ms / 2.5 W anchor pulse with a long cooling tail."""
    return DriveProgram(pulses=(Pulse(0.0, 0.1, 2.5),), t_end=2.5)


@pytest.fixture(scope="session")
def anchor_trace(device, anchor_program):
    cfg = engine.SimConfig(dt=1e-5, t_end=2.5, record_every=1)
    return engine.simulate(device, anchor_program, cfg)
