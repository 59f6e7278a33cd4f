import numpy as np
import pytest

from spincopter import control, harness, vehicle


@pytest.fixture(scope="session")
def fleet():
    return harness.VehicleFleet.default()


@pytest.fixture(scope="session")
def gains():
    return control.default_gains()


@pytest.fixture(scope="session")
def reference_params():
    """Parameter set several documented examples are pinned to (smaller
    shaft-torque ratio and the drag values calibrated against it)."""
    return vehicle.bicopter_params(
        torque_to_thrust=0.006,
        drag_h=0.01214,
        drag_v=0.02,
        inertia_roll=5.75e-5,
        inertia_pitch=5.75e-5,
        motor_time_constant=0.0,
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
