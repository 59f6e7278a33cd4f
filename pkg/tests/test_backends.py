import os
import subprocess
import sys

import numpy as np
import pytest

from spincopter import _core_py, core, vehicle
from spincopter.mathcore import quat_normalize

try:
    from spincopter import _core
except ImportError:
    _core = None


def advance_args(params, state, cmd, act, dt=5e-4, n=500):
    return (
        state, cmd, act,
        params.prop_positions, params.prop_yaw_signs,
        params.mass, params.gravity,
        params.inertia_roll, params.inertia_pitch, params.inertia_axial,
        params.torque_to_thrust, params.drag_h, params.drag_v,
        params.motor_time_constant, dt, n, False,
    )


@pytest.mark.skipif(_core is None, reason="compiled kernel not built")
class TestBackendEquivalence:
    def test_trajectories_bit_identical(self, rng):
        for params in (
            vehicle.bicopter_params(),
            vehicle.bicopter_params(-1, motor_time_constant=0.02),
            vehicle.quadcopter_params(),
        ):
            s0 = np.concatenate(
                [
                    rng.normal(size=3),
                    rng.normal(size=3),
                    quat_normalize(rng.normal(size=4)),
                    rng.normal(size=3) * 10.0,
                ]
            )
            cmd = rng.uniform(0.0, 0.18, size=params.n_propellers)
            a, b = s0.copy(), s0.copy()
            act_a = np.zeros(params.n_propellers)
            act_b = np.zeros(params.n_propellers)
            ra = _core.advance(*advance_args(params, a, cmd, act_a))
            rb = _core_py.advance(*advance_args(params, b, cmd, act_b))
            assert ra == rb == 0
            assert np.array_equal(a, b)
            assert np.array_equal(act_a, act_b)

    def test_derivative_bit_identical(self, rng):
        params = vehicle.quadcopter_params()
        s = np.concatenate(
            [rng.normal(size=3), rng.normal(size=3),
             quat_normalize(rng.normal(size=4)), rng.normal(size=3)]
        )
        cmd = rng.uniform(0.0, 0.18, size=4)
        out_a = np.empty(13)
        out_b = np.empty(13)
        _core.derivative(
            s, cmd, params.prop_positions, params.prop_yaw_signs,
            params.mass, params.gravity,
            params.inertia_roll, params.inertia_pitch, params.inertia_axial,
            params.torque_to_thrust, params.drag_h, params.drag_v, out_a,
        )
        _core_py.derivative(
            s, cmd, params.prop_positions, params.prop_yaw_signs,
            params.mass, params.gravity,
            params.inertia_roll, params.inertia_pitch, params.inertia_axial,
            params.torque_to_thrust, params.drag_h, params.drag_v, out_b,
        )
        assert np.array_equal(out_a, out_b)

    def test_nonfinite_state_reported(self):
        params = vehicle.bicopter_params()
        state = np.zeros(13)
        state[6] = np.nan
        status = _core.advance(
            *advance_args(params, state, np.zeros(2), np.zeros(2), n=1)
        )
        assert status == 1


class TestBackendSelection:
    def test_a_backend_is_selected(self):
        assert core.BACKEND in ("compiled", "python")

    def test_env_var_forces_pure_python(self):
        code = (
            "import spincopter.core as c; print(c.BACKEND)"
        )
        env = dict(os.environ, SPINCOPTER_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.stdout.strip() == "python"
