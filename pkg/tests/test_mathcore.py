import math

import numpy as np
import pytest

from spincopter import core, vehicle
from spincopter.mathcore import (
    IntegrationError,
    Lpf1,
    OutOfEnvelopeError,
    lpf_step,
    quat_from_axis_angle,
    quat_from_tilt,
    quat_multiply,
    quat_normalize,
    quat_to_rotation,
    rk4_step,
    tilt_from_quat,
    tilt_from_rotation,
    wrap_angle,
    yaw_from_quat,
)


class TestRk4:
    def test_zero_derivative_identity(self):
        out = rk4_step(lambda t, s: np.zeros(1), np.array([7.0]), 0.0, 0.05)
        assert out[0] == 7.0

    def test_exponential_one_step(self):
        # oracle: closed-form solution of x' = x
        out = rk4_step(lambda t, s: s, np.array([1.0]), 0.0, 0.1)
        assert abs(out[0] - math.exp(0.1)) < 1e-7

    def test_halving_dt_shrinks_error_16x(self):
        # global error over [0, 1] for x' = -10 x, oracle exp(-10)
        def global_error(dt):
            n = int(round(1.0 / dt))
            x = np.array([1.0])
            for k in range(n):
                x = rk4_step(lambda t, s: -10.0 * s, x, k * dt, dt)
            return abs(float(x[0]) - math.exp(-10.0))

        ratio = global_error(0.01) / global_error(0.005)
        assert 14.0 < ratio < 18.0

    def test_empirical_convergence_order(self):
        steps = [50, 100, 200, 400]
        errs = []
        for n in steps:
            dt = 1.0 / n
            x = np.array([1.0])
            for k in range(n):
                x = rk4_step(lambda t, s: -10.0 * s, x, k * dt, dt)
            errs.append(abs(float(x[0]) - math.exp(-10.0)))
        slope = -np.polyfit(np.log(steps), np.log(errs), 1)[0]
        assert abs(slope - 4.0) <= 0.2

    def test_nonfinite_derivative_raises_with_time(self):
        with pytest.raises(IntegrationError) as err:
            rk4_step(lambda t, s: s * np.inf, np.array([1.0]), 2.5, 0.01)
        assert err.value.t == 2.5

    def test_rejects_only_at_failure(self):
        out = rk4_step(lambda t, s: -s, np.array([1.0]), 0.0, 0.01)
        assert np.isfinite(out).all()


class TestLpf1:
    def test_unity_dc_gain(self):
        lpf = Lpf1(10.0)
        y = 0.0
        lpf.step(0.0, 1e-3)  # initialize away from the target
        for _ in range(5000):
            y = lpf.step(3.7, 1e-3)
        assert abs(y - 3.7) < 1e-9

    def test_step_response_63_percent_at_time_constant(self):
        lpf = Lpf1(10.0)
        lpf.step(0.0, 1e-3)
        y = 0.0
        for _ in range(100):  # t = 0.1 s = 1/cutoff
            y = lpf.step(1.0, 1e-3)
        assert abs(y - (1.0 - math.exp(-1.0))) < 0.01

    def test_sinusoid_at_ten_times_cutoff_attenuated(self):
        # first-order magnitude at 10x cutoff is 1/sqrt(101) ~ 0.0995
        lpf = Lpf1(10.0)
        dt = 1e-4
        ys = []
        for k in range(40000):
            ys.append(lpf.step(math.sin(100.0 * k * dt), dt))
        amp = max(abs(y) for y in ys[20000:])
        assert amp <= 0.12

    def test_initializes_at_first_sample(self):
        lpf = Lpf1(5.0)
        assert lpf.step(2.5, 0.01) == 2.5

    def test_vector_channels(self):
        lpf = Lpf1(10.0)
        out = lpf.step(np.array([1.0, -1.0]), 0.01)
        assert out.shape == (2,)

    def test_functional_form(self):
        lpf = Lpf1(10.0)
        assert lpf_step(lpf, 1.0, 0.01) == 1.0

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            Lpf1(0.0)
        with pytest.raises(ValueError):
            Lpf1(10.0).step(1.0, 0.0)


class TestTilt:
    def test_identity_is_level(self):
        q = np.array([1.0, 0.0, 0.0, 0.0])
        assert tilt_from_quat(q) == (0.0, 0.0)
        assert tilt_from_rotation(np.eye(3)) == (0.0, 0.0)

    def test_small_roll_maps_to_tilt_x(self):
        phi = 0.05
        q = quat_from_axis_angle([1.0, 0.0, 0.0], phi)
        tx, ty = tilt_from_quat(q)
        assert abs(tx - phi) < phi**3
        assert abs(ty) < 1e-12

    def test_yaw_does_not_tilt(self):
        for yaw in (0.3, -2.0, 3.0):
            q = quat_from_axis_angle([0.0, 0.0, 1.0], yaw)
            tx, ty = tilt_from_quat(q)
            assert abs(tx) < 1e-12 and abs(ty) < 1e-12

    def test_out_of_envelope_raises(self):
        q = quat_from_axis_angle([1.0, 0.0, 0.0], math.pi / 2 + 0.01)
        with pytest.raises(OutOfEnvelopeError):
            tilt_from_quat(q)

    def test_roundtrip_third_order(self):
        for mag in (0.05, 0.1, 0.2):
            for ang in np.linspace(0.0, 2.0 * math.pi, 9):
                tilt = (mag * math.cos(ang), mag * math.sin(ang))
                q = quat_from_tilt(*tilt, yaw=0.0)
                rec = tilt_from_quat(q)
                err = math.hypot(rec[0] - tilt[0], rec[1] - tilt[1])
                assert err <= 0.6 * mag**3 + 1e-12

    def test_roundtrip_with_yaw(self):
        q = quat_from_tilt(0.1, -0.05, yaw=1.2)
        tx, ty = tilt_from_quat(q)
        assert abs(tx - 0.1) < 1e-3 and abs(ty + 0.05) < 1e-3
        assert abs(yaw_from_quat(q) - 1.2) < 0.01


class TestQuat:
    def test_multiply_matches_matrix_product(self, rng):
        a = quat_normalize(rng.normal(size=4))
        b = quat_normalize(rng.normal(size=4))
        left = quat_to_rotation(quat_multiply(a, b))
        right = quat_to_rotation(a) @ quat_to_rotation(b)
        assert np.allclose(left, right, atol=1e-12)

    def test_wrap_angle(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi)
        assert wrap_angle(0.1) == pytest.approx(0.1)
        assert wrap_angle(2.0 * math.pi + 0.1) == pytest.approx(0.1)

    def test_orthonormal_over_one_million_steps(self):
        # long free tumble; renormalization must hold R on SO(3)
        params = vehicle.bicopter_params(
            drag_h=0.0, drag_v=0.0, gravity=0.0, motor_time_constant=0.0
        )
        state = vehicle.RigidBodyState(
            p=np.zeros(3),
            v=np.zeros(3),
            q=np.array([1.0, 0.0, 0.0, 0.0]),
            omega=np.array([0.5, 0.3, 20.0]),
        ).as_vector()
        thrust = np.zeros(2)
        act = np.zeros(2)
        status = core.advance(
            state, thrust, act,
            params.prop_positions, params.prop_yaw_signs,
            params.mass, params.gravity,
            params.inertia_roll, params.inertia_pitch, params.inertia_axial,
            params.torque_to_thrust, params.drag_h, params.drag_v,
            0.0, 5e-4, 1_000_000, False,
        )
        assert status == 0
        rot = quat_to_rotation(state[6:10])
        assert np.max(np.abs(rot @ rot.T - np.eye(3))) < 1e-6
