import math

import numpy as np
import pytest

from spincopter import analysis, vehicle
from spincopter.analysis import StabilityVerdict


class TestEquilibriumYawRate:
    def test_no_shaft_torque_means_no_spin(self):
        p = vehicle.bicopter_params(torque_to_thrust=0.0)
        assert analysis.equilibrium_yaw_rate(p) == 0.0

    def test_reference_parameter_set(self, reference_params):
        # c = 0.006, D_h = 0.01214, l = 0.06, m = 0.026 -> ~35 rad/s
        assert analysis.equilibrium_yaw_rate(reference_params) == pytest.approx(
            35.0, abs=0.1
        )

    def test_defaults_calibrated_to_observed_flight_rate(self, fleet):
        assert analysis.equilibrium_yaw_rate(fleet.bicopter_cw) == pytest.approx(
            35.0, abs=0.1
        )

    def test_sign_follows_handedness(self):
        cw = vehicle.bicopter_params(1)
        ccw = vehicle.bicopter_params(-1)
        assert analysis.equilibrium_yaw_rate(ccw) == -analysis.equilibrium_yaw_rate(cw)

    def test_quad_is_torque_balanced(self, fleet):
        assert analysis.equilibrium_yaw_rate(fleet.quad) == 0.0

    def test_parameter_scaling(self):
        base = vehicle.bicopter_params()
        w0 = analysis.equilibrium_yaw_rate(base)
        double_c = vehicle.bicopter_params(
            torque_to_thrust=2 * base.torque_to_thrust
        )
        assert analysis.equilibrium_yaw_rate(double_c) == pytest.approx(2 * w0)
        double_m = vehicle.bicopter_params(mass=2 * base.mass)
        assert analysis.equilibrium_yaw_rate(double_m) == pytest.approx(2 * w0)
        double_dh = vehicle.bicopter_params(drag_h=2 * base.drag_h)
        assert analysis.equilibrium_yaw_rate(double_dh) == pytest.approx(w0 / 2)
        double_l = vehicle.bicopter_params(arm=2 * base.arm)
        assert analysis.equilibrium_yaw_rate(double_l) == pytest.approx(w0 / 4)

    def test_drag_free_has_no_equilibrium(self):
        p = vehicle.bicopter_params(drag_h=0.0)
        with pytest.raises(ValueError):
            analysis.equilibrium_yaw_rate(p)

    def test_relaxed_hover_summary(self, fleet):
        eq = analysis.relaxed_hover(fleet.bicopter_cw)
        assert 2 * eq.thrust_per_motor == pytest.approx(fleet.bicopter_cw.weight)
        assert np.allclose(eq.body_z_world, [0.0, 0.0, 1.0])


class TestReducedAttitude:
    def test_rest_is_equilibrium(self, fleet):
        st = analysis.ReducedAttitudeState(
            tilt=np.array([0.05, -0.02]),
            tilt_rate=np.zeros(2),
            yaw=0.0,
            spin_rate=35.0,
        )
        d_tilt, d_rate, d_yaw = analysis.reduced_attitude_derivative(
            st, np.zeros(2), fleet.bicopter_cw
        )
        assert np.all(d_tilt == 0.0) and np.all(d_rate == 0.0)
        assert d_yaw == 35.0

    def test_free_precession_rate_and_norm(self):
        p = vehicle.bicopter_params(drag_v=0.0)
        spin = analysis.equilibrium_yaw_rate(p)
        omega_p = analysis.precession_rate(p)
        st = analysis.ReducedAttitudeState(
            tilt=np.zeros(2), tilt_rate=np.array([0.1, 0.0]), yaw=0.0, spin_rate=spin
        )
        t, _, rates = analysis.integrate_reduced(
            st, lambda tt, s: np.zeros(2), p, 1.0, dt=1e-4
        )
        angle = np.unwrap(np.arctan2(rates[:, 1], rates[:, 0]))
        slope = np.polyfit(t, angle, 1)[0]
        assert abs(slope - omega_p) / omega_p < 5e-3
        # pure precession conserves the tilt-rate magnitude
        norms = np.linalg.norm(rates, axis=1)
        assert abs(norms[-1] - 0.1) / 0.1 < 1e-9

    def test_constant_torque_steady_drift(self):
        # steady solution of the gyroscope: tilt rate = J^-1 tau / (I_z spin);
        # for tau = (tau_x, 0) and positive spin the drift is +y
        p = vehicle.bicopter_params(drag_v=0.0)
        spin = analysis.equilibrium_yaw_rate(p)
        tau = np.array([2e-4, 0.0])
        steady = np.array([0.0, tau[0] / (p.inertia_axial * spin)])
        st = analysis.ReducedAttitudeState(
            tilt=np.zeros(2), tilt_rate=steady.copy(), yaw=0.0, spin_rate=spin
        )
        _, tilts, rates = analysis.integrate_reduced(
            st, lambda tt, s: tau, p, 0.5, dt=1e-4
        )
        assert np.allclose(rates[-1], steady, atol=1e-9)
        assert tilts[-1][1] > 0.0  # drift orthogonal to the applied torque

    def test_envelope_property(self):
        st = analysis.ReducedAttitudeState(
            tilt=np.array([0.31, 0.0]), tilt_rate=np.zeros(2), yaw=0.0, spin_rate=35.0
        )
        assert not st.in_envelope


class TestTiltTorques:
    def test_equal_thrusts_produce_no_tilt_torque(self, fleet):
        tau_p, _ = analysis.tilt_torques(
            0.7, np.array([0.1, 0.1]), np.zeros(2), fleet.bicopter_cw
        )
        assert np.allclose(tau_p, 0.0)

    def test_differential_thrust_along_spin_phase(self, fleet):
        p = fleet.bicopter_cw
        # l*(f1 - f3) = 0.006 N m at yaw 0
        f = np.array([0.1 + 0.05, 0.1 - 0.05])
        tau_p, _ = analysis.tilt_torques(0.0, f, np.zeros(2), p)
        assert np.allclose(tau_p, [0.006, 0.0], atol=1e-15)

    def test_drag_projection_cycle_average(self, fleet):
        # discrete mean over equally spaced yaw samples is exact for the
        # second-harmonic projection, so this probes the analytic average
        p = fleet.bicopter_cw
        rate = np.array([0.3, -0.1])
        acc = np.zeros(2)
        n = 8
        for k in range(n):
            _, tau_d = analysis.tilt_torques(2.0 * math.pi * k / n, np.zeros(2), rate, p)
            acc += tau_d
        mean = acc / n
        expected = -analysis.cycle_averaged_drag(p) * rate
        assert np.allclose(mean, expected, atol=1e-12)

    def test_projection_matrix_average_is_half_identity(self):
        n = 16
        acc = np.zeros((2, 2))
        for k in range(n):
            y = 2.0 * math.pi * k / n
            cy, sy = math.cos(y), math.sin(y)
            acc += np.array([[cy * cy, sy * cy], [sy * cy, sy * sy]])
        assert np.allclose(acc / n, 0.5 * np.eye(2), atol=1e-12)


class TestClosedLoop:
    def test_free_gyroscope_spectrum(self):
        p = vehicle.bicopter_params(drag_v=0.0)
        a = analysis.closed_loop_matrix(0.0, 0.0, p)
        omega_p = analysis.precession_rate(p)
        eigs = np.sort_complex(np.linalg.eigvals(a))
        expected = np.sort_complex(
            np.array([0.0, 0.0, 1j * omega_p, -1j * omega_p])
        )
        assert np.allclose(eigs, expected, atol=1e-9)

    def test_stable_gains_move_spectrum_left(self, fleet):
        a = analysis.closed_loop_matrix(1e-3, 0.0, fleet.bicopter_cw)
        assert analysis.max_real_eigenvalue(a) < 0.0

    def test_wrong_sign_gain_is_unstable(self, fleet):
        a = analysis.closed_loop_matrix(-1e-3, 0.0, fleet.bicopter_cw)
        assert analysis.max_real_eigenvalue(a) > 0.0


class TestRouthHurwitz:
    def test_reference_examples(self, reference_params):
        p = reference_params
        bound = analysis.attitude_gain_bound(0.0, p)
        assert bound == pytest.approx(2.48e-3, rel=0.01)
        assert analysis.routh_hurwitz_check(1e-3, 0.0, p) == StabilityVerdict.STABLE
        assert analysis.routh_hurwitz_check(-1e-3, 0.0, p) == StabilityVerdict.UNSTABLE
        assert analysis.routh_hurwitz_check(5e-3, 0.0, p) == StabilityVerdict.UNSTABLE

    def test_default_vehicle_examples(self, fleet):
        # default vertical drag is larger than the reference set, so the
        # stable region extends further before the damping bound bites
        p = fleet.bicopter_cw
        bound = analysis.attitude_gain_bound(0.0, p)
        assert analysis.routh_hurwitz_check(1e-3, 0.0, p) == StabilityVerdict.STABLE
        assert (
            analysis.routh_hurwitz_check(2.0 * bound, 0.0, p)
            == StabilityVerdict.UNSTABLE
        )

    def test_marginal_band(self, fleet):
        p = fleet.bicopter_cw
        bound = analysis.attitude_gain_bound(0.0, p)
        assert (
            analysis.routh_hurwitz_check(bound * (1.0 + 1e-9), 0.0, p)
            == StabilityVerdict.MARGINAL
        )
        assert (
            analysis.routh_hurwitz_check(bound * 1e-9, 0.0, p)
            == StabilityVerdict.MARGINAL
        )

    def test_derivative_gain_raises_the_bound(self, fleet):
        p = fleet.bicopter_cw
        assert analysis.attitude_gain_bound(1e-4, p) > analysis.attitude_gain_bound(0.0, p)

    def test_refuses_spinless_regime(self, fleet):
        with pytest.raises(ValueError):
            analysis.routh_hurwitz_check(1e-3, 0.0, fleet.quad)

    def test_agrees_with_eigenvalue_oracle_on_grid(self, fleet):
        p = fleet.bicopter_cw
        rows = analysis.stability_map(
            np.linspace(-5e-3, 5e-3, 20), np.linspace(-1e-4, 1e-4, 20), p
        )
        for kp, kd, delta, verdict, eig in rows:
            if verdict == StabilityVerdict.MARGINAL.value:
                continue
            assert (eig < 0.0) == (verdict == StabilityVerdict.STABLE.value), (
                kp, kd, delta, verdict, eig,
            )

    def test_map_csv_schema(self, fleet, tmp_path):
        rows = analysis.stability_map(
            np.linspace(1e-4, 2e-3, 3), np.linspace(0.0, 1e-4, 3), fleet.bicopter_cw
        )
        path = tmp_path / "map.csv"
        analysis.write_stability_map_csv(path, rows)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "K_tau_p,K_tau_d,delta,verdict,max_real_eig"
        assert len(lines) == 1 + 2 * 9  # both spin directions by default


class TestLinearizationError:
    def test_equilibrium_stays_put(self, fleet):
        p = vehicle.bicopter_params(motor_time_constant=0.0)
        dev, flagged = analysis.linearization_error(p, (0.0, 0.0), 0.5)
        assert dev < 1e-3 and not flagged

    def test_small_tilt_tracks_reduced_model(self):
        p = vehicle.bicopter_params(motor_time_constant=0.0)
        dev, flagged = analysis.linearization_error(
            p,
            (0.05, 0.0),
            1.0,
            torque_fn=lambda t: 3e-5 * np.array([math.cos(2 * t), math.sin(2 * t)]),
        )
        assert dev < 0.01 and not flagged

    def test_large_tilt_flagged_out_of_envelope(self):
        p = vehicle.bicopter_params(motor_time_constant=0.0)
        dev_small, _ = analysis.linearization_error(p, (0.05, 0.0), 1.0)
        dev_large, flagged = analysis.linearization_error(p, (0.3, 0.0), 1.0)
        assert flagged
        assert dev_large >= dev_small
