"""Closed-form and small-signal results for the spinning bicopter.

The bicopter holds position with a nonzero steady yaw rate (relaxed hover):
shaft yaw torque balances rotor-drag yaw torque at

    spin* = handedness * c * m * g / (D_h * arm^2).

Near that state the vehicle behaves as a fast axisymmetric gyroscope whose
tilt (tilt_x, tilt_y) obeys

    I_d * tilt'' + I_z * spin* * J * tilt' = tau,   J = [[0, 1], [-1, 0]],

with tau the world-frame xy torque. Differential thrust can only produce
torque along the instantaneous (cos yaw, sin yaw) direction; drag from the
tilting motion enters through a yaw-dependent projection whose cycle average
is half the identity. Closing the loop with tau = -delta*Kp*J*tilt_err -
Kd*tilt_err' gives an LTI system whose stability region is the
Routh-Hurwitz pair checked here and cross-checked by an eigenvalue oracle.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from spincopter import vehicle
from spincopter.mathcore import quat_from_tilt, rk4_step, tilt_from_quat, yaw_from_quat

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def equilibrium_yaw_rate(params):
    """Steady spin rate of relaxed hover; zero for the torque-balanced quad."""
    if params.handedness == 0:
        return 0.0
    if params.drag_h == 0.0:
        raise ValueError("no finite equilibrium spin without horizontal rotor drag")
    return (
        params.handedness
        * params.torque_to_thrust
        * params.mass
        * params.gravity
        / (params.drag_h * params.arm**2)
    )


def precession_rate(params):
    """Signed rotation rate of the tilt-rate vector of the free gyroscope."""
    return params.inertia_axial * equilibrium_yaw_rate(params) / params.inertia_diametral


@dataclass(frozen=True)
class RelaxedHoverEquilibrium:
    """Upright equilibrium: thrusts sum to the weight, spin is constant."""

    spin_rate: float
    thrust_per_motor: float

    @property
    def body_z_world(self):
        return np.array([0.0, 0.0, 1.0])


def relaxed_hover(params):
    return RelaxedHoverEquilibrium(
        spin_rate=equilibrium_yaw_rate(params),
        thrust_per_motor=params.hover_thrust,
    )


@dataclass
class ReducedAttitudeState:
    """Gyroscope abstraction: tilt, tilt rate, yaw angle, frozen spin rate."""

    tilt: np.ndarray
    tilt_rate: np.ndarray
    yaw: float
    spin_rate: float

    ENVELOPE = 0.3  # rad, small-angle validity limit

    @property
    def in_envelope(self):
        return float(np.linalg.norm(self.tilt)) <= self.ENVELOPE

    def as_vector(self):
        return np.concatenate([self.tilt, self.tilt_rate, [self.yaw]])


def reduced_attitude_derivative(state, torque_xy, params):
    """Derivative (tilt', tilt'', yaw') of the reduced gyroscope under torque_xy.

    torque_xy is the total world-frame xy torque; drag is not added here
    (compose with tilt_torques or cycle_averaged_drag as needed). Valid
    whether or not the state is inside the small-angle envelope; callers
    should check state.in_envelope.
    """
    torque_xy = np.asarray(torque_xy, dtype=float)
    coupling = params.inertia_axial * state.spin_rate
    tilt_acc = (torque_xy - coupling * (J @ state.tilt_rate)) / params.inertia_diametral
    return state.tilt_rate.copy(), tilt_acc, state.spin_rate


def tilt_torques(yaw, thrusts, tilt_rate, params):
    """World-frame xy torques of the reduced model: (from thrust, from drag).

    The thrust part is the differential moment projected on the spin phase;
    the drag part is -arm^2*D_v times the yaw-dependent projection of the
    tilt rate.
    """
    thrusts = np.asarray(thrusts, dtype=float)
    diff = sum(
        p.spin_sign * params.arm * f for p, f in zip(params.propellers, thrusts)
    )
    cy, sy = math.cos(yaw), math.sin(yaw)
    tau_thrust = diff * np.array([cy, sy])
    proj = np.array([[cy * cy, sy * cy], [sy * cy, sy * sy]])
    tau_drag = -params.arm**2 * params.drag_v * (proj @ np.asarray(tilt_rate, dtype=float))
    return tau_thrust, tau_drag


def cycle_averaged_drag(params):
    """Tilt-rate damping coefficient after averaging the drag projection."""
    return 0.5 * params.arm**2 * params.drag_v


def integrate_reduced(state0, torque_fn, params, duration, dt=1e-4):
    """RK4 rollout of the reduced model; torque_fn(t, state) -> xy torque.

    Returns (times, tilts, tilt_rates) sampled every step.
    """
    n = int(round(duration / dt))
    times = np.linspace(0.0, n * dt, n + 1)
    tilts = np.empty((n + 1, 2))
    rates = np.empty((n + 1, 2))
    x = state0.as_vector()
    spin = state0.spin_rate

    def deriv(t, vec):
        st = ReducedAttitudeState(
            tilt=vec[0:2], tilt_rate=vec[2:4], yaw=vec[4], spin_rate=spin
        )
        d_tilt, d_rate, d_yaw = reduced_attitude_derivative(st, torque_fn(t, st), params)
        return np.concatenate([d_tilt, d_rate, [d_yaw]])

    tilts[0], rates[0] = x[0:2], x[2:4]
    for k in range(n):
        x = rk4_step(deriv, x, times[k], dt)
        tilts[k + 1], rates[k + 1] = x[0:2], x[2:4]
    return times, tilts, rates


# ---------------------------------------------------------------------------
# closed-loop LTI model and stability


def closed_loop_matrix(att_kp, att_kd, params, delta=None):
    """4x4 state matrix over (tilt_x, tilt_y, tilt_x', tilt_y') for the
    proportional(-derivative) tilt law with cycle-averaged drag."""
    if delta is None:
        delta = params.handedness
    spin = equilibrium_yaw_rate(params)
    i_d = params.inertia_diametral
    damping = att_kd + cycle_averaged_drag(params)
    a = np.zeros((4, 4))
    a[0:2, 2:4] = np.eye(2)
    a[2:4, 0:2] = -(delta * att_kp / i_d) * J
    a[2:4, 2:4] = -(damping / i_d) * np.eye(2) - (params.inertia_axial * spin / i_d) * J
    return a


def max_real_eigenvalue(matrix):
    return float(np.max(np.linalg.eigvals(matrix).real))


class StabilityVerdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


def attitude_gain_bound(att_kd, params):
    """Largest stable proportional tilt gain for the given derivative gain."""
    spin = equilibrium_yaw_rate(params)
    if spin == 0.0:
        raise ValueError("analysis assumes a nonzero equilibrium spin rate")
    return (
        (att_kd + cycle_averaged_drag(params))
        * params.inertia_axial
        * abs(spin)
        / params.inertia_diametral
    )


def routh_hurwitz_check(att_kp, att_kd, params, delta=None, tol=1e-6):
    """Classify the closed tilt loop as stable / unstable / marginal.

    Stability needs the spin-aligned sign condition delta*Kp > 0 and the
    damping condition Kd + cycle-averaged drag > delta*I_d*Kp/(I_z*spin).
    Points within a relative tol band of either boundary are marginal
    (equality cases are numerically fragile).
    """
    if delta is None:
        delta = params.handedness
    spin = equilibrium_yaw_rate(params)
    if spin == 0.0:
        raise ValueError("analysis assumes a nonzero equilibrium spin rate")
    if delta not in (1, -1, 1.0, -1.0):
        raise ValueError("delta must be +1 or -1")
    spin = delta * abs(spin)  # spin direction follows the unit's handedness

    damping = att_kd + cycle_averaged_drag(params)
    rhs = delta * params.inertia_diametral * att_kp / (params.inertia_axial * spin)
    sign_term = delta * att_kp

    bound = attitude_gain_bound(att_kd, params)
    margin_a = abs(damping - rhs) <= tol * max(abs(damping), abs(rhs))
    margin_b = abs(sign_term) <= tol * bound
    if margin_a or margin_b:
        return StabilityVerdict.MARGINAL
    if damping > rhs and sign_term > 0.0:
        return StabilityVerdict.STABLE
    return StabilityVerdict.UNSTABLE


def stability_map(kp_values, kd_values, params, deltas=(1, -1), tol=1e-6):
    """Sweep the gain grid; rows of (kp, kd, delta, verdict, max_real_eig)."""
    rows = []
    for delta in deltas:
        for kp in kp_values:
            for kd in kd_values:
                verdict = routh_hurwitz_check(kp, kd, params, delta=delta, tol=tol)
                eig = max_real_eigenvalue(closed_loop_matrix(kp, kd, params, delta=delta))
                rows.append((float(kp), float(kd), int(delta), verdict.value, eig))
    return rows


def write_stability_map_csv(path, rows):
    with open(path, "w") as fh:
        fh.write("K_tau_p,K_tau_d,delta,verdict,max_real_eig\n")
        for kp, kd, delta, verdict, eig in rows:
            fh.write(f"{kp:.6g},{kd:.6g},{delta},{verdict},{eig:.6g}\n")


# ---------------------------------------------------------------------------
# reduced-vs-full model comparison


def linearization_error(params, tilt0, duration=1.0, torque_fn=None, control_dt=1e-3):
    """Max tilt deviation between the full plant and the reduced model when
    both track the same commanded xy-torque sequence.

    The plant realizes the command through the spin-phased differential
    thrust (so it also sees the projection leftover the reduced model
    averages away). Returns (max_deviation, out_of_envelope).
    """
    if torque_fn is None:
        torque_fn = lambda t: np.zeros(2)
    spin = equilibrium_yaw_rate(params)
    hover = params.hover_thrust

    state0 = vehicle.RigidBodyState(
        p=np.zeros(3),
        v=np.zeros(3),
        q=quat_from_tilt(tilt0[0], tilt0[1], 0.0),
        omega=np.array([0.0, 0.0, spin]),
    )

    def controller(t, state):
        yaw = yaw_from_quat(state.q)
        cmd = np.asarray(torque_fn(t), dtype=float)
        u = 2.0 * (cmd[0] * math.cos(yaw) + cmd[1] * math.sin(yaw))
        df = u / (2.0 * params.arm)
        return np.clip(
            [hover + df, hover - df], params.thrust_min, params.thrust_max
        )

    trace = vehicle.simulate(
        state0, controller, params, duration, physics_dt=2.5e-4, control_dt=control_dt
    )
    tilt_full = np.array([tilt_from_quat(s[6:10]) for s in trace.states])

    damping = cycle_averaged_drag(params)

    def reduced_torque(t, st):
        return np.asarray(torque_fn(t), dtype=float) - damping * st.tilt_rate

    red0 = ReducedAttitudeState(
        tilt=np.array(tilt0, dtype=float),
        tilt_rate=np.zeros(2),
        yaw=0.0,
        spin_rate=spin,
    )
    _, tilt_red, _ = integrate_reduced(red0, reduced_torque, params, duration, dt=control_dt)

    n = min(len(tilt_full), len(tilt_red))
    deviation = float(np.max(np.linalg.norm(tilt_full[:n] - tilt_red[:n], axis=1)))
    worst = max(
        float(np.max(np.linalg.norm(tilt_full, axis=1))),
        float(np.max(np.linalg.norm(tilt_red, axis=1))),
    )
    return deviation, worst >= ReducedAttitudeState.ENVELOPE
