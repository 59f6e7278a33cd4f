"""Cascaded flight control: bicopter tilt control through the spin phase,
standard quadcopter cascade (single- or split-brain), and mode detection.

Bicopter path, outer loop at 100 Hz:
  position PID -> desired acceleration -> total thrust + tilt setpoint
  (saturated), then the tilt law tau = -delta*Kp*J*clip(tilt error) with a
  bang-bang-with-deadzone clip and a low-pass filter on the measured tilt.
Inner loop at 200 Hz: the desired world-frame xy torque is projected on the
current spin phase, u = 2*(tau . (cos yaw, sin yaw)), and mixed into the two
motors preserving total thrust.

The quadcopter cascade is a conventional geometric position/attitude loop
with a plus-configuration mixer and no rotor-drag compensation. Split-brain
mode runs one full instance per bicopter unit, each commanding only its own
pair of motors from its own measurements.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from spincopter import analysis
from spincopter.mathcore import Lpf1, wrap_angle

J = analysis.J

THRUST_FLOOR = 1e-3  # N, total-thrust clamp when the law asks for <= 0

# Mode detection (spin is monitored during the takeoff window)
DETECT_THRESHOLD = 8.7   # rad/s, strictly above switches to bicopter
DETECT_WINDOW = 0.5      # s
DETECT_SUSTAIN = 0.05    # s of continuous above-threshold spin required


class FlightMode(Enum):
    QUADCOPTER = "quadcopter"
    BICOPTER = "bicopter"


@dataclass
class Setpoint:
    """Position reference with feedforward derivatives."""

    pos: np.ndarray
    vel: np.ndarray = None
    acc: np.ndarray = None

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float)
        self.vel = np.zeros(3) if self.vel is None else np.asarray(self.vel, dtype=float)
        self.acc = np.zeros(3) if self.acc is None else np.asarray(self.acc, dtype=float)


@dataclass
class ControllerGains:
    """Gains and thresholds for both vehicle modes.

    Bicopter position gains are per-axis (x, y, z); the attitude pair
    (att_kp, att_kd) must satisfy the spin-stability conditions for the
    vehicle it flies (validate() enforces this at load time).
    """

    pos_kp: np.ndarray
    pos_kd: np.ndarray
    pos_ki: np.ndarray
    integrator_clamp: float          # m s, per axis
    att_kp: float                    # N m / rad
    att_kd: float                    # N m s / rad
    tilt_setpoint_limit: float       # rad
    tilt_deadzone: float             # rad
    lpf_cutoff: float                # rad/s on the tilt measurement
    yaw_blend: float                 # complementary-filter weight per fix
    quad_pos_kp: np.ndarray
    quad_pos_kd: np.ndarray
    quad_pos_ki: np.ndarray
    quad_integrator_clamp: float
    quad_att_kp: np.ndarray          # (roll/pitch, roll/pitch, yaw)
    quad_att_kd: np.ndarray

    def __post_init__(self):
        for name in (
            "pos_kp", "pos_kd", "pos_ki",
            "quad_pos_kp", "quad_pos_kd", "quad_pos_ki",
            "quad_att_kp", "quad_att_kd",
        ):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,) or np.any(arr < 0.0):
                raise ValueError(f"{name} must be three non-negative entries")
            setattr(self, name, arr)
        if self.att_kd < 0.0:
            raise ValueError("att_kd must be >= 0")
        if self.tilt_setpoint_limit <= 0.0 or self.tilt_deadzone <= 0.0:
            raise ValueError("tilt thresholds must be positive")
        if not 0.0 < self.yaw_blend <= 1.0:
            raise ValueError("yaw_blend must be in (0, 1]")


def default_gains():
    """Simulation-tuned defaults; the attitude pair sits at ~0.9 of the
    stability bound for the default vehicle."""
    return ControllerGains(
        pos_kp=np.array([0.3, 0.3, 8.0]),
        pos_kd=np.array([0.9, 0.9, 5.0]),
        pos_ki=np.array([0.3, 0.3, 2.0]),
        integrator_clamp=0.5,
        att_kp=1.1e-2,
        att_kd=0.0,
        tilt_setpoint_limit=0.12,
        tilt_deadzone=0.035,
        lpf_cutoff=10.0,
        yaw_blend=0.2,
        quad_pos_kp=np.array([6.0, 6.0, 8.0]),
        quad_pos_kd=np.array([4.0, 4.0, 5.0]),
        quad_pos_ki=np.array([0.5, 0.5, 1.0]),
        quad_integrator_clamp=0.5,
        quad_att_kp=np.array([0.06, 0.06, 0.002]),
        quad_att_kd=np.array([0.008, 0.008, 0.0008]),
    )


class UnstableGainsError(ValueError):
    """Configured gains violate the spin-stability conditions."""


def validate_gains(gains, params):
    """Reject gains that fail the stability check before any flight starts."""
    verdict = analysis.routh_hurwitz_check(
        gains.att_kp, gains.att_kd, params, delta=1
    )
    if verdict != analysis.StabilityVerdict.STABLE:
        bound = analysis.attitude_gain_bound(gains.att_kd, params)
        if gains.att_kp <= 0.0:
            reason = (
                f"sign condition delta*K_tau_p > 0 violated: "
                f"K_tau_p = {gains.att_kp:g} with delta = +/-1"
            )
        else:
            reason = (
                f"damping condition K_tau_d + arm^2*D_v/2 > "
                f"delta*I_d*K_tau_p/(I_z*spin) violated: K_tau_p = "
                f"{gains.att_kp:g} exceeds the bound {bound:g}"
            )
        raise UnstableGainsError(reason)
    return verdict


# ---------------------------------------------------------------------------
# bicopter laws (pure pieces)


def position_control(p, v, setpoint, integral, gains, params, quad=False):
    """Outer position law: desired total thrust and tilt setpoint.

    integral is the accumulated position error (m s, per axis). Returns
    (thrust, tilt_sp, saturated) where saturated reports either a clamped
    thrust or a tilt setpoint at the limit.
    """
    kp = gains.quad_pos_kp if quad else gains.pos_kp
    kd = gains.quad_pos_kd if quad else gains.pos_kd
    ki = gains.quad_pos_ki if quad else gains.pos_ki
    a_des = (
        setpoint.acc
        - kd * (np.asarray(v) - setpoint.vel)
        - kp * (np.asarray(p) - setpoint.pos)
        - ki * integral
        + np.array([0.0, 0.0, params.gravity])
    )
    thrust_raw = params.mass * a_des[2]
    saturated = thrust_raw <= THRUST_FLOOR
    thrust = max(thrust_raw, THRUST_FLOOR)
    tilt_sp = np.array([-a_des[1], a_des[0]]) * params.mass / thrust
    norm = float(np.linalg.norm(tilt_sp))
    if norm > gains.tilt_setpoint_limit:
        tilt_sp *= gains.tilt_setpoint_limit / norm
        saturated = True
    return thrust, tilt_sp, saturated, a_des


def deadzone_clip(err, threshold):
    """Bang-bang with deadzone: zero at or below the threshold, constant
    magnitude above it (direction preserved)."""
    err = np.asarray(err, dtype=float)
    norm = float(np.linalg.norm(err))
    if norm <= threshold:
        return np.zeros(2), True
    return threshold * err / norm, False


def attitude_control(tilt_filtered, tilt_sp, err_rate, delta, gains):
    """Tilt law: desired world-frame xy torque from the clipped tilt error.

    err_rate is the derivative of the filtered tilt error (only used when
    att_kd is nonzero). Returns (torque_xy, deadzone_active).
    """
    err = np.asarray(tilt_filtered) - np.asarray(tilt_sp)
    clipped, inactive = deadzone_clip(err, gains.tilt_deadzone)
    torque = -delta * gains.att_kp * (J @ clipped) - gains.att_kd * np.asarray(err_rate)
    return torque, inactive


def allocate_cyclic(torque_xy, yaw):
    """Differential-thrust moment that realizes torque_xy on cycle average."""
    return 2.0 * (torque_xy[0] * math.cos(yaw) + torque_xy[1] * math.sin(yaw))


def allocation_leftover(torque_xy, yaw):
    """Zero-mean disturbance the cyclic projection adds at twice the spin."""
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return math.sin(2.0 * yaw) * (swap @ np.asarray(torque_xy, dtype=float))


def mix_motors(thrust, diff_moment, params):
    """Invert {sum of thrusts, differential moment} into the pair of motors.

    Total thrust is preserved first; the differential is clipped to the
    remaining actuator authority. Returns (thrusts, limited) where limited
    reports any clipping.
    """
    lo, hi = params.thrust_min, params.thrust_max
    half = 0.5 * thrust
    limited = False
    if thrust > 2.0 * hi:
        return np.array([hi, hi]), True
    if thrust < 2.0 * lo:
        return np.array([lo, lo]), True
    df = diff_moment / (2.0 * params.arm)
    df_max = min(hi - half, half - lo)
    if abs(df) > df_max:
        df = math.copysign(df_max, df)
        limited = True
    return np.array([half + df, half - df]), limited


# ---------------------------------------------------------------------------
# mode detection and yaw estimation


class ModeDetector:
    """Latches the flight mode from the spin rate during the takeoff window.

    Bicopter iff |yaw rate| stays strictly above the threshold for the
    sustain time within the window; otherwise quadcopter once the window
    expires. Latching is one-way until reset.
    """

    def __init__(
        self,
        threshold=DETECT_THRESHOLD,
        window=DETECT_WINDOW,
        sustain=DETECT_SUSTAIN,
    ):
        self.threshold = threshold
        self.window = window
        self.sustain = sustain
        self.mode = None
        self._streak_start = None

    @property
    def latched(self):
        return self.mode is not None

    def update(self, t, yaw_rate):
        """Feed one gyro sample; returns the mode once latched, else None."""
        if self.mode is not None:
            return self.mode
        if t <= self.window and abs(yaw_rate) > self.threshold:
            if self._streak_start is None:
                self._streak_start = t
            elif t - self._streak_start >= self.sustain:
                self.mode = FlightMode.BICOPTER
        else:
            self._streak_start = None
            if t > self.window:
                self.mode = FlightMode.QUADCOPTER
        return self.mode


class YawEstimator:
    """Gyro integration with complementary blending toward external fixes.

    predict() integrates the measured spin between fixes; correct() blends
    part of the innovation on each fix. Estimates are wrapped to (-pi, pi].
    A fix older than stale_after marks the estimate stale (pure integration).
    """

    def __init__(self, blend=0.2, stale_after=0.1):
        self.blend = blend
        self.stale_after = stale_after
        self.yaw = 0.0
        self._last_fix_t = None
        self._initialized = False

    def predict(self, yaw_rate, dt):
        self.yaw = wrap_angle(self.yaw + yaw_rate * dt)
        return self.yaw

    def correct(self, t, yaw_fix):
        if not self._initialized:
            self.yaw = wrap_angle(yaw_fix)
            self._initialized = True
        else:
            self.yaw = wrap_angle(self.yaw + self.blend * wrap_angle(yaw_fix - self.yaw))
        self._last_fix_t = t
        return self.yaw

    def stale(self, t):
        return self._last_fix_t is None or (t - self._last_fix_t) > self.stale_after


# ---------------------------------------------------------------------------
# stateful controllers


@dataclass
class BicopterOutputs:
    """Internals exposed for logging."""

    thrust: float = 0.0
    tilt_sp: np.ndarray = field(default_factory=lambda: np.zeros(2))
    tilt_filtered: np.ndarray = field(default_factory=lambda: np.zeros(2))
    torque_xy: np.ndarray = field(default_factory=lambda: np.zeros(2))
    diff_moment: float = 0.0
    deadzone_active: bool = True
    tilt_sp_saturated: bool = False
    thrust_limited: bool = False


class BicopterController:
    """One bicopter unit's cascaded controller (owns all filter state)."""

    def __init__(self, params, gains, outer_dt=0.01, inner_dt=0.005):
        validate_gains(gains, params)
        self.params = params
        self.gains = gains
        self.outer_dt = outer_dt
        self.inner_dt = inner_dt
        self.delta = params.handedness
        self.lpf = Lpf1(gains.lpf_cutoff)
        self.yaw_est = YawEstimator(blend=gains.yaw_blend)
        self.integral = np.zeros(3)
        self.out = BicopterOutputs()
        self._prev_err = None

    def outer_update(self, p_meas, v_meas, tilt_meas, setpoint):
        """100 Hz position + attitude update; holds outputs for the inner loop."""
        g = self.gains
        thrust, tilt_sp, sat, _ = position_control(
            p_meas, v_meas, setpoint, self.integral, g, self.params
        )
        tilt_f = self.lpf.step(np.asarray(tilt_meas, dtype=float), self.outer_dt)
        err = tilt_f - tilt_sp
        if self._prev_err is None:
            err_rate = np.zeros(2)
        else:
            err_rate = (err - self._prev_err) / self.outer_dt
        self._prev_err = err.copy()
        torque, inactive = attitude_control(tilt_f, tilt_sp, err_rate, self.delta, g)

        # anti-windup: clamp, and freeze while the motors are saturated
        if not self.out.thrust_limited:
            self.integral += (np.asarray(p_meas) - setpoint.pos) * self.outer_dt
            self.integral = np.clip(self.integral, -g.integrator_clamp, g.integrator_clamp)

        self.out.thrust = thrust
        self.out.tilt_sp = tilt_sp
        self.out.tilt_filtered = tilt_f
        self.out.torque_xy = torque
        self.out.deadzone_active = inactive
        self.out.tilt_sp_saturated = sat
        return self.out

    def inner_update(self, yaw_rate_meas, yaw_fix=None, t=0.0):
        """200 Hz spin-phased allocation and motor mixing."""
        self.yaw_est.predict(yaw_rate_meas, self.inner_dt)
        if yaw_fix is not None:
            self.yaw_est.correct(t, yaw_fix)
        u = allocate_cyclic(self.out.torque_xy, self.yaw_est.yaw)
        thrusts, limited = mix_motors(self.out.thrust, u, self.params)
        self.out.diff_moment = u
        self.out.thrust_limited = limited
        return thrusts


def _vee(m):
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


@dataclass
class QuadOutputs:
    thrust: float = 0.0
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))
    tilt_sp: np.ndarray = field(default_factory=lambda: np.zeros(2))
    thrust_limited: bool = False


class QuadController:
    """Conventional geometric cascade for the assembled quadcopter."""

    def __init__(self, params, gains, outer_dt=0.01, yaw_sp=0.0):
        self.params = params
        self.gains = gains
        self.outer_dt = outer_dt
        self.yaw_sp = yaw_sp
        self.integral = np.zeros(3)
        self.out = QuadOutputs()

    def outer_update(self, p_meas, v_meas, rot_meas, omega_meas, setpoint):
        """Full cascade at the outer rate; returns four motor thrusts."""
        g = self.gains
        params = self.params
        _, _, _, a_des = position_control(
            p_meas, v_meas, setpoint, self.integral, g, params, quad=True
        )
        if not self.out.thrust_limited:
            self.integral += (np.asarray(p_meas) - setpoint.pos) * self.outer_dt
            self.integral = np.clip(
                self.integral, -g.quad_integrator_clamp, g.quad_integrator_clamp
            )

        # desired frame: body z along the desired acceleration, yaw held
        zb_d = a_des / max(np.linalg.norm(a_des), 1e-9)
        if zb_d[2] < 0.1:  # demanded acceleration points at the horizon; keep upright
            zb_d = np.array([0.0, 0.0, 1.0])
        x_c = np.array([math.cos(self.yaw_sp), math.sin(self.yaw_sp), 0.0])
        y_d = np.cross(zb_d, x_c)
        y_d /= max(np.linalg.norm(y_d), 1e-9)
        x_d = np.cross(y_d, zb_d)
        rot_d = np.column_stack([x_d, y_d, zb_d])

        rot = np.asarray(rot_meas, dtype=float)
        e_rot = 0.5 * _vee(rot_d.T @ rot - rot.T @ rot_d)
        omega = np.asarray(omega_meas, dtype=float)
        inertia_omega = params.inertia @ omega
        torque = (
            -g.quad_att_kp * e_rot
            - g.quad_att_kd * omega
            + np.cross(omega, inertia_omega)
        )
        thrust = params.mass * float(a_des @ rot[:, 2])
        thrust = max(thrust, THRUST_FLOOR)

        self.out.thrust = thrust
        self.out.torque = torque
        self.out.tilt_sp = np.array([-zb_d[1], zb_d[0]])
        return self.mix(thrust, torque)

    def mix(self, thrust, torque):
        """Plus-configuration mixer for motors (1, 2, 3, 4)."""
        params = self.params
        arm, c = params.arm, params.torque_to_thrust
        tx, ty, tz = torque
        quarter = 0.25 * thrust
        f = np.array(
            [
                quarter + tx / (2 * arm) + tz / (4 * c),
                quarter - ty / (2 * arm) - tz / (4 * c),
                quarter - tx / (2 * arm) + tz / (4 * c),
                quarter + ty / (2 * arm) - tz / (4 * c),
            ]
        )
        clipped = np.clip(f, params.thrust_min, params.thrust_max)
        self.out.thrust_limited = bool(np.any(np.abs(clipped - f) > 0.0))
        return clipped


class SplitBrainController:
    """Two independent quad-law instances, each driving its own motor pair.

    Instance A (CW unit) applies motors 1 and 3, instance B (CCW unit)
    motors 2 and 4; nothing is shared. With identical inputs the combined
    command equals a single instance's output exactly.
    """

    def __init__(self, params, gains, outer_dt=0.01, yaw_sp=0.0):
        self.a = QuadController(params, gains, outer_dt, yaw_sp)
        self.b = QuadController(params, gains, outer_dt, yaw_sp)

    def outer_update(self, feedback_a, feedback_b, setpoint):
        """feedback_* are (p, v, rot, omega) tuples per instance."""
        fa = self.a.outer_update(*feedback_a, setpoint)
        fb = self.b.outer_update(*feedback_b, setpoint)
        return np.array([fa[0], fb[1], fa[2], fb[3]])
