"""Frame-aware math shared by all modules: quaternions, RK4, tilt, filtering.

Conventions (used everywhere in this package):
  * world frame: x, y, z with z up; gravity acts along -z
  * quaternions are (w, x, y, z), Hamilton product, and map body -> world
  * the reduced attitude ("tilt") of a nearly upright vehicle is the pair
    (tilt_x, tilt_y) defined by body-z-in-world ~ [tilt_y, -tilt_x, 1]
  * yaw is the angle from world x to the body x axis, wrapped to (-pi, pi]
"""

import math

import numpy as np


class IntegrationError(RuntimeError):
    """Raised when an ODE right-hand side goes non-finite."""

    def __init__(self, t):
        super().__init__(f"non-finite derivative at t = {t:.6f} s")
        self.t = t


def rk4_step(deriv, state, t, dt):
    """One classical 4th-order Runge-Kutta step of ds/dt = deriv(t, s).

    state is a 1-D float array; dt must be positive.
    """
    k1 = np.asarray(deriv(t, state), dtype=float)
    k2 = np.asarray(deriv(t + 0.5 * dt, state + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(deriv(t + 0.5 * dt, state + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(deriv(t + dt, state + dt * k3), dtype=float)
    out = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationError(t)
    return out


class Lpf1:
    """First-order low-pass filter, discretized exactly.

    y <- y + (1 - exp(-cutoff * dt)) * (u - y), which has unity DC gain and
    is stable for any cutoff and step size. State initializes to the first
    input, so there is no startup transient. Works on scalars or arrays.
    """

    def __init__(self, cutoff):
        if cutoff <= 0.0:
            raise ValueError("cutoff must be positive")
        self.cutoff = cutoff
        self.state = None

    def step(self, u, dt):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        u = np.asarray(u, dtype=float)
        if self.state is None:
            self.state = u.copy()
        else:
            self.state = self.state + (1.0 - math.exp(-self.cutoff * dt)) * (u - self.state)
        return self.state if self.state.ndim else float(self.state)

    def reset(self):
        self.state = None


def lpf_step(lpf, u, dt):
    """Functional form of Lpf1.step (filter state lives in lpf)."""
    return lpf.step(u, dt)


# ---------------------------------------------------------------------------
# quaternions (w, x, y, z), body -> world


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    return q / math.sqrt(float(q @ q))


def quat_multiply(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )

def quat_from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    norm = math.sqrt(float(axis @ axis))
    if norm == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    half = 0.5 * angle
    return np.concatenate(([math.cos(half)], math.sin(half) / norm * axis))


def quat_to_rotation(q):
    """3x3 rotation matrix (body -> world) of a unit quaternion."""
    w, x, y, z = q
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def quat_derivative(q, omega_body):
    """Kinematics dq/dt = 0.5 * q x (0, omega) for body-frame rates."""
    return 0.5 * quat_multiply(q, np.concatenate(([0.0], omega_body)))


def rotate(q, v):
    """Apply the rotation of unit quaternion q to a 3-vector."""
    return quat_to_rotation(q) @ np.asarray(v, dtype=float)


def wrap_angle(a):
    """Wrap an angle to (-pi, pi]."""
    w = math.fmod(a, 2.0 * math.pi)
    if w > math.pi:
        w -= 2.0 * math.pi
    elif w <= -math.pi:
        w += 2.0 * math.pi
    return w


# ---------------------------------------------------------------------------
# reduced attitude


class OutOfEnvelopeError(ValueError):
    """Tilt reached 90 degrees or more; the reduced attitude is undefined."""


def tilt_from_rotation(rot):
    """Tilt components (tilt_x, tilt_y) of a body->world rotation matrix.

    With body-z-in-world = R e3, returns tilt_y = its world-x component and
    tilt_x = minus its world-y component. Yaw does not affect the result.
    Raises OutOfEnvelopeError when the body z axis points at or below the
    horizon.
    """
    zb_x = rot[0][2]
    zb_y = rot[1][2]
    zb_z = rot[2][2]
    if zb_z <= 0.0:
        raise OutOfEnvelopeError(f"tilt >= pi/2 (body z dot world z = {zb_z:.3f})")
    return -zb_y, zb_x


def tilt_from_quat(q):
    """Tilt components straight from the quaternion (no matrix build)."""
    w, x, y, z = q
    zb_x = 2.0 * (x * z + w * y)
    zb_y = 2.0 * (y * z - w * x)
    zb_z = 1.0 - 2.0 * (x * x + y * y)
    if zb_z <= 0.0:
        raise OutOfEnvelopeError(f"tilt >= pi/2 (body z dot world z = {zb_z:.3f})")
    return -zb_y, zb_x


def tilt_angle(q):
    """Angle between body z and world z, in [0, pi]."""
    w, x, y, z = q
    zb_z = 1.0 - 2.0 * (x * x + y * y)
    return math.acos(min(1.0, max(-1.0, zb_z)))


def quat_from_tilt(tilt_x, tilt_y, yaw=0.0):
    """Quaternion whose body z axis matches the tilt pair, then yawed.

    Inverse of tilt_from_quat up to O(|tilt|^3) for small tilt.
    """
    zb = np.array([tilt_y, -tilt_x, 1.0])
    zb /= math.sqrt(float(zb @ zb))
    axis = np.cross([0.0, 0.0, 1.0], zb)
    angle = math.acos(min(1.0, max(-1.0, zb[2])))
    q_tilt = quat_from_axis_angle(axis, angle)
    q_yaw = quat_from_axis_angle([0.0, 0.0, 1.0], yaw)
    return quat_normalize(quat_multiply(q_tilt, q_yaw))


def yaw_from_quat(q):
    """Yaw angle: direction of the body x axis projected on the world xy plane."""
    rot = quat_to_rotation(q)
    return math.atan2(rot[1][0], rot[0][0])
