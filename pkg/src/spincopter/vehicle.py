"""Physical truth: vehicle parameters, propeller forces, and the 6-DOF plant.

A bicopter unit is two propellers on the body y axis, spaced 2*arm apart,
both thrusting along body +z. The CW unit (handedness +1) carries motors
1 and 3 whose shaft torque spins the body the same way as the thrust side;
the CCW unit (handedness -1) carries motors 2 and 4 with opposite shaft
torque. The quadcopter is both units rigidly stacked, the CCW pair rotated
90 degrees onto the body x axis and the propeller planes vertically offset.

Rotor drag is lumped per unit: diag(D_h, D_h, D_v) acting on the local air
velocity, split half per propeller so that the pair's drag forces cancel in
pure spin while their moments add up to -arm^2 * (D_v wx, 0, D_h wz) per
unit, the balance that sets the relaxed-hover spin rate.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from spincopter import core

GRAVITY = 9.81

# Bicopter physical constants. Mass, arm and inertias follow the 26 g
# prototype; torque_to_thrust is tuned so the open-loop spin-up settles
# within its 10 s budget, and drag_h is then calibrated so the equilibrium
# spin rate comes out at the observed 35 rad/s. drag_v is tuned to give the
# attitude loop a workable damping budget.
DEFAULT_MASS = 0.026           # kg
DEFAULT_ARM = 0.060            # m (half of the 120 mm propeller spacing)
DEFAULT_TORQUE_TO_THRUST = 0.008   # m
DEFAULT_SPIN_TARGET = 35.0     # rad/s, equilibrium yaw rate the drag is calibrated to
DEFAULT_DRAG_H = DEFAULT_TORQUE_TO_THRUST * DEFAULT_MASS * GRAVITY / (
    DEFAULT_SPIN_TARGET * DEFAULT_ARM**2
)                              # N s/m, = 0.0161943
DEFAULT_DRAG_V = 0.1           # N s/m
DEFAULT_INERTIA_ROLL = 6.0e-5         # kg m^2 (hardware roll value)
DEFAULT_INERTIA_PITCH = 5.5e-5        # kg m^2 (hardware pitch value)
DEFAULT_INERTIA_AXIAL = 1.13e-4       # kg m^2
DEFAULT_THRUST_MAX = 0.18      # N per motor
DEFAULT_MOTOR_TC = 0.03        # s, coreless-motor first-order lag
QUAD_MASS = 0.0551             # kg, both units plus the attachment
QUAD_INERTIA_DIAMETRAL = 1.41e-4   # kg m^2, two units stacked 45 mm apart
QUAD_INERTIA_AXIAL = 2.26e-4       # kg m^2
QUAD_PLANE_OFFSET = 0.045      # m between the two propeller planes

POSITION_BOUND = 100.0         # m; beyond this a run is clearly diverged


@dataclass(frozen=True)
class Propeller:
    """One propeller: motor number, body-frame position, and sign conventions.

    spin_sign (+1 front, -1 back of the unit's pair) orients the differential
    thrust moment; yaw_sign (+1 CW unit, -1 CCW unit) orients the shaft
    torque about body z.
    """

    index: int
    position: tuple
    spin_sign: float
    yaw_sign: float


@dataclass(frozen=True)
class VehicleParams:
    mass: float
    gravity: float
    arm: float
    torque_to_thrust: float
    drag_h: float
    drag_v: float
    inertia_roll: float               # plant truth, body x
    inertia_pitch: float              # plant truth, body y
    inertia_axial: float
    thrust_min: float
    thrust_max: float
    handedness: int               # +1 CW unit, -1 CCW unit, 0 quadcopter
    propellers: tuple
    motor_time_constant: float = 0.0
    # flat kernel views, derived in __post_init__
    prop_positions: np.ndarray = field(init=False, repr=False, compare=False)
    prop_yaw_signs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in (
            "mass",
            "arm",
            "inertia_roll",
            "inertia_pitch",
            "inertia_axial",
            "thrust_max",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        # zero drag and zero shaft torque are allowed so degenerate regimes
        # (drag-free conservation checks, no-spin analysis refusal) exist
        for name in ("torque_to_thrust", "drag_h", "drag_v", "motor_time_constant"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.thrust_min < 0.0 or self.thrust_min >= self.thrust_max:
            raise ValueError("need 0 <= thrust_min < thrust_max")
        pos = np.array([p.position for p in self.propellers], dtype=float).reshape(-1)
        sgn = np.array([p.yaw_sign for p in self.propellers], dtype=float)
        object.__setattr__(self, "prop_positions", pos)
        object.__setattr__(self, "prop_yaw_signs", sgn)

    @property
    def n_propellers(self):
        return len(self.propellers)

    @property
    def weight(self):
        return self.mass * self.gravity

    @property
    def hover_thrust(self):
        """Per-motor thrust that balances gravity when upright."""
        return self.weight / self.n_propellers

    @property
    def inertia_diametral(self):
        """Axisymmetric mean used by the reduced model and the controller."""
        return 0.5 * (self.inertia_roll + self.inertia_pitch)

    @property
    def inertia(self):
        return np.diag([self.inertia_roll, self.inertia_pitch, self.inertia_axial])


def bicopter_params(handedness=1, **overrides):
    """Parameters of one bicopter unit (CW by default)."""
    if handedness not in (1, -1):
        raise ValueError("handedness must be +1 (CW) or -1 (CCW)")
    arm = overrides.pop("arm", DEFAULT_ARM)
    front, back = (1, 3) if handedness == 1 else (2, 4)
    props = (
        Propeller(front, (0.0, arm, 0.0), 1.0, float(handedness)),
        Propeller(back, (0.0, -arm, 0.0), -1.0, float(handedness)),
    )
    defaults = dict(
        mass=DEFAULT_MASS,
        gravity=GRAVITY,
        arm=arm,
        torque_to_thrust=DEFAULT_TORQUE_TO_THRUST,
        drag_h=DEFAULT_DRAG_H,
        drag_v=DEFAULT_DRAG_V,
        inertia_roll=DEFAULT_INERTIA_ROLL,
        inertia_pitch=DEFAULT_INERTIA_PITCH,
        inertia_axial=DEFAULT_INERTIA_AXIAL,
        thrust_min=0.0,
        thrust_max=DEFAULT_THRUST_MAX,
        motor_time_constant=DEFAULT_MOTOR_TC,
    )
    defaults.update(overrides)
    return VehicleParams(handedness=handedness, propellers=props, **defaults)


def quadcopter_params(**overrides):
    """Parameters of the assembled quadcopter (plus configuration).

    Motors 1/3 (CW pair) sit on the body y axis in the upper plane, motors
    2/4 (CCW pair) on the body x axis in the lower plane.
    """
    arm = overrides.pop("arm", DEFAULT_ARM)
    h = overrides.pop("plane_offset", QUAD_PLANE_OFFSET) / 2.0
    props = (
        Propeller(1, (0.0, arm, h), 1.0, 1.0),
        Propeller(2, (arm, 0.0, -h), 1.0, -1.0),
        Propeller(3, (0.0, -arm, h), -1.0, 1.0),
        Propeller(4, (-arm, 0.0, -h), -1.0, -1.0),
    )
    defaults = dict(
        mass=QUAD_MASS,
        gravity=GRAVITY,
        arm=arm,
        torque_to_thrust=DEFAULT_TORQUE_TO_THRUST,
        drag_h=DEFAULT_DRAG_H,
        drag_v=DEFAULT_DRAG_V,
        inertia_roll=QUAD_INERTIA_DIAMETRAL,
        inertia_pitch=QUAD_INERTIA_DIAMETRAL,
        inertia_axial=QUAD_INERTIA_AXIAL,
        thrust_min=0.0,
        thrust_max=DEFAULT_THRUST_MAX,
        motor_time_constant=DEFAULT_MOTOR_TC,
    )
    defaults.update(overrides)
    return VehicleParams(handedness=0, propellers=props, **defaults)


@dataclass
class RigidBodyState:
    """Full 6-DOF state: world position/velocity, orientation, body rates."""

    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    omega: np.ndarray

    @classmethod
    def resting(cls, p=(0.0, 0.0, 0.0), yaw_rate=0.0):
        return cls(
            p=np.array(p, dtype=float),
            v=np.zeros(3),
            q=np.array([1.0, 0.0, 0.0, 0.0]),
            omega=np.array([0.0, 0.0, yaw_rate]),
        )

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(p=x[0:3].copy(), v=x[3:6].copy(), q=x[6:10].copy(), omega=x[10:13].copy())

    def as_vector(self):
        return np.concatenate([self.p, self.v, self.q, self.omega])

    def copy(self):
        return RigidBodyState(self.p.copy(), self.v.copy(), self.q.copy(), self.omega.copy())


def _check_thrusts(thrusts, params):
    thrusts = np.asarray(thrusts, dtype=float)
    if thrusts.shape != (params.n_propellers,):
        raise ValueError(
            f"expected {params.n_propellers} thrusts, got shape {thrusts.shape}"
        )
    lo, hi = params.thrust_min, params.thrust_max
    if np.any(thrusts < lo - 1e-12) or np.any(thrusts > hi + 1e-12):
        raise ValueError(f"thrust outside [{lo}, {hi}]: {thrusts}")
    return thrusts


def local_air_velocity(state, prop, params=None):
    """Air velocity seen by one propeller, in the body frame.

    Combines the body-frame view of the world velocity with the rotational
    sweep omega x l. prop may be a Propeller or an index into
    params.propellers.
    """
    if not isinstance(prop, Propeller):
        prop = params.propellers[prop]
    rot = _rotation(state.q)
    return rot.T @ state.v + np.cross(state.omega, np.asarray(prop.position))


def _rotation(q):
    w, x, y, z = q
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def propeller_wrench(state, thrusts, params):
    """Total body-frame (force, torque) from all propellers.

    Sums thrust along body z, shaft yaw torque, and the per-propeller rotor
    drag (half the unit's lumped coefficient each) with its exact
    cross-product moment.
    """
    thrusts = _check_thrusts(thrusts, params)
    drag = 0.5 * np.diag([params.drag_h, params.drag_h, params.drag_v])
    force = np.zeros(3)
    torque = np.zeros(3)
    e3 = np.array([0.0, 0.0, 1.0])
    for prop, f in zip(params.propellers, thrusts):
        pos = np.asarray(prop.position)
        f_thrust = f * e3
        f_drag = -drag @ local_air_velocity(state, prop)
        force += f_thrust + f_drag
        torque += np.cross(pos, f_thrust)
        torque += prop.yaw_sign * params.torque_to_thrust * f * e3
        torque += np.cross(pos, f_drag)
    return force, torque


def dynamics_derivative(state, thrusts, params):
    """13-vector time derivative of the plant (layout per spincopter.core)."""
    thrusts = _check_thrusts(thrusts, params)
    out = np.empty(13)
    core.derivative(
        state.as_vector(),
        thrusts,
        params.prop_positions,
        params.prop_yaw_signs,
        params.mass,
        params.gravity,
        params.inertia_roll,
        params.inertia_pitch,
        params.inertia_axial,
        params.torque_to_thrust,
        params.drag_h,
        params.drag_v,
        out,
    )
    return out


@dataclass
class SimTrace:
    """Fixed-step rollout record: state and thrust at every control tick,
    plus the final state. Crash means divergence, not ground contact."""

    t: np.ndarray
    states: np.ndarray        # (n, 13)
    thrusts: np.ndarray       # (n, n_props)
    crashed: bool = False
    crash_time: float = None

    def state_at(self, i):
        return RigidBodyState.from_vector(self.states[i])


def simulate(
    initial,
    controller,
    params,
    duration,
    physics_dt=5e-4,
    control_dt=5e-3,
    ground=False,
):
    """Deterministic fixed-step rollout of the plant.

    controller(t, RigidBodyState) -> per-motor thrusts, called every
    control_dt and held between calls (None means all motors off). The
    physics advances at physics_dt, which must divide control_dt. A run is
    flagged crashed when the state diverges (non-finite or |p| > 100 m).
    """
    if duration <= 0.0 or physics_dt <= 0.0:
        raise ValueError("duration and physics_dt must be positive")
    n_sub = int(round(control_dt / physics_dt))
    if n_sub < 1 or abs(n_sub * physics_dt - control_dt) > 1e-12:
        raise ValueError("physics_dt must evenly divide control_dt")

    n_ticks = int(round(duration / control_dt))
    state = initial.as_vector()
    thrust_act = np.zeros(params.n_propellers)
    times = np.empty(n_ticks + 1)
    states = np.empty((n_ticks + 1, 13))
    thrusts = np.empty((n_ticks + 1, params.n_propellers))
    crashed = False
    crash_time = None

    last = np.zeros(params.n_propellers)
    n_done = 0
    for k in range(n_ticks):
        t = k * control_dt
        cmd = controller(t, RigidBodyState.from_vector(state))
        last = np.zeros(params.n_propellers) if cmd is None else _check_thrusts(cmd, params)
        times[k] = t
        states[k] = state
        thrusts[k] = last
        n_done = k + 1
        status = core.advance(
            state,
            last,
            thrust_act,
            params.prop_positions,
            params.prop_yaw_signs,
            params.mass,
            params.gravity,
            params.inertia_roll,
            params.inertia_pitch,
            params.inertia_axial,
            params.torque_to_thrust,
            params.drag_h,
            params.drag_v,
            params.motor_time_constant,
            physics_dt,
            n_sub,
            ground,
        )
        if status != 0 or not np.all(np.isfinite(state)) or np.linalg.norm(state[0:3]) > POSITION_BOUND:
            crashed = True
            crash_time = t + control_dt
            break

    if not crashed:
        times[n_ticks] = n_ticks * control_dt
        states[n_ticks] = state
        thrusts[n_ticks] = last
        n_done = n_ticks + 1

    return SimTrace(
        t=times[:n_done],
        states=states[:n_done],
        thrusts=thrusts[:n_done],
        crashed=crashed,
        crash_time=crash_time,
    )
