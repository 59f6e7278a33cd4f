"""Scenario harness: timing model, noise injection, logging, and metrics.

Timing model (fixed, asserted by tests):
  * physics integration at 0.5 ms steps
  * inner control loop (spin-phased allocation + mixing, gyro sampling,
    mode detection) every 5 ms (200 Hz)
  * outer control loop (position + attitude laws, external feedback,
    yaw fix fusion) every 10 ms (100 Hz), i.e. exactly two inner ticks
    per outer tick and ten physics steps per inner tick
  * one log record per outer tick

External (tracking-system) feedback is delayed by the configured latency
and carries white position noise; each control board's gyro carries its
own white noise and bias. All randomness is drawn from per-stream
generators seeded from the scenario seed, so runs are bit-reproducible.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from spincopter import control, vehicle
from spincopter.control import FlightMode
from spincopter.mathcore import quat_from_tilt, tilt_angle, tilt_from_rotation

PHYSICS_DT = 5e-4
INNER_DT = 5e-3
OUTER_DT = 1e-2
STEPS_PER_INNER = int(round(INNER_DT / PHYSICS_DT))
INNER_PER_OUTER = int(round(OUTER_DT / INNER_DT))

CRASH_TILT = 1.2  # rad


@dataclass(frozen=True)
class NoiseSpec:
    """Sensor imperfections; zeros give the idealized runs."""

    pos_sigma: float = 0.0      # m, white noise on tracking position
    gyro_sigma: float = 0.0     # rad/s, white noise per gyro axis
    gyro_bias: float = 0.0      # rad/s, constant offset per gyro axis
    latency: float = 0.0        # s, tracking feedback delay


def ideal_noise():
    return NoiseSpec()


def realistic_noise():
    return NoiseSpec(pos_sigma=1e-3, gyro_sigma=0.01, gyro_bias=0.0, latency=0.010)


# ---------------------------------------------------------------------------
# reference trajectories


def _smoothstep(u):
    # quintic: C2-continuous so the acceleration feedforward stays bounded
    s = 6 * u**5 - 15 * u**4 + 10 * u**3
    ds = 30 * u**4 - 60 * u**3 + 30 * u**2
    dds = 120 * u**3 - 180 * u**2 + 60 * u
    return s, ds, dds


@dataclass
class Phase:
    t0: float
    t1: float
    fn: object  # fn(t_local) -> (pos, vel, acc)


class ReferenceTrajectory:
    """Piecewise position reference, continuous in position."""

    def __init__(self, phases):
        self.phases = phases
        self.t_end = phases[-1].t1

    def setpoint(self, t):
        t = min(max(t, 0.0), self.t_end)
        for ph in self.phases:
            if t <= ph.t1:
                pos, vel, acc = ph.fn(t - ph.t0)
                return control.Setpoint(pos=pos, vel=vel, acc=acc)
        pos, vel, acc = self.phases[-1].fn(self.phases[-1].t1 - self.phases[-1].t0)
        return control.Setpoint(pos=pos, vel=vel, acc=acc)


def _hold(p):
    p = np.array(p, dtype=float)
    return lambda tl: (p, np.zeros(3), np.zeros(3))


def _vertical_ramp(xy, z0, z1, duration):
    xy = np.array(xy, dtype=float)

    def fn(tl):
        u = min(max(tl / duration, 0.0), 1.0)
        s, ds, dds = _smoothstep(u)
        z = z0 + (z1 - z0) * s
        return (
            np.array([xy[0], xy[1], z]),
            np.array([0.0, 0.0, (z1 - z0) * ds / duration]),
            np.array([0.0, 0.0, (z1 - z0) * dds / duration**2]),
        )

    return fn


def _orbit(entry, semi_x, semi_y, freq):
    """Ellipse through the entry point (circle when semi_x == semi_y)."""
    entry = np.array(entry, dtype=float)
    center = entry - np.array([semi_x, 0.0, 0.0])
    w = 2.0 * math.pi * freq

    def fn(tl):
        th = w * tl
        pos = center + np.array([semi_x * math.cos(th), semi_y * math.sin(th), 0.0])
        vel = np.array([-semi_x * w * math.sin(th), semi_y * w * math.cos(th), 0.0])
        acc = np.array([-semi_x * w * w * math.cos(th), -semi_y * w * w * math.sin(th), 0.0])
        return pos, vel, acc

    return fn


def mission_trajectory(
    altitude=1.0,
    takeoff=3.0,
    hover_before=2.0,
    orbit_duration=15.0,
    hover_after=2.0,
    landing=3.0,
    semi_x=0.0,
    semi_y=0.0,
    freq=0.1,
    origin=(0.0, 0.0),
):
    """Takeoff / hover / orbit / hover / land profile used by the flight
    scenarios. A zero semi_x keeps the orbit degenerate (pure hover)."""
    origin = np.array([origin[0], origin[1]], dtype=float)
    top = np.array([origin[0], origin[1], altitude])
    t1 = takeoff
    t2 = t1 + hover_before
    t3 = t2 + orbit_duration
    t4 = t3 + hover_after
    t5 = t4 + landing
    phases = [
        Phase(0.0, t1, _vertical_ramp(origin, 0.0, altitude, takeoff)),
        Phase(t1, t2, _hold(top)),
    ]
    if semi_x > 0.0:
        orbit_fn = _orbit(top, semi_x, semi_y if semi_y > 0.0 else semi_x, freq)
        phases.append(Phase(t2, t3, orbit_fn))
        exit_pos, _, _ = orbit_fn(orbit_duration)
    else:
        phases.append(Phase(t2, t3, _hold(top)))
        exit_pos = top
    phases.append(Phase(t3, t4, _hold(exit_pos)))
    phases.append(
        Phase(t4, t5, _vertical_ramp(exit_pos[:2], exit_pos[2], 0.0, landing))
    )
    return ReferenceTrajectory(phases)


def hover_trajectory(p, duration):
    return ReferenceTrajectory([Phase(0.0, duration, _hold(p))])


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    """One reproducible experiment: plant kind, initial state, reference."""

    name: str
    kind: str                      # bicopter-cw | bicopter-ccw | quadcopter | quad-split
    initial: vehicle.RigidBodyState
    trajectory: ReferenceTrajectory
    duration: float
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    ground: bool = True            # z=0 supports the vehicle (launch pad)
    prelatched: bool = False       # scenario starts mid-flight, mode already known
    failure_time: float = None     # cut failure_motors at this time (fault test)
    failure_motors: tuple = (2, 4) # motor numbers to cut
    recovery_radius: float = None  # success ball for recovery scenarios
    recovery_window: float = None  # s, must enter the ball by then and stay


def bicopter_circle_scenario(
    radius=0.5,
    freq=0.1,
    altitude=1.0,
    launch_spin=10.0,
    noise=None,
    seed=0,
    handedness=1,
):
    """25 s takeoff / hover / circle / land from the spinning launch pad."""
    traj = mission_trajectory(altitude=altitude, semi_x=radius, semi_y=radius, freq=freq)
    return Scenario(
        name="bicopter_circle",
        kind="bicopter-cw" if handedness == 1 else "bicopter-ccw",
        initial=vehicle.RigidBodyState.resting(yaw_rate=launch_spin * handedness),
        trajectory=traj,
        duration=traj.t_end,
        noise=noise or NoiseSpec(),
        seed=seed,
    )


def bicopter_hover_scenario(duration=10.0, altitude=1.0, spin=35.0, noise=None, seed=0):
    """In-flight hover at the equilibrium spin, starting exactly on setpoint."""
    return Scenario(
        name="bicopter_hover",
        kind="bicopter-cw",
        initial=vehicle.RigidBodyState.resting(p=(0.0, 0.0, altitude), yaw_rate=spin),
        trajectory=hover_trajectory((0.0, 0.0, altitude), duration),
        duration=duration,
        noise=noise or NoiseSpec(),
        seed=seed,
        ground=False,
        prelatched=True,
    )


def quad_ellipse_scenario(
    semi_x=0.3, semi_y=0.2, freq=1.0 / 3.0, altitude=1.0, split=False, noise=None, seed=0
):
    """25 s takeoff / hover / ellipse / land from a stationary start."""
    traj = mission_trajectory(altitude=altitude, semi_x=semi_x, semi_y=semi_y, freq=freq)
    return Scenario(
        name="quad_split_ellipse" if split else "quad_ellipse",
        kind="quad-split" if split else "quadcopter",
        initial=vehicle.RigidBodyState.resting(),
        trajectory=traj,
        duration=traj.t_end,
        noise=noise or NoiseSpec(),
        seed=seed,
    )


def launch_spin_scenario(rate=10.0, duration=10.0, altitude=1.0, noise=None, seed=0):
    """Bicopter released from the rotating launch platform at the given rate."""
    traj = ReferenceTrajectory(
        [
            Phase(0.0, 3.0, _vertical_ramp((0.0, 0.0), 0.0, altitude, 3.0)),
            Phase(3.0, duration, _hold((0.0, 0.0, altitude))),
        ]
    )
    return Scenario(
        name=f"launch_spin",
        kind="bicopter-cw",
        initial=vehicle.RigidBodyState.resting(yaw_rate=rate),
        trajectory=traj,
        duration=duration,
        noise=noise or NoiseSpec(),
        seed=seed,
    )


def hand_throw_scenario(
    spin=26.0,
    tilt=0.2,
    tilt_direction=0.0,
    velocity=(1.0, 0.0, 0.5),
    altitude=1.5,
    duration=8.0,
    noise=None,
    seed=0,
):
    """Free mid-air launch; success is holding near the throw point."""
    q = quat_from_tilt(tilt * math.cos(tilt_direction), tilt * math.sin(tilt_direction))
    initial = vehicle.RigidBodyState(
        p=np.array([0.0, 0.0, altitude]),
        v=np.array(velocity, dtype=float),
        q=q,
        omega=np.array([0.0, 0.0, spin]),
    )
    return Scenario(
        name="hand_throw",
        kind="bicopter-cw",
        initial=initial,
        trajectory=hover_trajectory((0.0, 0.0, altitude), duration),
        duration=duration,
        noise=noise or NoiseSpec(),
        seed=seed,
        ground=False,
        recovery_radius=0.3,
        recovery_window=5.0,
    )


def quad_failure_scenario(failure_time=2.0, duration=10.0, altitude=1.0, seed=0, motors=(2, 4)):
    """Split-brain hover with motors cut mid-flight; must trip crash detection.

    Cutting the whole CCW pair (2, 4) leaves the tilt balanced, so the quad
    yaws up and falls out of the sky; cutting a single motor tips it over.
    Either way the crash detector must fire.
    """
    return Scenario(
        name="quad_failure",
        kind="quad-split",
        initial=vehicle.RigidBodyState.resting(p=(0.0, 0.0, altitude)),
        trajectory=hover_trajectory((0.0, 0.0, altitude), duration),
        duration=duration,
        seed=seed,
        ground=False,
        prelatched=True,
        failure_time=failure_time,
        failure_motors=tuple(motors),
    )


# ---------------------------------------------------------------------------
# logging


LOG_COLUMNS = [
    "t_s",
    "px_m", "py_m", "pz_m",
    "vx_mps", "vy_mps", "vz_mps",
    "qw", "qx", "qy", "qz",
    "omx_radps", "omy_radps", "omz_radps",
    "tiltx_rad", "tilty_rad",
    "tiltx_filt_rad", "tilty_filt_rad",
    "tiltx_sp_rad", "tilty_sp_rad",
    "yaw_rad", "yaw_est_rad",
    "ref_px_m", "ref_py_m", "ref_pz_m",
    "f1_n", "f2_n", "f3_n", "f4_n",
    "thrust_n", "diff_moment_nm",
    "torque_x_nm", "torque_y_nm",
    "mode", "deadzone_active", "tilt_sp_saturated", "thrust_limited",
]
_N_NUMERIC = len(LOG_COLUMNS) - 4  # trailing mode + three flags


@dataclass
class SimLog:
    """One row per outer control tick, fixed column order."""

    numeric: np.ndarray           # (n, _N_NUMERIC)
    mode: list                    # str per row
    flags: np.ndarray             # (n, 3) ints

    def column(self, name):
        i = LOG_COLUMNS.index(name)
        if i < _N_NUMERIC:
            return self.numeric[:, i]
        if name == "mode":
            return self.mode
        return self.flags[:, i - _N_NUMERIC - 1]

    def __len__(self):
        return len(self.mode)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(LOG_COLUMNS) + "\n")
            for k in range(len(self.mode)):
                nums = ",".join(f"{x:.6g}" for x in self.numeric[k])
                flg = ",".join(str(int(x)) for x in self.flags[k])
                fh.write(f"{nums},{self.mode[k]},{flg}\n")


@dataclass
class FlightMetrics:
    rms_horizontal: float
    rms_vertical: float
    duty_cycle: float
    crashed: bool
    crash_time: float = None
    final_yaw_rate: float = 0.0
    detected_mode: str = "none"
    mode_mismatch: bool = False
    recovered: bool = None
    recovery_time: float = None

    def as_dict(self):
        return {
            "rms_horizontal_m": self.rms_horizontal,
            "rms_vertical_m": self.rms_vertical,
            "control_duty_cycle": self.duty_cycle,
            "crashed": self.crashed,
            "crash_time_s": self.crash_time,
            "final_yaw_rate_radps": self.final_yaw_rate,
            "detected_mode": self.detected_mode,
            "mode_mismatch": self.mode_mismatch,
            "recovered": self.recovered,
            "recovery_time_s": self.recovery_time,
        }

    def to_json(self, scenario_name, seed):
        payload = {"scenario": scenario_name, "seed": seed}
        payload.update(self.as_dict())
        return json.dumps(payload, indent=2, sort_keys=False)


def compute_metrics(log, scenario):
    """RMS tracking errors, control duty, and scenario bookkeeping."""
    ex = log.column("px_m") - log.column("ref_px_m")
    ey = log.column("py_m") - log.column("ref_py_m")
    ez = log.column("pz_m") - log.column("ref_pz_m")
    rms_h = float(np.sqrt(np.mean(ex**2 + ey**2)))
    rms_v = float(np.sqrt(np.mean(ez**2)))

    modes = np.array(log.mode)
    bicopter_ticks = modes == FlightMode.BICOPTER.value
    if np.any(bicopter_ticks):
        active = 1 - log.flags[bicopter_ticks, 0]  # deadzone_active == 0
        duty = float(np.mean(active))
        detected = FlightMode.BICOPTER.value
    elif np.any(modes == FlightMode.QUADCOPTER.value):
        duty = 0.0
        detected = FlightMode.QUADCOPTER.value
    else:
        duty = 0.0
        detected = "none"

    expect_bicopter = scenario.kind.startswith("bicopter")
    mismatch = detected != "none" and (
        (detected == FlightMode.BICOPTER.value) != expect_bicopter
    )

    recovered = None
    recovery_time = None
    if scenario.recovery_radius is not None:
        target = scenario.trajectory.setpoint(scenario.duration).pos
        err = np.sqrt(
            (log.column("px_m") - target[0]) ** 2
            + (log.column("py_m") - target[1]) ** 2
            + (log.column("pz_m") - target[2]) ** 2
        )
        inside = err <= scenario.recovery_radius
        t = log.column("t_s")
        recovered = False
        # must enter the ball within the window and stay inside afterwards
        for k in range(len(inside)):
            if t[k] > scenario.recovery_window:
                break
            if inside[k] and np.all(inside[k:]):
                recovered = True
                recovery_time = float(t[k])
                break

    return FlightMetrics(
        rms_horizontal=rms_h,
        rms_vertical=rms_v,
        duty_cycle=duty,
        crashed=False,
        final_yaw_rate=float(log.column("omz_radps")[-1]),
        detected_mode=detected,
        mode_mismatch=bool(mismatch),
        recovered=recovered,
        recovery_time=recovery_time,
    )


# ---------------------------------------------------------------------------
# the run loop


@dataclass
class VehicleFleet:
    """Plant parameter sets for every configuration the firmware may fly."""

    bicopter_cw: vehicle.VehicleParams
    bicopter_ccw: vehicle.VehicleParams
    quad: vehicle.VehicleParams

    @classmethod
    def default(cls, **overrides):
        return cls(
            bicopter_cw=vehicle.bicopter_params(1, **overrides),
            bicopter_ccw=vehicle.bicopter_params(-1, **overrides),
            quad=vehicle.quadcopter_params(**overrides),
        )

    def plant(self, kind):
        if kind == "bicopter-cw":
            return self.bicopter_cw
        if kind == "bicopter-ccw":
            return self.bicopter_ccw
        if kind in ("quadcopter", "quad-split"):
            return self.quad
        raise ValueError(f"unknown vehicle kind {kind!r}")


class _Feedback:
    """Delayed tracking-system view of the truth state."""

    def __init__(self, latency):
        self.delay_ticks = int(round(latency / OUTER_DT))
        self.buffer = []

    def push(self, snapshot):
        self.buffer.append(snapshot)

    def current(self):
        idx = max(0, len(self.buffer) - 1 - self.delay_ticks)
        return self.buffer[idx]


def run_scenario(scenario, fleet=None, gains=None):
    """Closed-loop rollout of one scenario; returns (SimLog, FlightMetrics)."""
    fleet = fleet or VehicleFleet.default()
    gains = gains or control.default_gains()
    params = fleet.plant(scenario.kind)
    control.validate_gains(gains, fleet.bicopter_cw)

    seq = np.random.SeedSequence(scenario.seed)
    rng_pos, rng_gyro_a, rng_gyro_b = (
        np.random.default_rng(s) for s in seq.spawn(3)
    )
    noise = scenario.noise

    detector = control.ModeDetector()
    feedback = _Feedback(noise.latency)
    state = scenario.initial.as_vector().copy()
    thrust_act = np.zeros(params.n_propellers)
    if scenario.prelatched:
        detector.mode = (
            FlightMode.BICOPTER
            if scenario.kind.startswith("bicopter")
            else FlightMode.QUADCOPTER
        )
        thrust_act[:] = params.hover_thrust  # motors already spinning in flight

    n_ticks = int(round(scenario.duration / OUTER_DT))
    numeric = np.zeros((n_ticks, _N_NUMERIC))
    mode_col = []
    flags = np.zeros((n_ticks, 3), dtype=int)

    ctrl = None
    mode = None
    crashed = False
    crash_time = None
    zero_cmd = np.zeros(params.n_propellers)

    def gyro(rng):
        return state[10:13] + noise.gyro_bias + noise.gyro_sigma * rng.standard_normal(3)

    def make_controller(detected):
        if detected == FlightMode.BICOPTER:
            unit = fleet.plant(scenario.kind) if scenario.kind.startswith("bicopter") else fleet.bicopter_cw
            return control.BicopterController(unit, gains, OUTER_DT, INNER_DT)
        if scenario.kind == "quad-split":
            return control.SplitBrainController(fleet.quad, gains, OUTER_DT)
        return control.QuadController(fleet.quad, gains, OUTER_DT)

    def plant_thrusts(quad_cmd):
        """Map a 4-motor quad command onto this plant's actual motors."""
        if params.n_propellers == 4:
            return quad_cmd
        own = [p.index - 1 for p in params.propellers]  # quad motor slots
        return quad_cmd[own]

    last_cmd = zero_cmd
    for k in range(n_ticks):
        t = k * OUTER_DT
        rot = vehicle._rotation(state[6:10])
        feedback.push(
            {
                "p": state[0:3].copy(),
                "v": state[3:6].copy(),
                "rot": rot,
                "tilt": np.array(tilt_from_rotation(rot)) if rot[2][2] > 0.0 else np.zeros(2),
                "yaw": math.atan2(rot[1][0], rot[0][0]),
            }
        )
        fb = feedback.current()
        pos_meas = fb["p"] + noise.pos_sigma * rng_pos.standard_normal(3)
        omega_a = gyro(rng_gyro_a)
        omega_b = gyro(rng_gyro_b) if scenario.kind == "quad-split" else omega_a

        if mode is None:
            mode = detector.update(t, omega_a[2])
            if mode is not None:
                ctrl = make_controller(mode)

        setpoint = scenario.trajectory.setpoint(t)
        out = None
        if mode is FlightMode.BICOPTER:
            out = ctrl.outer_update(pos_meas, fb["v"], fb["tilt"], setpoint)
        elif mode is FlightMode.QUADCOPTER:
            if scenario.kind == "quad-split":
                fb_a = (pos_meas, fb["v"], fb["rot"], omega_a)
                fb_b = (pos_meas, fb["v"], fb["rot"], omega_b)
                last_cmd = plant_thrusts(ctrl.outer_update(fb_a, fb_b, setpoint))
                out = ctrl.a.out
            else:
                last_cmd = plant_thrusts(
                    ctrl.outer_update(pos_meas, fb["v"], fb["rot"], omega_a, setpoint)
                )
                out = ctrl.out

        # ---- log record (truth + controller internals) ----
        rot_now = rot
        try:
            tilt_now = np.array(tilt_from_rotation(rot_now))
        except Exception:
            tilt_now = np.array([math.nan, math.nan])
        yaw_now = math.atan2(rot_now[1][0], rot_now[0][0])
        motors = np.zeros(4)
        row_sp = np.zeros(2)
        row_filt = tilt_now
        row_thrust = 0.0
        row_u = 0.0
        row_tau = np.zeros(2)
        dz_active = True
        sp_sat = False
        th_lim = False
        yaw_est = yaw_now
        if mode is FlightMode.BICOPTER:
            row_sp = out.tilt_sp
            row_filt = out.tilt_filtered
            row_thrust = out.thrust
            row_tau = out.torque_xy
            dz_active = out.deadzone_active
            sp_sat = out.tilt_sp_saturated
            th_lim = out.thrust_limited
            yaw_est = ctrl.yaw_est.yaw
        elif mode is FlightMode.QUADCOPTER:
            row_sp = out.tilt_sp
            row_thrust = out.thrust
            row_tau = out.torque[0:2]
            dz_active = False
            th_lim = out.thrust_limited
        numeric[k] = [
            t,
            *state[0:3], *state[3:6], *state[6:10], *state[10:13],
            *tilt_now, *row_filt, *row_sp,
            yaw_now, yaw_est,
            *setpoint.pos,
            *motors,  # filled below once the inner loop ran
            row_thrust, row_u, *row_tau,
        ]
        mode_col.append(mode.value if mode is not None else "detecting")
        flags[k] = [int(dz_active), int(sp_sat), int(th_lim)]

        # ---- two inner ticks ----
        for j in range(INNER_PER_OUTER):
            t_in = t + j * INNER_DT
            if j > 0:
                omega_a = gyro(rng_gyro_a)
                if scenario.kind == "quad-split":
                    gyro(rng_gyro_b)  # board B samples too
                if mode is None:
                    mode = detector.update(t_in, omega_a[2])
                    if mode is not None:
                        ctrl = make_controller(mode)

            if mode is FlightMode.BICOPTER and out is not None:
                cmd = ctrl.inner_update(
                    omega_a[2], yaw_fix=fb["yaw"] if j == 0 else None, t=t_in
                )
                last_cmd = cmd
            elif mode is None:
                last_cmd = zero_cmd

            cmd_now = last_cmd.copy()
            if scenario.failure_time is not None and t_in >= scenario.failure_time:
                for i, p in enumerate(params.propellers):
                    if p.index in scenario.failure_motors:
                        cmd_now[i] = 0.0

            status = vehicle.core.advance(
                state,
                np.clip(cmd_now, params.thrust_min, params.thrust_max),
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
                PHYSICS_DT,
                STEPS_PER_INNER,
                scenario.ground,
            )
            bad = status != 0 or not np.all(np.isfinite(state))
            if not bad:
                bad = (
                    np.linalg.norm(state[0:3]) > vehicle.POSITION_BOUND
                    or tilt_angle(state[6:10]) > CRASH_TILT
                    or (not scenario.ground and state[2] < 0.0)
                )
            if bad:
                crashed = True
                crash_time = t_in + INNER_DT
                break

        # write the motors actually applied during this tick
        for i, p in enumerate(params.propellers):
            numeric[k, 25 + (p.index - 1)] = last_cmd[i]
        numeric[k, 30] = (
            ctrl.out.diff_moment if mode is FlightMode.BICOPTER and ctrl else 0.0
        )
        if crashed:
            numeric = numeric[: k + 1]
            flags = flags[: k + 1]
            break

    log = SimLog(numeric=numeric, mode=mode_col[: len(numeric)], flags=flags)
    metrics = compute_metrics(log, scenario)
    metrics.crashed = crashed
    metrics.crash_time = crash_time
    if crashed and scenario.recovery_radius is not None:
        metrics.recovered = False
    return log, metrics
