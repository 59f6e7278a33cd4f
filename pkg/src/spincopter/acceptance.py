"""Acceptance battery: every release criterion with its pinned tolerance.

Each criterion returns a CriterionResult; run_all() executes the battery in
order. The same functions back tests/test_acceptance.py and the `suite`
CLI command, which prints one pass/fail line per criterion.
"""

import hashlib
import math
import time
from dataclasses import dataclass

import numpy as np

from spincopter import analysis, control, harness, vehicle
from spincopter.mathcore import rk4_step


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _default_setup(fleet=None, gains=None):
    return fleet or harness.VehicleFleet.default(), gains or control.default_gains()


def relaxed_hover_convergence(fleet=None, gains=None):
    """Open-loop plant with equilibrium thrusts reaches the analytic spin
    rate within 1% in 10 s of simulated time (< 5 s wall clock)."""
    fleet, _ = _default_setup(fleet, gains)
    params = fleet.bicopter_cw
    target = analysis.equilibrium_yaw_rate(params)
    hover = np.full(2, params.hover_thrust)
    t0 = time.time()
    trace = vehicle.simulate(
        vehicle.RigidBodyState.resting(p=(0, 0, 1.0)),
        lambda t, s: hover,
        params,
        10.0,
    )
    wall = time.time() - t0
    spin = trace.states[-1][12]
    rel = abs(spin - target) / abs(target)
    ok = rel < 0.01 and wall < 5.0
    return CriterionResult(
        "relaxed_hover_convergence",
        ok,
        f"spin(10s) = {spin:.3f} vs {target:.3f} rad/s, rel err {rel:.2%} "
        f"(< 1%), wall {wall:.2f} s (< 5 s)",
    )


def precession_oracle(fleet=None, gains=None):
    """Free reduced model rotates the tilt-rate vector at I_z*spin/I_d
    within 0.5% of the closed-form rate."""
    fleet, _ = _default_setup(fleet, gains)
    params = fleet.bicopter_cw
    drag_free = vehicle.bicopter_params(
        drag_v=0.0,
        drag_h=params.drag_h,
        torque_to_thrust=params.torque_to_thrust,
    )
    omega_p = analysis.precession_rate(drag_free)
    state0 = analysis.ReducedAttitudeState(
        tilt=np.zeros(2),
        tilt_rate=np.array([0.1, 0.0]),
        yaw=0.0,
        spin_rate=analysis.equilibrium_yaw_rate(drag_free),
    )
    t, _, rates = analysis.integrate_reduced(
        state0, lambda tt, st: np.zeros(2), drag_free, 0.5, dt=1e-4
    )
    angle = np.unwrap(np.arctan2(rates[:, 1], rates[:, 0]))
    slope = float(np.polyfit(t, angle, 1)[0])
    rel = abs(slope - omega_p) / abs(omega_p)
    ok = rel < 0.005
    return CriterionResult(
        "precession_oracle",
        ok,
        f"measured {slope:.3f} vs {omega_p:.3f} rad/s ({rel:.3%} < 0.5%)",
    )


def routh_grid_agreement(fleet=None, gains=None):
    """Routh-Hurwitz verdicts match the eigenvalue oracle on a 50x50 gain
    grid for both spin directions, outside the marginal band."""
    fleet, _ = _default_setup(fleet, gains)
    params = fleet.bicopter_cw
    kp_grid = np.linspace(-5e-3, 5e-3, 50)
    kd_grid = np.linspace(-1e-4, 1e-4, 50)
    rows = analysis.stability_map(kp_grid, kd_grid, params, deltas=(1, -1))
    checked = 0
    disagreements = 0
    for kp, kd, delta, verdict, eig in rows:
        if verdict == analysis.StabilityVerdict.MARGINAL.value:
            continue
        checked += 1
        eig_stable = eig < 0.0
        if eig_stable != (verdict == analysis.StabilityVerdict.STABLE.value):
            disagreements += 1
    ok = checked > 0 and disagreements == 0
    return CriterionResult(
        "routh_hurwitz_vs_eigenvalues",
        ok,
        f"{checked} grid points checked (both spins), {disagreements} disagreements",
    )


def allocation_identity(fleet=None, gains=None, n_cases=100):
    """Cycle-averaged allocated torque reproduces the command to 1e-10
    relative; the projection leftover is zero-mean with bounded peak."""
    rng = np.random.default_rng(12345)
    yaw = np.linspace(0.0, 4.0 * math.pi, 4096, endpoint=False)  # 2 full cycles
    worst_mean = 0.0
    worst_leftover_mean = 0.0
    leftover_peak_ok = True
    for _ in range(n_cases):
        tau = rng.uniform(-1e-3, 1e-3, size=2)
        u = np.array([control.allocate_cyclic(tau, y) for y in yaw])
        realized = u[:, None] * np.column_stack([np.cos(yaw), np.sin(yaw)])
        mean = realized.mean(axis=0)
        worst_mean = max(worst_mean, float(np.linalg.norm(mean - tau) / np.linalg.norm(tau)))
        leftover = np.array([control.allocation_leftover(tau, y) for y in yaw])
        worst_leftover_mean = max(worst_leftover_mean, float(np.abs(leftover.mean(axis=0)).max()))
        if np.linalg.norm(leftover, axis=1).max() > np.linalg.norm(tau) + 1e-15:
            leftover_peak_ok = False
    ok = worst_mean < 1e-10 and worst_leftover_mean < 1e-12 and leftover_peak_ok
    return CriterionResult(
        "cycle_average_allocation_identity",
        ok,
        f"worst mean error {worst_mean:.2e} (< 1e-10), leftover mean {worst_leftover_mean:.1e}, "
        f"peak bound {'ok' if leftover_peak_ok else 'VIOLATED'} over {n_cases} cases",
    )


def reduced_vs_full(fleet=None, gains=None):
    """Reduced gyroscope tracks the lag-free plant under the same commanded
    torque sequence to better than 0.01 rad over 1 s."""
    params = vehicle.bicopter_params(motor_time_constant=0.0)
    dev, flagged = analysis.linearization_error(
        params,
        (0.05, 0.0),
        duration=1.0,
        torque_fn=lambda t: 3e-5 * np.array([math.cos(2.0 * t), math.sin(2.0 * t)]),
    )
    ok = dev < 0.01 and not flagged
    return CriterionResult(
        "reduced_vs_full_agreement",
        ok,
        f"max tilt deviation {dev:.4f} rad (< 0.01), envelope flag {flagged}",
    )


def bicopter_flight(fleet=None, gains=None, scenario=None):
    """25 s takeoff/hover/circle/land at zero noise: uncrashed, horizontal
    RMS <= 0.157 m and vertical RMS <= 0.088 m, under 30 s wall clock."""
    fleet, gains = _default_setup(fleet, gains)
    scenario = scenario or harness.bicopter_circle_scenario(seed=1)
    t0 = time.time()
    _, m = harness.run_scenario(scenario, fleet, gains)
    wall = time.time() - t0
    ok = (
        not m.crashed
        and m.rms_horizontal <= 0.157
        and m.rms_vertical <= 0.088
        and wall < 30.0
    )
    return CriterionResult(
        "bicopter_flight_rms",
        ok,
        f"crashed={m.crashed}, rms_h={m.rms_horizontal:.3f} m (<= 0.157), "
        f"rms_v={m.rms_vertical:.3f} m (<= 0.088), duty={m.duty_cycle:.2f}, wall {wall:.1f} s",
    )


def quad_flights(fleet=None, gains=None, single=None, split=None):
    """Quad ellipse at zero noise, single- and split-brain: RMS bounds
    0.097/0.076 m and bit-identical logs between the two."""
    fleet, gains = _default_setup(fleet, gains)
    single = single or harness.quad_ellipse_scenario(seed=1)
    split = split or harness.quad_ellipse_scenario(split=True, seed=1)
    log_a, ma = harness.run_scenario(single, fleet, gains)
    log_b, mb = harness.run_scenario(split, fleet, gains)
    bitexact = np.array_equal(log_a.numeric, log_b.numeric) and np.array_equal(
        log_a.flags, log_b.flags
    )
    ok = (
        not ma.crashed
        and not mb.crashed
        and ma.rms_horizontal <= 0.097
        and ma.rms_vertical <= 0.076
        and mb.rms_horizontal <= 0.097
        and mb.rms_vertical <= 0.076
        and bitexact
    )
    return CriterionResult(
        "quadcopter_flight_rms_and_split_brain",
        ok,
        f"single rms=({ma.rms_horizontal:.3f},{ma.rms_vertical:.3f}) m, "
        f"split rms=({mb.rms_horizontal:.3f},{mb.rms_vertical:.3f}) m "
        f"(<= 0.097/0.076), bit-exact={bitexact}",
    )


def mode_detection(fleet=None, gains=None):
    """Spin launch at 10 rad/s latches bicopter; stationary and exactly-at-
    threshold launches latch quadcopter."""
    fleet, gains = _default_setup(fleet, gains)
    results = []
    _, m10 = harness.run_scenario(harness.launch_spin_scenario(10.0, duration=2.0), fleet, gains)
    results.append(m10.detected_mode == "bicopter")
    _, m0 = harness.run_scenario(
        harness.quad_ellipse_scenario(seed=0), fleet, gains
    )
    results.append(m0.detected_mode == "quadcopter")
    _, mb = harness.run_scenario(
        harness.launch_spin_scenario(8.7, duration=2.0), fleet, gains
    )
    results.append(mb.detected_mode == "quadcopter" and mb.mode_mismatch)
    ok = all(results)
    return CriterionResult(
        "mode_detection",
        ok,
        f"10 rad/s -> {m10.detected_mode}, stationary -> {m0.detected_mode}, "
        f"8.7 rad/s boundary -> {mb.detected_mode} (strict threshold)",
    )


def hand_throw_recovery(fleet=None, gains=None, n_seeds=20):
    """20 hand-throw seeds (26 rad/s spin, tilt up to 0.3 rad, realistic
    noise) must recover to a 0.3 m hold within 5 s at >= 90% rate."""
    fleet, gains = _default_setup(fleet, gains)
    rng = np.random.default_rng(2024)
    recovered = 0
    times = []
    for seed in range(n_seeds):
        tilt = float(rng.uniform(0.0, 0.3))
        direction = float(rng.uniform(0.0, 2.0 * math.pi))
        sc = harness.hand_throw_scenario(
            spin=26.0,
            tilt=tilt,
            tilt_direction=direction,
            velocity=(1.0, 0.0, 0.5),
            noise=harness.realistic_noise(),
            seed=seed,
        )
        _, m = harness.run_scenario(sc, fleet, gains)
        if m.recovered:
            recovered += 1
            times.append(m.recovery_time)
    rate = recovered / n_seeds
    ok = rate >= 0.9
    return CriterionResult(
        "hand_throw_recovery",
        ok,
        f"{recovered}/{n_seeds} recovered within 5 s ({rate:.0%}, need >= 90%)",
    )


def conservation_and_determinism(fleet=None, gains=None):
    """Drag-free free body conserves momentum and energy to 0.1% over 10 s,
    RK4 shows 4th-order convergence, and repeated runs hash identically."""
    fleet, gains = _default_setup(fleet, gains)
    params = vehicle.bicopter_params(
        drag_h=0.0, drag_v=0.0, gravity=0.0, motor_time_constant=0.0
    )
    state0 = vehicle.RigidBodyState(
        p=np.zeros(3),
        v=np.zeros(3),
        q=np.array([1.0, 0.0, 0.0, 0.0]),
        omega=np.array([2.0, -1.0, 30.0]),
    )
    trace = vehicle.simulate(state0, lambda t, s: np.zeros(2), params, 10.0)
    inertia = params.inertia

    def momentum_energy(vec):
        st = vehicle.RigidBodyState.from_vector(vec)
        rot = vehicle._rotation(st.q)
        ell = rot @ (inertia @ st.omega)
        ke = 0.5 * float(st.omega @ (inertia @ st.omega))
        return ell, ke

    l0, e0 = momentum_energy(trace.states[0])
    l1, e1 = momentum_energy(trace.states[-1])
    mom_err = float(np.linalg.norm(l1 - l0) / np.linalg.norm(l0))
    en_err = abs(e1 - e0) / e0

    # RK4 order from the global error on x' = -10 x over [0, 1]
    errors = []
    steps = [50, 100, 200, 400]
    for n in steps:
        dt = 1.0 / n
        x = np.array([1.0])
        for k in range(n):
            x = rk4_step(lambda t, s: -10.0 * s, x, k * dt, dt)
        errors.append(abs(float(x[0]) - math.exp(-10.0)))
    slope = -np.polyfit(np.log(steps), np.log(errors), 1)[0]

    def log_hash():
        log, _ = harness.run_scenario(harness.bicopter_circle_scenario(seed=42), fleet, gains)
        blob = log.numeric.tobytes() + log.flags.tobytes() + "".join(log.mode).encode()
        return hashlib.sha256(blob).hexdigest()

    h1, h2 = log_hash(), log_hash()
    ok = (
        mom_err < 1e-3
        and en_err < 1e-3
        and abs(slope - 4.0) <= 0.2
        and h1 == h2
    )
    return CriterionResult(
        "conservation_convergence_determinism",
        ok,
        f"momentum drift {mom_err:.2e}, energy drift {en_err:.2e} (< 1e-3), "
        f"RK4 order {slope:.2f} (4.0 +/- 0.2), log hashes {'match' if h1 == h2 else 'DIFFER'}",
    )


ALL_CRITERIA = [
    relaxed_hover_convergence,
    precession_oracle,
    routh_grid_agreement,
    allocation_identity,
    reduced_vs_full,
    bicopter_flight,
    quad_flights,
    mode_detection,
    hand_throw_recovery,
    conservation_and_determinism,
]


def run_all(fleet=None, gains=None, only=None):
    results = []
    for fn in ALL_CRITERIA:
        if only is not None and fn.__name__ not in only:
            continue
        results.append(fn(fleet, gains))
    return results
