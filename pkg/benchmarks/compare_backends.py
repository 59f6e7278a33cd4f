#!/usr/bin/env python3
"""Benchmark the compiled physics kernel against the pure-Python twin.

Measures raw integration throughput (RK4 steps/s on the bicopter plant) and
the wall time of a full 25 s closed-loop flight scenario per backend.

Run:  python benchmarks/compare_backends.py
"""

import time

import numpy as np


def bench_kernel(kernel, params, n_steps=200_000):
    state = np.concatenate(
        [np.zeros(3), np.zeros(3), [1.0, 0.0, 0.0, 0.0], [0.5, -0.2, 20.0]]
    )
    cmd = np.full(params.n_propellers, params.hover_thrust)
    act = np.zeros(params.n_propellers)
    chunk = 1000
    t0 = time.perf_counter()
    done = 0
    while done < n_steps:
        kernel.advance(
            state, cmd, act,
            params.prop_positions, params.prop_yaw_signs,
            params.mass, params.gravity,
            params.inertia_roll, params.inertia_pitch, params.inertia_axial,
            params.torque_to_thrust, params.drag_h, params.drag_v,
            params.motor_time_constant, 5e-4, chunk, False,
        )
        done += chunk
    dt = time.perf_counter() - t0
    return n_steps / dt


def bench_scenario(fleet, gains):
    from spincopter import harness

    t0 = time.perf_counter()
    _, metrics = harness.run_scenario(
        harness.bicopter_circle_scenario(seed=1), fleet, gains
    )
    return time.perf_counter() - t0, metrics


def main():
    from spincopter import _core_py, control, harness, vehicle

    try:
        from spincopter import _core
    except ImportError:
        _core = None

    params = vehicle.bicopter_params()
    fleet = harness.VehicleFleet.default()
    gains = control.default_gains()

    print(f"{'backend':<10} {'RK4 steps/s':>14} {'25 s flight':>12}")
    rows = [("python", _core_py)]
    if _core is not None:
        rows.insert(0, ("compiled", _core))
    rates = {}
    for name, kernel in rows:
        steps = 200_000 if name == "compiled" else 20_000
        rate = bench_kernel(kernel, params, steps)
        rates[name] = rate

        # route the whole package through this kernel for the flight run
        import spincopter.core as core

        saved = (core.advance, core.derivative)
        core.advance, core.derivative = kernel.advance, kernel.derivative
        try:
            wall, metrics = bench_scenario(fleet, gains)
        finally:
            core.advance, core.derivative = saved
        print(f"{name:<10} {rate:>14,.0f} {wall:>11.2f}s   (crashed={metrics.crashed})")
    if len(rates) == 2:
        print(f"speedup: {rates['compiled'] / rates['python']:.1f}x")


if __name__ == "__main__":
    main()
