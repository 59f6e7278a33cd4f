"""Command-line entry point: simulate / analyze / suite.

Exit codes: 0 success, 1 configuration error, 2 crashed flight,
3 acceptance-suite failure.
"""

import argparse
import os
import sys

import numpy as np

from spincopter import acceptance, analysis, config as config_mod


def _load(args, validate=True):
    return config_mod.load_config(
        path=args.config, preset=args.preset, validate=validate
    )


def cmd_simulate(args):
    try:
        cfg = _load(args)
        scenario = cfg.scenario(args.scenario, seed=args.seed)
    except config_mod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    from spincopter import harness

    fleet = cfg.fleet()
    gains = cfg.gains()
    log, metrics = harness.run_scenario(scenario, fleet, gains)

    out_dir = args.out or cfg[("output", "directory")]
    os.makedirs(out_dir, exist_ok=True)
    stem = f"{scenario.name}_{args.seed}"
    if cfg[("output", "write_csv")]:
        log.to_csv(os.path.join(out_dir, stem + ".csv"))
    summary = metrics.to_json(scenario.name, args.seed)
    if cfg[("output", "write_metrics")]:
        with open(os.path.join(out_dir, stem + "_metrics.json"), "w") as fh:
            fh.write(summary + "\n")
    print(summary)
    return 2 if metrics.crashed else 0


def cmd_analyze(args):
    try:
        cfg = _load(args, validate=False)
    except config_mod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    fleet = cfg.fleet()
    params = fleet.bicopter_cw
    try:
        spin = analysis.equilibrium_yaw_rate(params)
    except ValueError:
        spin = 0.0
    if spin == 0.0:
        print(
            "analysis refused: equilibrium yaw rate is zero (torque_to_thrust"
            " or drag makes the spin regime degenerate)",
            file=sys.stderr,
        )
        return 1
    att_kd = cfg[("gains", "att_kd_nms_per_rad")]
    bound = analysis.attitude_gain_bound(att_kd, params)
    print(f"equilibrium yaw rate: {spin:.1f} rad/s")
    print(f"precession rate: {analysis.precession_rate(params):.1f} rad/s")
    print(
        f"stable proportional tilt gain bound (K_tau_d = {att_kd:g}): "
        f"K_tau_p < {bound:.3g} N m/rad"
    )

    kp_grid = np.linspace(args.kp_min, args.kp_max, args.grid)
    kd_grid = np.linspace(args.kd_min, args.kd_max, args.grid)
    deltas = {"both": (1, -1), "+1": (1,), "-1": (-1,)}[args.delta]
    rows = analysis.stability_map(kp_grid, kd_grid, params, deltas=deltas)
    out_dir = args.out or cfg[("output", "directory")]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "stability_map.csv")
    analysis.write_stability_map_csv(path, rows)
    print(f"stability map: {len(rows)} rows -> {path}")
    return 0


def cmd_suite(args):
    try:
        cfg = _load(args, validate=False)
    except config_mod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1

    only = None
    names = cfg[("scenario", "suite_scenarios")]
    if args.criteria is not None:
        names = args.criteria
    if names.strip() == "":
        print("warning: empty criteria list; nothing to run (vacuous pass)")
        return 0
    if names.strip() != "all":
        only = {n.strip() for n in names.split(",")}

    from spincopter import control

    fleet = cfg.fleet()
    gains = None
    gains_error = None
    try:
        gains = cfg.gains()
        control.validate_gains(gains, fleet.bicopter_cw)
    except (control.UnstableGainsError, ValueError) as e:
        gains_error = str(e)

    results = []
    if gains_error is not None:
        results.append(
            acceptance.CriterionResult(
                "gain_stability_check", False, f"gains rejected: {gains_error}"
            )
        )
        flight_needed = {
            "bicopter_flight",
            "quad_flights",
            "mode_detection",
            "hand_throw_recovery",
            "conservation_and_determinism",
        }
        for fn in acceptance.ALL_CRITERIA:
            if only is not None and fn.__name__ not in only:
                continue
            if fn.__name__ in flight_needed:
                results.append(
                    acceptance.CriterionResult(
                        fn.__name__, False, "skipped: unstable gains"
                    )
                )
            else:
                results.append(fn(fleet, None))
    else:
        results = acceptance.run_all(fleet, gains, only=only)

    for r in results:
        print(r.line())
    n_fail = sum(1 for r in results if not r.passed)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 3


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="spincopter",
        description="Spinning-bicopter / quadcopter flight simulator and analysis tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="config file (INI; default: built-ins)")
    common.add_argument("--preset", choices=("ideal", "realistic"), default=None)
    common.add_argument("--out", default=None, help="output directory")

    p_sim = sub.add_parser("simulate", parents=[common], help="run one scenario")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.set_defaults(fn=cmd_simulate)

    p_an = sub.add_parser("analyze", parents=[common], help="equilibrium + stability map")
    p_an.add_argument("--grid", type=int, default=50)
    p_an.add_argument("--kp-min", type=float, default=-5e-3)
    p_an.add_argument("--kp-max", type=float, default=5e-3)
    p_an.add_argument("--kd-min", type=float, default=-1e-4)
    p_an.add_argument("--kd-max", type=float, default=1e-4)
    p_an.add_argument("--delta", choices=("both", "+1", "-1"), default="+1")
    p_an.set_defaults(fn=cmd_analyze)

    p_suite = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    p_suite.add_argument(
        "--criteria",
        default=None,
        help='comma list of criterion names, "all", or "" for a vacuous run',
    )
    p_suite.set_defaults(fn=cmd_suite)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
