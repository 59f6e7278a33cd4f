"""Render flight-log and stability-map figures from the public CSV contract.

Consumes only the CSV files the simulator writes (no import of the
simulator itself), so these plots keep working against archived logs.

Figure kinds:
  trajectory    three-axis position vs time, measurement over reference
  attitude      tilt error close-up with the controller deadzone band,
                plus raw / filtered / setpoint traces per tilt axis
  yaw_rate      body yaw rate over the flight
  stability_map stable/unstable gain region with the analytic boundary
                (zero contour of the max real eigenvalue)
"""

import csv
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("trajectory", "attitude", "yaw_rate", "stability_map")

# tilt-error threshold below which the attitude controller is silent;
# drawn as a band on the attitude figure
DEADZONE_RAD = 0.035

LOG_REQUIRED = {
    "trajectory": ["t_s", "px_m", "py_m", "pz_m", "ref_px_m", "ref_py_m", "ref_pz_m"],
    "attitude": [
        "t_s",
        "tiltx_rad", "tilty_rad",
        "tiltx_filt_rad", "tilty_filt_rad",
        "tiltx_sp_rad", "tilty_sp_rad",
    ],
    "yaw_rate": ["t_s", "omz_radps"],
    "stability_map": ["K_tau_p", "K_tau_d", "delta", "verdict", "max_real_eig"],
}

MEASURED = "tab:blue"
RAW = "lightskyblue"
REFERENCE = "tab:red"


class SchemaError(ValueError):
    """Input CSV does not match the expected log schema."""

    def __init__(self, missing):
        super().__init__(f"missing columns: {', '.join(missing)}")
        self.missing = missing


class EmptyLogError(ValueError):
    pass


@dataclass
class PlotSpec:
    kind: str
    input_path: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


@dataclass
class RenderInfo:
    """What was drawn: enough to assert reproducibility in tests."""

    path: str
    size_px: tuple
    axis_ranges: list
    features: dict = field(default_factory=dict)


def read_csv_columns(path, required):
    """Load the required columns; reject missing headers or empty files."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(missing)
        rows = list(reader)
    if not rows:
        raise EmptyLogError(f"{path} has a header but no data rows")
    out = {}
    for c in required:
        col = [r[c] for r in rows]
        try:
            out[c] = np.array([float(x) for x in col])
        except ValueError:
            out[c] = np.array(col)
    return out


def _finish(fig, spec):
    fig.savefig(spec.output_path, dpi=120)
    size = fig.get_size_inches() * 120
    ranges = [ax.get_xlim() + ax.get_ylim() for ax in fig.axes]
    plt.close(fig)
    return size, ranges


def _render_trajectory(spec):
    d = read_csv_columns(spec.input_path, LOG_REQUIRED["trajectory"])
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    for ax, comp, ref, label in zip(
        axes,
        ("px_m", "py_m", "pz_m"),
        ("ref_px_m", "ref_py_m", "ref_pz_m"),
        ("x [m]", "y [m]", "z [m]"),
    ):
        ax.plot(d["t_s"], d[comp], color=MEASURED, lw=1.2, label="measured")
        ax.plot(d["t_s"], d[ref], color=REFERENCE, lw=1.0, ls="--", label="reference")
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    axes[0].legend(loc="upper right", fontsize=8)
    axes[0].set_title("trajectory tracking")
    axes[-1].set_xlabel("time [s]")
    fig.tight_layout()
    size, ranges = _finish(fig, spec)
    return RenderInfo(spec.output_path, tuple(size), ranges)


def _render_attitude(spec):
    d = read_csv_columns(spec.input_path, LOG_REQUIRED["attitude"])
    err = np.hypot(
        d["tiltx_filt_rad"] - d["tiltx_sp_rad"],
        d["tilty_filt_rad"] - d["tilty_sp_rad"],
    )
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    axes[0].plot(d["t_s"], err, color=MEASURED, lw=1.0, label="|tilt error|")
    for band in (DEADZONE_RAD, -DEADZONE_RAD):
        axes[0].axhline(band, color="gray", lw=0.8, ls=":")
    axes[0].axhspan(-DEADZONE_RAD, DEADZONE_RAD, color="gray", alpha=0.15)
    axes[0].set_ylabel("tilt error [rad]")
    axes[0].set_title("attitude loop (shaded: controller deadzone)")
    for ax, axis in zip(axes[1:], ("x", "y")):
        ax.plot(d["t_s"], d[f"tilt{axis}_rad"], color=RAW, lw=0.8, label="raw")
        ax.plot(d["t_s"], d[f"tilt{axis}_filt_rad"], color=MEASURED, lw=1.1, label="filtered")
        ax.plot(d["t_s"], d[f"tilt{axis}_sp_rad"], color=REFERENCE, lw=1.0, ls="--", label="setpoint")
        ax.set_ylabel(f"tilt_{axis} [rad]")
        ax.grid(alpha=0.3)
    axes[1].legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("time [s]")
    fig.tight_layout()
    size, ranges = _finish(fig, spec)
    return RenderInfo(
        spec.output_path,
        tuple(size),
        ranges,
        features={"deadzone_band": (-DEADZONE_RAD, DEADZONE_RAD)},
    )


def _render_yaw_rate(spec):
    d = read_csv_columns(spec.input_path, LOG_REQUIRED["yaw_rate"])
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(d["t_s"], d["omz_radps"], color=MEASURED, lw=1.1)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("yaw rate [rad/s]")
    ax.set_title("spin rate")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    size, ranges = _finish(fig, spec)
    return RenderInfo(spec.output_path, tuple(size), ranges)


def _render_stability_map(spec):
    d = read_csv_columns(spec.input_path, LOG_REQUIRED["stability_map"])
    deltas = sorted(set(d["delta"].astype(float)))
    fig, axes = plt.subplots(
        1, len(deltas), figsize=(5.5 * len(deltas), 4.6), squeeze=False
    )
    boundary_points = 0
    for ax, delta in zip(axes[0], deltas):
        mask = d["delta"].astype(float) == delta
        kp = d["K_tau_p"][mask]
        kd = d["K_tau_d"][mask]
        eig = d["max_real_eig"][mask]
        stable = d["verdict"][mask] == "stable"
        ax.scatter(kp[stable], kd[stable], s=6, c="tab:green", label="stable")
        ax.scatter(kp[~stable], kd[~stable], s=6, c="tab:orange", label="unstable")
        # analytic stability boundary = zero level set of the max real part
        kps = np.unique(kp)
        kds = np.unique(kd)
        if len(kps) > 2 and len(kds) > 2 and len(eig) == len(kps) * len(kds):
            grid = eig.reshape(len(kps), len(kds)).T
            cs = ax.contour(kps, kds, grid, levels=[0.0], colors="k", linewidths=1.4)
            boundary_points += sum(len(p.vertices) for p in cs.get_paths())
        ax.set_xlabel("K_tau_p [N m/rad]")
        ax.set_ylabel("K_tau_d [N m s/rad]")
        ax.set_title(f"spin direction {int(delta):+d}")
        ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    size, ranges = _finish(fig, spec)
    return RenderInfo(
        spec.output_path,
        tuple(size),
        ranges,
        features={"boundary_points": boundary_points},
    )


_RENDERERS = {
    "trajectory": _render_trajectory,
    "attitude": _render_attitude,
    "yaw_rate": _render_yaw_rate,
    "stability_map": _render_stability_map,
}


def render(spec):
    """Render one figure; returns RenderInfo. Inputs are never modified."""
    return _RENDERERS[spec.kind](spec)
