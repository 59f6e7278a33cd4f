"""Flat key = value configuration with sections, units in key names, and a
provenance tag (paper | calibrated | tuned) on every numeric default.

Unknown keys are rejected, values are range-checked, and the effective
config (defaults filled in) can be emitted back out; reloading the emitted
text reproduces the same behavior.
"""

import configparser
import io

import numpy as np

from spincopter import control, harness, vehicle


class ConfigError(ValueError):
    pass


def _b(s):
    if isinstance(s, bool):
        return s
    if s.lower() in ("true", "1", "yes", "on"):
        return True
    if s.lower() in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


# key: (default, parse, (lo, hi) or None, provenance)
SCHEMA = {
    "vehicle": {
        "mass_kg": (vehicle.DEFAULT_MASS, float, (0.001, 1.0), "paper"),
        "gravity_mps2": (vehicle.GRAVITY, float, (9.0, 10.5), "paper"),
        "arm_m": (vehicle.DEFAULT_ARM, float, (0.01, 0.5), "paper"),
        "torque_to_thrust_m": (vehicle.DEFAULT_TORQUE_TO_THRUST, float, (0.0, 0.05), "tuned"),
        "rotor_drag_horizontal_nspm": (vehicle.DEFAULT_DRAG_H, float, (0.0, 1.0), "calibrated"),
        "rotor_drag_vertical_nspm": (vehicle.DEFAULT_DRAG_V, float, (0.0, 1.0), "tuned"),
        "inertia_roll_kgm2": (vehicle.DEFAULT_INERTIA_ROLL, float, (1e-6, 1e-2), "paper"),
        "inertia_pitch_kgm2": (vehicle.DEFAULT_INERTIA_PITCH, float, (1e-6, 1e-2), "paper"),
        "inertia_axial_kgm2": (vehicle.DEFAULT_INERTIA_AXIAL, float, (1e-6, 1e-2), "paper"),
        "thrust_min_n": (0.0, float, (0.0, 0.05), "paper"),
        "thrust_max_n": (vehicle.DEFAULT_THRUST_MAX, float, (0.01, 5.0), "tuned"),
        "motor_time_constant_s": (vehicle.DEFAULT_MOTOR_TC, float, (0.0, 0.5), "tuned"),
        "quad_mass_kg": (vehicle.QUAD_MASS, float, (0.002, 2.0), "paper"),
        "quad_inertia_diametral_kgm2": (vehicle.QUAD_INERTIA_DIAMETRAL, float, (1e-6, 1e-2), "calibrated"),
        "quad_inertia_axial_kgm2": (vehicle.QUAD_INERTIA_AXIAL, float, (1e-6, 1e-2), "calibrated"),
        "quad_plane_offset_m": (vehicle.QUAD_PLANE_OFFSET, float, (0.0, 0.5), "paper"),
    },
    "gains": {
        "pos_kp_xy": (0.3, float, (0.0, 100.0), "tuned"),
        "pos_kp_z": (8.0, float, (0.0, 100.0), "tuned"),
        "pos_kd_xy": (0.9, float, (0.0, 100.0), "tuned"),
        "pos_kd_z": (5.0, float, (0.0, 100.0), "tuned"),
        "pos_ki_xy": (0.3, float, (0.0, 100.0), "tuned"),
        "pos_ki_z": (2.0, float, (0.0, 100.0), "tuned"),
        "pos_integrator_limit_m_s": (0.5, float, (0.0, 10.0), "tuned"),
        "att_kp_nm_per_rad": (1.1e-2, float, (-1.0, 1.0), "tuned"),
        "att_kd_nms_per_rad": (0.0, float, (0.0, 1.0), "paper"),
        "tilt_setpoint_limit_rad": (0.12, float, (0.01, 1.0), "paper"),
        "tilt_deadzone_rad": (0.035, float, (0.001, 0.5), "paper"),
        "tilt_lpf_cutoff_radps": (10.0, float, (0.1, 1000.0), "tuned"),
        "yaw_blend": (0.2, float, (0.01, 1.0), "tuned"),
        "quad_pos_kp_xy": (6.0, float, (0.0, 100.0), "tuned"),
        "quad_pos_kp_z": (8.0, float, (0.0, 100.0), "tuned"),
        "quad_pos_kd_xy": (4.0, float, (0.0, 100.0), "tuned"),
        "quad_pos_kd_z": (5.0, float, (0.0, 100.0), "tuned"),
        "quad_pos_ki_xy": (0.5, float, (0.0, 100.0), "tuned"),
        "quad_pos_ki_z": (2.0, float, (0.0, 100.0), "tuned"),
        "quad_integrator_limit_m_s": (0.5, float, (0.0, 10.0), "tuned"),
        "quad_att_kp_rollpitch": (0.06, float, (0.0, 10.0), "tuned"),
        "quad_att_kp_yaw": (0.002, float, (0.0, 10.0), "tuned"),
        "quad_att_kd_rollpitch": (0.008, float, (0.0, 10.0), "tuned"),
        "quad_att_kd_yaw": (0.0008, float, (0.0, 10.0), "tuned"),
    },
    "scenario": {
        "circle_radius_m": (0.5, float, (0.0, 5.0), "tuned"),
        "circle_freq_hz": (0.1, float, (0.001, 2.0), "tuned"),
        "ellipse_semi_x_m": (0.3, float, (0.0, 5.0), "tuned"),
        "ellipse_semi_y_m": (0.2, float, (0.0, 5.0), "tuned"),
        "ellipse_freq_hz": (1.0 / 3.0, float, (0.001, 2.0), "paper"),
        "altitude_m": (1.0, float, (0.2, 10.0), "tuned"),
        "launch_spin_radps": (10.0, float, (0.0, 100.0), "paper"),
        "hand_throw_spin_radps": (26.0, float, (0.0, 100.0), "paper"),
        "hand_throw_tilt_rad": (0.2, float, (0.0, 1.0), "tuned"),
        "suite_scenarios": ("all", str, None, "tuned"),
    },
    "noise": {
        "position_sigma_m": (0.0, float, (0.0, 0.1), "tuned"),
        "gyro_sigma_radps": (0.0, float, (0.0, 1.0), "tuned"),
        "gyro_bias_radps": (0.0, float, (-1.0, 1.0), "tuned"),
        "feedback_latency_s": (0.0, float, (0.0, 0.2), "tuned"),
    },
    "output": {
        "directory": ("out", str, None, "tuned"),
        "write_csv": (True, _b, None, "tuned"),
        "write_metrics": (True, _b, None, "tuned"),
    },
}

PRESETS = {
    "ideal": {},
    "realistic": {
        ("noise", "position_sigma_m"): 1e-3,
        ("noise", "gyro_sigma_radps"): 0.01,
        ("noise", "feedback_latency_s"): 0.010,
    },
}


class Config:
    """Validated configuration; builds fleet / gains / noise / scenarios."""

    def __init__(self, values):
        self.values = values

    def __getitem__(self, key):
        section, name = key
        return self.values[section][name]

    def fleet(self):
        v = self.values["vehicle"]
        common = dict(
            gravity=v["gravity_mps2"],
            arm=v["arm_m"],
            torque_to_thrust=v["torque_to_thrust_m"],
            drag_h=v["rotor_drag_horizontal_nspm"],
            drag_v=v["rotor_drag_vertical_nspm"],
            thrust_min=v["thrust_min_n"],
            thrust_max=v["thrust_max_n"],
            motor_time_constant=v["motor_time_constant_s"],
        )
        bic = dict(
            common,
            mass=v["mass_kg"],
            inertia_roll=v["inertia_roll_kgm2"],
            inertia_pitch=v["inertia_pitch_kgm2"],
            inertia_axial=v["inertia_axial_kgm2"],
        )
        quad = dict(
            common,
            mass=v["quad_mass_kg"],
            inertia_roll=v["quad_inertia_diametral_kgm2"],
            inertia_pitch=v["quad_inertia_diametral_kgm2"],
            inertia_axial=v["quad_inertia_axial_kgm2"],
            plane_offset=v["quad_plane_offset_m"],
        )
        return harness.VehicleFleet(
            bicopter_cw=vehicle.bicopter_params(1, **bic),
            bicopter_ccw=vehicle.bicopter_params(-1, **bic),
            quad=vehicle.quadcopter_params(**quad),
        )

    def gains(self):
        g = self.values["gains"]
        return control.ControllerGains(
            pos_kp=np.array([g["pos_kp_xy"], g["pos_kp_xy"], g["pos_kp_z"]]),
            pos_kd=np.array([g["pos_kd_xy"], g["pos_kd_xy"], g["pos_kd_z"]]),
            pos_ki=np.array([g["pos_ki_xy"], g["pos_ki_xy"], g["pos_ki_z"]]),
            integrator_clamp=g["pos_integrator_limit_m_s"],
            att_kp=g["att_kp_nm_per_rad"],
            att_kd=g["att_kd_nms_per_rad"],
            tilt_setpoint_limit=g["tilt_setpoint_limit_rad"],
            tilt_deadzone=g["tilt_deadzone_rad"],
            lpf_cutoff=g["tilt_lpf_cutoff_radps"],
            yaw_blend=g["yaw_blend"],
            quad_pos_kp=np.array([g["quad_pos_kp_xy"], g["quad_pos_kp_xy"], g["quad_pos_kp_z"]]),
            quad_pos_kd=np.array([g["quad_pos_kd_xy"], g["quad_pos_kd_xy"], g["quad_pos_kd_z"]]),
            quad_pos_ki=np.array([g["quad_pos_ki_xy"], g["quad_pos_ki_xy"], g["quad_pos_ki_z"]]),
            quad_integrator_clamp=g["quad_integrator_limit_m_s"],
            quad_att_kp=np.array(
                [g["quad_att_kp_rollpitch"], g["quad_att_kp_rollpitch"], g["quad_att_kp_yaw"]]
            ),
            quad_att_kd=np.array(
                [g["quad_att_kd_rollpitch"], g["quad_att_kd_rollpitch"], g["quad_att_kd_yaw"]]
            ),
        )

    def noise(self):
        n = self.values["noise"]
        return harness.NoiseSpec(
            pos_sigma=n["position_sigma_m"],
            gyro_sigma=n["gyro_sigma_radps"],
            gyro_bias=n["gyro_bias_radps"],
            latency=n["feedback_latency_s"],
        )

    def scenario(self, name, seed=0):
        s = self.values["scenario"]
        noise = self.noise()
        alt = s["altitude_m"]
        builders = {
            "bicopter_circle": lambda: harness.bicopter_circle_scenario(
                radius=s["circle_radius_m"],
                freq=s["circle_freq_hz"],
                altitude=alt,
                launch_spin=s["launch_spin_radps"],
                noise=noise,
                seed=seed,
            ),
            "bicopter_hover": lambda: harness.bicopter_hover_scenario(
                altitude=alt, noise=noise, seed=seed
            ),
            "quad_ellipse": lambda: harness.quad_ellipse_scenario(
                semi_x=s["ellipse_semi_x_m"],
                semi_y=s["ellipse_semi_y_m"],
                freq=s["ellipse_freq_hz"],
                altitude=alt,
                noise=noise,
                seed=seed,
            ),
            "quad_split_ellipse": lambda: harness.quad_ellipse_scenario(
                semi_x=s["ellipse_semi_x_m"],
                semi_y=s["ellipse_semi_y_m"],
                freq=s["ellipse_freq_hz"],
                altitude=alt,
                split=True,
                noise=noise,
                seed=seed,
            ),
            "launch_spin": lambda: harness.launch_spin_scenario(
                rate=s["launch_spin_radps"], altitude=alt, noise=noise, seed=seed
            ),
            "launch_spin_slow": lambda: harness.launch_spin_scenario(
                rate=5.0, altitude=alt, noise=noise, seed=seed
            ),
            "hand_throw": lambda: harness.hand_throw_scenario(
                spin=s["hand_throw_spin_radps"],
                tilt=s["hand_throw_tilt_rad"],
                noise=noise,
                seed=seed,
            ),
            "quad_failure": lambda: harness.quad_failure_scenario(seed=seed),
        }
        if name not in builders:
            raise ConfigError(
                f"unknown scenario {name!r}; known: {', '.join(sorted(builders))}"
            )
        return builders[name]()

    def scenario_names(self):
        return [
            "bicopter_circle",
            "bicopter_hover",
            "quad_ellipse",
            "quad_split_ellipse",
            "launch_spin",
            "launch_spin_slow",
            "hand_throw",
            "quad_failure",
        ]


def load_config(path=None, preset=None, validate=True):
    """Load and validate a config file (None = built-in defaults)."""
    values = {
        section: {key: spec[0] for key, spec in keys.items()}
        for section, keys in SCHEMA.items()
    }
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}")
        except configparser.Error as e:
            raise ConfigError(f"malformed config: {e}")
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                default, parse, bounds, _ = SCHEMA[section][key]
                try:
                    val = parse(raw)
                except (ValueError, ConfigError):
                    raise ConfigError(f"bad value for {section}.{key}: {raw!r}")
                if bounds is not None and not bounds[0] <= val <= bounds[1]:
                    raise ConfigError(
                        f"{section}.{key} = {val} outside [{bounds[0]}, {bounds[1]}]"
                    )
                values[section][key] = val
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        for (section, key), val in PRESETS[preset].items():
            values[section][key] = val

    cfg = Config(values)
    if validate:
        try:
            control.validate_gains(cfg.gains(), cfg.fleet().bicopter_cw)
        except control.UnstableGainsError as e:
            raise ConfigError(f"unstable attitude gains: {e}")
        except ValueError as e:
            raise ConfigError(f"degenerate spin regime: {e}")
    return cfg


def emit_effective_config(cfg):
    """Render the full effective config with provenance comments."""
    out = io.StringIO()
    for section, keys in SCHEMA.items():
        out.write(f"[{section}]\n")
        for key, (_, parse, _, provenance) in keys.items():
            val = cfg.values[section][key]
            if parse is float:
                text = repr(float(val))  # shortest round-trip form
            elif parse is _b:
                text = "true" if val else "false"
            else:
                text = str(val)
            out.write(f"{key} = {text}  ; provenance: {provenance}\n")
        out.write("\n")
    return out.getvalue()
