"""Scenario files, telemetry records, run logs, CSV export.

A scenario is everything a run needs: which parameter set, the ground,
the initial state, the command script, timing, and the RNG seed. Configs
live in YAML with unit-suffixed keys (`duration_s`, `stiffness_npm`) so
a file never leaves the units to the reader's imagination. The same rule
applies to telemetry columns.

Logs serialize to JSON lines: one header object, then one object per
frame. Floats go through repr, so a log is byte-identical across runs
of the same config and seed.
"""

import hashlib
import json
from dataclasses import dataclass, field, fields, replace

import numpy as np
import yaml

from . import __version__
from .contact import GroundPlane
from .control import DriveCommand
from .dynamics import GimbalAngles, RobotState
from .params import RobotParams, named_params, param_set_names

MODES = ("scripted", "teleop")

# RobotParams fields a config may override, YAML key -> attribute
_OVERRIDE_KEYS = {
    "gravity_mps2": "gravity",
    "joint_damping_nms": "joint_damping",
}

_PLANE_KEYS = {
    "normal": "normal",
    "height_m": "height",
    "stiffness_npm": "stiffness",
    "damping_nspm": "damping",
    "mu_static": "mu_static",
    "mu_kinetic": "mu_kinetic",
    "slip_regularization_mps": "slip_regularization_velocity",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """One complete run description; validation lists every problem at once."""

    params_name: str = "proto1"
    overrides: dict = field(default_factory=dict)
    plane: GroundPlane = field(default_factory=GroundPlane)  # None disables contact
    initial: RobotState = field(default_factory=RobotState.at_rest)
    mode: str = "scripted"
    commands: tuple = ()
    duration_s: float = 5.0
    dt_s: float = 5e-4
    seed: int = None
    telemetry_hz: float = 50.0
    log_path: str = None
    csv_path: str = None

    def __post_init__(self):
        problems = []
        if self.params_name not in param_set_names():
            problems.append(
                f"unknown parameter set {self.params_name!r}, "
                f"choose from {param_set_names()}"
            )
        for key in self.overrides:
            if key not in _OVERRIDE_KEYS:
                problems.append(
                    f"unknown override {key!r}, choose from {sorted(_OVERRIDE_KEYS)}"
                )
        if self.mode not in MODES:
            problems.append(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.dt_s > 0.0:
            problems.append(f"dt_s must be > 0, got {self.dt_s!r}")
        if not self.duration_s >= 0.0:
            problems.append(f"duration_s must be >= 0, got {self.duration_s!r}")
        if self.mode == "scripted" and self.seed is None:
            problems.append("seed is mandatory in scripted mode")
        if not self.telemetry_hz > 0.0:
            problems.append(f"telemetry_hz must be > 0, got {self.telemetry_hz!r}")
        for i, cmd in enumerate(self.commands):
            if not isinstance(cmd, DriveCommand):
                problems.append(f"commands[{i}] is not a DriveCommand")
        stamps = [c.timestamp for c in self.commands if isinstance(c, DriveCommand)]
        if stamps != sorted(stamps):
            problems.append("command timestamps must be non-decreasing")
        if problems:
            raise ValueError("invalid scenario:\n  " + "\n  ".join(problems))
        object.__setattr__(self, "commands", tuple(self.commands))

    def resolved_params(self) -> RobotParams:
        params = named_params(self.params_name)
        if self.overrides:
            attrs = {_OVERRIDE_KEYS[k]: v for k, v in self.overrides.items()}
            params = replace(params, **attrs)
        return params

    def config_hash(self) -> str:
        """Hash of the canonical serialized form; keyed into the log header."""
        canon = json.dumps(scenario_to_dict(self), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def hold_command_script(
    forward: float, turn: float, until_s: float, period_s: float = 0.1
) -> tuple:
    """Repeat one command often enough that the watchdog never fires."""
    count = int(np.ceil(until_s / period_s)) + 1
    return tuple(
        DriveCommand(forward=forward, turn=turn, timestamp=i * period_s)
        for i in range(count)
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    state = config.initial
    out = {
        "params": config.params_name,
        "overrides": dict(config.overrides),
        "mode": config.mode,
        "duration_s": config.duration_s,
        "dt_s": config.dt_s,
        "seed": config.seed,
        "telemetry_hz": config.telemetry_hz,
        "initial": {
            "position_m": [float(v) for v in state.position],
            "orientation_wxyz": [float(v) for v in state.orientation],
            "velocity_mps": [float(v) for v in state.velocity],
            "omega_radps": [float(v) for v in state.omega_body],
            "gimbal_rad": [state.gimbal.alpha, state.gimbal.beta],
            "rotor_angle_rad": state.rotor_angle,
            "rotor_rate_radps": state.rotor_rate,
        },
        "commands": [
            {"t_s": c.timestamp, "forward": c.forward, "turn": c.turn}
            for c in config.commands
        ],
    }
    if config.plane is None:
        out["plane"] = None
    else:
        plane = config.plane
        out["plane"] = {
            "normal": [float(v) for v in plane.normal],
            "height_m": plane.height,
            "stiffness_npm": plane.stiffness,
            "damping_nspm": plane.damping,
            "mu_static": plane.mu_static,
            "mu_kinetic": plane.mu_kinetic,
            "slip_regularization_mps": plane.slip_regularization_velocity,
        }
    if config.log_path is not None:
        out["log_path"] = config.log_path
    if config.csv_path is not None:
        out["csv_path"] = config.csv_path
    return out


def scenario_from_dict(data: dict) -> ScenarioConfig:
    data = dict(data)
    init = data.pop("initial", {})
    gimbal = init.get("gimbal_rad", [0.0, 0.0])
    state = RobotState(
        position=np.array(init.get("position_m", [0.0, 0.0, 0.0]), dtype=float),
        orientation=np.array(init.get("orientation_wxyz", [1.0, 0.0, 0.0, 0.0]), dtype=float),
        velocity=np.array(init.get("velocity_mps", [0.0, 0.0, 0.0]), dtype=float),
        omega_body=np.array(init.get("omega_radps", [0.0, 0.0, 0.0]), dtype=float),
        gimbal=GimbalAngles(float(gimbal[0]), float(gimbal[1])),
        rotor_angle=float(init.get("rotor_angle_rad", 0.0)),
        rotor_rate=float(init.get("rotor_rate_radps", 0.0)),
    )
    plane_data = data.pop("plane", {})
    if plane_data is None:
        plane = None
    else:
        attrs = {_PLANE_KEYS[k]: v for k, v in plane_data.items() if k in _PLANE_KEYS}
        unknown = set(plane_data) - set(_PLANE_KEYS)
        if unknown:
            raise ValueError(
                f"unknown plane keys {sorted(unknown)}, choose from {sorted(_PLANE_KEYS)}"
            )
        if "normal" in attrs:
            attrs["normal"] = np.array(attrs["normal"], dtype=float)
        plane = GroundPlane(**attrs)
    commands = tuple(
        DriveCommand(
            forward=c.get("forward", 0.0),
            turn=c.get("turn", 0.0),
            timestamp=c.get("t_s", 0.0),
        )
        for c in data.pop("commands", [])
    )
    return ScenarioConfig(
        params_name=data.pop("params", "proto1"),
        overrides=data.pop("overrides", {}),
        plane=plane,
        initial=state,
        mode=data.pop("mode", "scripted"),
        commands=commands,
        duration_s=float(data.pop("duration_s", 5.0)),
        dt_s=float(data.pop("dt_s", 5e-4)),
        seed=data.pop("seed", None),
        telemetry_hz=float(data.pop("telemetry_hz", 50.0)),
        log_path=data.pop("log_path", None),
        csv_path=data.pop("csv_path", None),
    )


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"scenario file {path!r} must hold a mapping")
    return scenario_from_dict(data)


def save_scenario(config: ScenarioConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(scenario_to_dict(config), fh, sort_keys=False)


@dataclass(frozen=True)
class TelemetryFrame:
    """Everything an observer sees about one sampled instant."""

    tick: int
    time_s: float
    position_m: tuple
    orientation_wxyz: tuple
    velocity_mps: tuple
    omega_world_radps: tuple
    alpha_rad: float
    beta_rad: float
    alpha_rate_radps: float
    beta_rate_radps: float
    rotor_speed_radps: float
    hull_gyro_radps: tuple
    hull_accel_mps2: tuple
    inner_gyro_radps: tuple
    inner_accel_mps2: tuple
    in_contact: bool
    normal_force_n: float
    slip_speed_mps: float
    gauge_fraction: float
    gauge_angle_rad: float
    rotor_stopped: bool
    battery_v: float
    battery_soc: float
    battery_ah: float
    command_forward: float
    command_turn: float
    command_age_s: float

    def __post_init__(self):
        if self.tick < 0:
            raise ValueError(f"tick must be >= 0, got {self.tick!r}")
        for name, value in self.as_dict().items():
            if isinstance(value, bool):
                continue
            if not np.all(np.isfinite(value)):
                raise ValueError(f"telemetry field {name} not finite: {value!r}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# one entry per CSV column: column name -> (frame field, component index)
def _build_csv_columns():
    cols = {}
    for f in fields(TelemetryFrame):
        probe = f.name
        if probe in ("position_m", "velocity_mps", "omega_world_radps",
                     "hull_gyro_radps", "hull_accel_mps2",
                     "inner_gyro_radps", "inner_accel_mps2"):
            stem, unit = probe.rsplit("_", 1)
            for i, axis in enumerate("xyz"):
                cols[f"{stem}_{axis}_{unit}"] = (probe, i)
        elif probe == "orientation_wxyz":
            for i, axis in enumerate("wxyz"):
                cols[f"q{axis}"] = (probe, i)
        else:
            cols[probe] = (probe, None)
    return cols


CSV_COLUMNS = _build_csv_columns()


@dataclass(frozen=True)
class RunLog:
    """Header plus telemetry sequence; serializes to reproducible JSONL."""

    header: dict
    frames: tuple

    @staticmethod
    def for_config(config: ScenarioConfig, frames) -> "RunLog":
        header = {
            "config_hash": config.config_hash(),
            "code_version": __version__,
            "seed": config.seed,
        }
        return RunLog(header=header, frames=tuple(frames))

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header, sort_keys=True, separators=(",", ":"))]
        for frame in self.frames:
            lines.append(
                json.dumps(frame.as_dict(), sort_keys=True, separators=(",", ":"))
            )
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    @staticmethod
    def from_jsonl(text: str) -> "RunLog":
        lines = [line for line in text.splitlines() if line]
        header = json.loads(lines[0])
        frames = []
        for line in lines[1:]:
            data = json.loads(line)
            for key, value in data.items():
                if isinstance(value, list):
                    data[key] = tuple(value)
            frames.append(TelemetryFrame(**data))
        return RunLog(header=header, frames=tuple(frames))


def export_csv(log: RunLog, columns=None, path=None) -> str:
    """Frames as RFC-4180 CSV, one row per frame, unit-suffixed header."""
    if columns is None:
        columns = list(CSV_COLUMNS)
    unknown = [c for c in columns if c not in CSV_COLUMNS]
    if unknown:
        raise ValueError(
            f"unknown columns {unknown}; valid names: {', '.join(CSV_COLUMNS)}"
        )
    rows = [",".join(columns)]
    for frame in log.frames:
        cells = []
        for col in columns:
            name, index = CSV_COLUMNS[col]
            value = getattr(frame, name)
            if index is not None:
                value = value[index]
            if isinstance(value, bool):
                cells.append("1" if value else "0")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        rows.append(",".join(cells))
    text = "\r\n".join(rows) + "\r\n"
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
