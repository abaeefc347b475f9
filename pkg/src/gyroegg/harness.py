"""Deterministic scenario runner: control loop, battery, telemetry, exit codes.

One loop owns all state. Each tick looks up the newest scripted command,
turns it into gimbal rate targets (the watchdog inside the steering law
zeroes them when the script goes quiet), steps the dynamics, and drains
the battery. Telemetry is sampled every `stride` ticks before stepping,
so frame 0 always shows the initial state.

Exit codes follow shell convention: 0 clean, 2 integrator blew up,
3 battery hit the cutoff. Aborts still flush the partial log.
"""

from dataclasses import dataclass

import numpy as np

from .contact import GroundPlane, contact_wrench
from .control import (
    DriveCommand,
    command_to_gimbal_targets,
    reservoir_gauge,
    rolling_axis_estimate,
)
from .dynamics import (
    ActuationInput,
    RobotState,
    SimulationUnstableError,
    dynamics_step,
    generalized_acceleration,
)
from .rotation import Frame
from .scenario import RunLog, ScenarioConfig, TelemetryFrame, export_csv
from .sensor_power import (
    BatteryPack,
    ImuMount,
    LoadProfile,
    RegulatorChain,
    imu_read,
    power_step,
)
from .transmission import RotorDrive, rotor_speed_control

EXIT_CLEAN = 0
EXIT_UNSTABLE = 2
EXIT_BATTERY_DEAD = 3

# placeholder "no command yet": ancient timestamp, always stale
_NO_COMMAND = DriveCommand(timestamp=-1e9)


@dataclass(frozen=True)
class RunResult:
    log: RunLog
    final_state: RobotState
    exit_code: int
    reason: str


def settled_height(params, plane: GroundPlane) -> float:
    """Rest height of the shell frame origin over a flat floor.

    Valid for the identity orientation, where the lowest point sits one
    vertical semi-axis below the origin.
    """
    depth = params.total_mass * params.gravity / plane.stiffness
    return plane.height + params.semi_axes[2] - depth


def resting_state_on(params, plane: GroundPlane, rotor_rate=0.0) -> RobotState:
    return RobotState.at_rest(
        position=(0.0, 0.0, settled_height(params, plane)), rotor_rate=rotor_rate
    )


def run_scenario(config: ScenarioConfig) -> RunResult:
    if config.mode != "scripted":
        raise ValueError("run_scenario handles scripted mode; use serve_teleop for teleop")
    stepper = ScenarioStepper(config)
    while not stepper.done:
        stepper.tick()
    return stepper.result()


class ScenarioStepper:
    """Tick-at-a-time runner; the teleop service drives one of these live.

    Scripted commands come from the config; `inject_command` overrides
    them (latest wins within a tick, teleop mode has no script).
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.params = config.resolved_params()
        self.state = config.initial
        self.dt = config.dt_s
        self.n_steps = int(round(config.duration_s / config.dt_s))
        self.stride = max(1, int(round(1.0 / (config.telemetry_hz * config.dt_s))))
        self.rng = np.random.default_rng(config.seed)
        self.hull_imu = ImuMount()
        self.inner_imu = ImuMount(frame=Frame.INNER_GIMBAL)
        self.pack = BatteryPack()
        self.chain = RegulatorChain()
        self.drive = RotorDrive(target_speed=config.initial.rotor_rate)
        self.command = _NO_COMMAND
        self.frames = []
        self.step_index = 0
        self._script_index = 0
        self.exit_code = EXIT_CLEAN
        self.reason = "completed"
        self.done = self.n_steps == 0
        if self.done and config.duration_s == 0.0:
            # zero-length run still logs the initial sample
            wrench_fn = self._wrench_fn()
            wrench_now = wrench_fn(self.state, 0.0) if wrench_fn else None
            self._sample(self._actuation(0.0), wrench_now)

    @property
    def time(self) -> float:
        return self.step_index * self.dt

    def inject_command(self, cmd: DriveCommand):
        self.command = cmd

    def tick(self):
        t = self.time
        self._advance_script(t)
        wrench_fn = self._wrench_fn()
        actuation = self._actuation(t)

        if self.step_index % self.stride == 0:
            wrench_now = wrench_fn(self.state, t) if wrench_fn else None
            self._sample(actuation, wrench_now)

        if not self._drain_battery():
            self.done = True
            return
        try:
            self.state = dynamics_step(
                self.params, self.state, actuation, wrench_fn, dt=self.dt, t=t
            )
        except SimulationUnstableError as exc:
            self.exit_code = EXIT_UNSTABLE
            self.reason = f"unstable: {exc}"
            self.done = True
            return
        self.step_index += 1
        if self.step_index >= self.n_steps:
            self.done = True

    def result(self) -> RunResult:
        log = RunLog.for_config(self.config, self.frames)
        if self.config.log_path is not None:
            log.write(self.config.log_path)
        if self.config.csv_path is not None:
            export_csv(log, path=self.config.csv_path)
        return RunResult(
            log=log, final_state=self.state, exit_code=self.exit_code, reason=self.reason
        )

    def _advance_script(self, t):
        script = self.config.commands
        while self._script_index < len(script) and script[self._script_index].timestamp <= t:
            self.command = script[self._script_index]
            self._script_index += 1

    def _wrench_fn(self):
        if self.config.plane is None:
            return None
        plane, params = self.config.plane, self.params

        def wrench(state, t):
            force, torque, _ = contact_wrench(plane, params, state)
            return force, torque

        return wrench

    def _actuation(self, t) -> ActuationInput:
        alpha_rate, beta_rate = command_to_gimbal_targets(
            self.command, self.params, self.state, now=t
        )
        torque = rotor_speed_control(self.drive, self.state.rotor_rate)
        return ActuationInput.rate_targets(alpha_rate, beta_rate, rotor=torque)

    def _drain_battery(self) -> bool:
        mech = max(
            rotor_speed_control(self.drive, self.state.rotor_rate) * self.state.rotor_rate,
            0.0,
        )
        load = LoadProfile.full_actuation(abs(self.state.rotor_rate), mech)
        self.pack, _, alive = power_step(self.pack, self.chain, load, self.dt)
        if not alive:
            self.exit_code = EXIT_BATTERY_DEAD
            self.reason = f"battery dead at t = {self.time:.3f} s"
        return alive

    def _sample(self, actuation, wrench_now):
        state, params = self.state, self.params
        udot = generalized_acceleration(params, state, actuation, wrench_now)
        hull = imu_read(self.hull_imu, params, state, rng_seed=self.rng, accel=udot)
        inner = imu_read(self.inner_imu, params, state, rng_seed=self.rng, accel=udot)

        if self.config.plane is None:
            in_contact, normal_n, slip = False, 0.0, 0.0
        else:
            _, _, result = contact_wrench(self.config.plane, params, state)
            in_contact = result.in_contact
            normal_n = result.normal_force
            slip = self._slip_speed(result) if in_contact else 0.0

        gauge = reservoir_gauge(params, state, rolling_axis_estimate(state))
        rot = state.rotation_matrix
        omega_world = rot @ state.omega_body

        self.frames.append(
            TelemetryFrame(
                tick=self.step_index,
                time_s=self.time,
                position_m=tuple(float(v) for v in state.position),
                orientation_wxyz=tuple(float(v) for v in state.orientation),
                velocity_mps=tuple(float(v) for v in state.velocity),
                omega_world_radps=tuple(float(v) for v in omega_world),
                alpha_rad=state.gimbal.alpha,
                beta_rad=state.gimbal.beta,
                alpha_rate_radps=state.gimbal.alpha_rate,
                beta_rate_radps=state.gimbal.beta_rate,
                rotor_speed_radps=state.rotor_rate,
                hull_gyro_radps=tuple(float(v) for v in hull[0]),
                hull_accel_mps2=tuple(float(v) for v in hull[1]),
                inner_gyro_radps=tuple(float(v) for v in inner[0]),
                inner_accel_mps2=tuple(float(v) for v in inner[1]),
                in_contact=in_contact,
                normal_force_n=normal_n,
                slip_speed_mps=slip,
                gauge_fraction=gauge.fraction,
                gauge_angle_rad=gauge.angle,
                rotor_stopped=gauge.rotor_stopped,
                battery_v=self.pack.voltage,
                battery_soc=self.pack.state_of_charge,
                battery_ah=self.pack.charge_state,
                command_forward=self.command.forward,
                command_turn=self.command.turn,
                command_age_s=min(self.time - self.command.timestamp, 1e6),
            )
        )

    def _slip_speed(self, result) -> float:
        state = self.state
        rot = state.rotation_matrix
        omega_world = rot @ state.omega_body
        point = np.asarray(result.point)
        v_point = state.velocity + np.cross(omega_world, point - state.position)
        normal = self.config.plane.normal
        tangential = v_point - (v_point @ normal) * normal
        return float(np.linalg.norm(tangential))
