"""Operator intent to gimbal motion: steering, reservoir tracking, recovery.

The steering law works at the rate level. A command asks for a shell
torque (forward torque about the horizontal axis perpendicular to the
heading, turn torque about vertical); the minimal gimbal precession
producing it against the current rotor momentum is the least-squares
solution of omega x L = tau, decomposed onto the two gimbal axes and
scaled down until both servos stay inside their speed limit.

The momentum reservoir drains as the rotor axis tips toward the rolling
axis. When the gauge runs low the planner emits one of three scripted
maneuvers to recover it; stopping the rotor and starting over is always
available as the fallback.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RobotState, rotor_axis_world
from .params import RobotParams, STANDARD_GRAVITY
from .rotation import rot_x
from .transmission import (
    DEFAULT_ROTOR_SPEED,
    GearTrainSpec,
    ServoModel,
    servo_rates_for_gimbal_rates,
)

WATCHDOG_WINDOW = 0.5  # s without a fresh command before targets zero
RECOVERY_THRESHOLD = 0.5  # gauge fraction that triggers the planner

# full-scale command torques; forward gets more authority than turn
FORWARD_TORQUE = 3.0  # N*m
TURN_TORQUE = 1.5  # N*m

_MIN_MOMENTUM = 1e-6  # below this there is nothing to precess against
_ROLLING_OMEGA_MIN = 0.05  # rad/s, under this the rolling axis is undefined


@dataclass(frozen=True)
class DriveCommand:
    """One operator input; components clamp to [-1, 1]."""

    forward: float = 0.0
    turn: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.forward, self.turn, self.timestamp])):
            raise ValueError("command fields must be finite")
        object.__setattr__(self, "forward", float(np.clip(self.forward, -1.0, 1.0)))
        object.__setattr__(self, "turn", float(np.clip(self.turn, -1.0, 1.0)))

    def is_stale(self, now: float) -> bool:
        return now - self.timestamp > WATCHDOG_WINDOW


@dataclass(frozen=True)
class ReservoirGauge:
    """How much gyroscopic authority is left.

    The fraction is sin of the angle between the rotor spin axis and
    the rolling axis: 1 when perpendicular, 0 once they align and the
    reservoir is exhausted. A stopped rotor reads empty through its own
    flag rather than pretending an alignment.
    """

    angle: float
    fraction: float
    rotor_stopped: bool = False

    def __post_init__(self):
        if not 0.0 <= self.angle <= math.pi + 1e-12:
            raise ValueError(f"alignment angle must lie in [0, pi], got {self.angle!r}")
        if not -1e-12 <= self.fraction <= 1.0 + 1e-12:
            raise ValueError(f"fraction must lie in [0, 1], got {self.fraction!r}")


@dataclass(frozen=True)
class PendulumDriveModel:
    """Weight-shifting drive used as the torque-limit baseline."""

    hull_radius: float = 0.2
    weight_mass: float = 0.5
    weight_offset: float = 0.1
    tilt_angle: float = math.pi / 4.0

    def __post_init__(self):
        if not 0.0 < self.weight_offset < self.hull_radius:
            raise ValueError(
                f"weight offset must lie inside the hull, got {self.weight_offset!r} "
                f"against radius {self.hull_radius!r}"
            )
        if not 0.0 <= self.tilt_angle <= math.pi / 2.0 + 1e-12:
            raise ValueError(f"tilt angle must lie in [0, pi/2], got {self.tilt_angle!r}")
        if self.weight_mass < 0.0:
            raise ValueError(f"weight mass must be >= 0, got {self.weight_mass!r}")


@dataclass(frozen=True)
class TorqueComparison:
    gyro_torque: float
    pendulum_torque: float
    ratio: float


@dataclass(frozen=True)
class ManeuverStep:
    """Constant gimbal rates (and optional rotor setpoint) held for a while."""

    duration: float
    alpha_rate: float = 0.0
    beta_rate: float = 0.0
    rotor_speed_target: float = None  # None holds the current setpoint

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ValueError(f"step duration must be > 0, got {self.duration!r}")


@dataclass(frozen=True)
class RecoveryScript:
    strategy: str
    steps: tuple

    @property
    def duration(self) -> float:
        return sum(step.duration for step in self.steps)


def rolling_axis_estimate(state: RobotState, commanded=(1.0, 0.0, 0.0)) -> np.ndarray:
    """Horizontal unit axis the shell currently rolls about.

    Falls back to the commanded direction when the shell spins too
    slowly for its motion to define one; this removes a 0/0 at rest.
    """
    omega_world = state.rotation_matrix @ state.omega_body
    horizontal = np.array([omega_world[0], omega_world[1], 0.0])
    if np.linalg.norm(omega_world) > _ROLLING_OMEGA_MIN and np.linalg.norm(horizontal) > 1e-9:
        return horizontal / np.linalg.norm(horizontal)
    fallback = np.array([commanded[0], commanded[1], 0.0])
    norm = np.linalg.norm(fallback)
    if norm < 1e-9:
        return np.array([1.0, 0.0, 0.0])
    return fallback / norm


def heading_estimate(state: RobotState) -> np.ndarray:
    """Horizontal unit vector the robot treats as forward."""
    forward = state.rotation_matrix @ np.array([1.0, 0.0, 0.0])
    horizontal = np.array([forward[0], forward[1], 0.0])
    norm = np.linalg.norm(horizontal)
    if norm < 1e-6:
        # long axis pointing straight up: any heading is as good as world x
        return np.array([1.0, 0.0, 0.0])
    return horizontal / norm


def command_to_gimbal_targets(
    cmd: DriveCommand,
    params: RobotParams,
    state: RobotState,
    gear: GearTrainSpec = GearTrainSpec(),
    servo: ServoModel = ServoModel(),
    now: float = None,
):
    """Gimbal rate targets (alpha_rate, beta_rate) realizing a command.

    Odd in the command by construction: the requested torque is linear
    in it and the servo-limit clamp scales both rates by a factor even
    under sign flips. Stale commands (older than the watchdog window
    relative to `now`) produce zero targets, as does a stopped rotor.
    """
    if now is not None and cmd.is_stale(now):
        return 0.0, 0.0
    spin_momentum = params.rotor_spin_inertia * state.rotor_rate
    if abs(spin_momentum) < _MIN_MOMENTUM:
        return 0.0, 0.0

    heading = heading_estimate(state)
    left = np.array([-heading[1], heading[0], 0.0])  # z x heading
    torque_des = FORWARD_TORQUE * cmd.forward * left + TURN_TORQUE * cmd.turn * np.array(
        [0.0, 0.0, 1.0]
    )
    momentum = spin_momentum * rotor_axis_world(state)
    # minimal-norm precession with omega x L closest to the request
    omega_des = np.cross(momentum, torque_des) / float(momentum @ momentum)

    # achievable part: decompose onto the two gimbal axes in the shell frame
    rot = state.rotation_matrix
    s_des = rot.T @ omega_des
    axis_alpha = np.array([1.0, 0.0, 0.0])
    axis_beta = rot_x(state.gimbal.alpha) @ np.array([0.0, 1.0, 0.0])
    alpha_rate = float(s_des @ axis_alpha)
    beta_rate = float(s_des @ axis_beta)

    rate_1, rate_2 = servo_rates_for_gimbal_rates(alpha_rate, beta_rate, gear)
    worst = max(abs(rate_1), abs(rate_2))
    if worst > servo.max_speed:
        scale = servo.max_speed / worst
        alpha_rate *= scale
        beta_rate *= scale
    return alpha_rate, beta_rate


def reservoir_gauge(params: RobotParams, state: RobotState, rolling_axis) -> ReservoirGauge:
    """Alignment gauge between the rotor spin axis and the rolling axis."""
    axis = np.asarray(rolling_axis, dtype=float)
    norm = np.linalg.norm(axis)
    if not 0.999999 < norm < 1.000001:
        raise ValueError(f"rolling_axis must be unit length, got |a| = {norm!r}")
    if abs(params.rotor_spin_inertia * state.rotor_rate) < _MIN_MOMENTUM:
        return ReservoirGauge(angle=0.0, fraction=0.0, rotor_stopped=True)
    spin_axis = rotor_axis_world(state)
    cosine = float(np.clip(spin_axis @ (axis / norm), -1.0, 1.0))
    angle = math.acos(cosine)
    return ReservoirGauge(angle=angle, fraction=math.sin(angle))


def pendulum_max_static_torque(model: PendulumDriveModel, g: float = STANDARD_GRAVITY) -> float:
    """Largest torque a shifted weight can hold against gravity."""
    if g < 0.0:
        raise ValueError(f"g must be >= 0, got {g!r}")
    return model.weight_mass * g * model.weight_offset * math.sin(model.tilt_angle)


def reservoir_vs_pendulum_report(
    params: RobotParams,
    model: PendulumDriveModel,
    rotor_speed: float,
    gimbal_rate: float,
    alignment_angle: float = math.pi / 2.0,
) -> TorqueComparison:
    """Gyroscopic reaction torque against the weight-shift ceiling.

    The gyro side is |gimbal precession x rotor momentum| at the given
    alignment; the pendulum side never exceeds its static maximum no
    matter how fast the weight moves.
    """
    if rotor_speed < 0.0 or gimbal_rate < 0.0:
        raise ValueError("rotor speed and gimbal rate must be >= 0")
    gyro = (
        params.rotor_spin_inertia * rotor_speed * gimbal_rate * math.sin(alignment_angle)
    )
    pendulum = pendulum_max_static_torque(model)
    if pendulum > 0.0:
        ratio = gyro / pendulum
    else:
        ratio = math.inf if gyro > 0.0 else 0.0
    return TorqueComparison(gyro_torque=gyro, pendulum_torque=pendulum, ratio=ratio)


def recovery_planner(
    params: RobotParams, state: RobotState, strategy: str = None
) -> RecoveryScript:
    """Timed maneuver restoring gyroscopic authority.

    Picks ground-friction precession while some reservoir or rolling
    motion remains, rocking about the long axis on aspherical shells,
    and the stop-and-reset fallback otherwise. A healthy gauge gets an
    empty script. Pass `strategy` to force one of the three.
    """
    axis = rolling_axis_estimate(state)
    gauge = reservoir_gauge(params, state, axis)
    if strategy is None:
        if not gauge.rotor_stopped and gauge.fraction >= RECOVERY_THRESHOLD:
            return RecoveryScript(strategy="none", steps=())
        rolling = np.linalg.norm(state.omega_body) > _ROLLING_OMEGA_MIN
        if not gauge.rotor_stopped and (gauge.fraction >= 0.05 or rolling):
            strategy = "friction-precess"
        elif not params.is_spherical:
            strategy = "long-axis-rock"
        else:
            strategy = "stop-and-reset"

    if strategy == "friction-precess":
        return RecoveryScript(strategy, _friction_precess_steps(state, axis))
    if strategy == "long-axis-rock":
        if params.is_spherical:
            # a sphere has no long axis to rock about
            return RecoveryScript(
                "friction-precess", _friction_precess_steps(state, axis)
            )
        rate = 0.8
        return RecoveryScript(
            strategy,
            (
                ManeuverStep(0.8, alpha_rate=rate),
                ManeuverStep(1.6, alpha_rate=-rate),
                ManeuverStep(0.8, alpha_rate=rate),
            ),
        )
    if strategy == "stop-and-reset":
        realign_time = 1.5
        return RecoveryScript(
            strategy,
            (
                ManeuverStep(2.5, rotor_speed_target=0.0),
                ManeuverStep(
                    realign_time,
                    alpha_rate=-state.gimbal.alpha / realign_time,
                    beta_rate=-state.gimbal.beta / realign_time,
                    rotor_speed_target=0.0,
                ),
                ManeuverStep(2.5, rotor_speed_target=DEFAULT_ROTOR_SPEED),
            ),
        )
    raise ValueError(f"unknown recovery strategy {strategy!r}")


def _friction_precess_steps(state: RobotState, rolling_axis) -> tuple:
    """Slow precession pushing the spin axis away from the rolling axis."""
    spin_axis = rotor_axis_world(state)
    precess_world = np.cross(rolling_axis, spin_axis)
    norm = np.linalg.norm(precess_world)
    if norm < 1e-9:
        # axes parallel: any perpendicular precession helps, pick one
        helper = np.array([0.0, 0.0, 1.0])
        if abs(spin_axis @ helper) > 0.99:
            helper = np.array([0.0, 1.0, 0.0])
        precess_world = np.cross(spin_axis, helper)
        norm = np.linalg.norm(precess_world)
    precess_world *= 0.6 / norm

    rot = state.rotation_matrix
    s_des = rot.T @ precess_world
    axis_beta = rot_x(state.gimbal.alpha) @ np.array([0.0, 1.0, 0.0])
    return (
        ManeuverStep(
            1.5,
            alpha_rate=float(s_des[0]),
            beta_rate=float(s_des @ axis_beta),
        ),
    )
