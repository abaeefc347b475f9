"""Servo-to-gimbal transmission, spherical bevel-gear sizing and actuator models.

The two servos sit on the shell along its symmetry axis and drive both
gimbal rings through one shared bevel-gear train. Their angles mix into
the outer-gimbal angle ``alpha`` and inner-gimbal angle ``beta`` by a
fixed 2x2 linear map. The physical prototypes are described with two
mutually inconsistent role assignments for that map, so the map is
selectable:

- ``Convention.SUM_TO_OUTER`` (default, "printed-eq1"): equal servo
  motion drives the outer ring, opposing motion drives the inner ring.
- ``Convention.SUM_TO_INNER`` ("text-figure"): the roles are swapped;
  equal servo motion drives the inner ring.

All downstream control code converts through this layer, never through a
hand-written matrix.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi
RPM_TO_RAD_S = TWO_PI / 60.0
DEFAULT_ROTOR_SPEED = 3000.0 * RPM_TO_RAD_S  # rad/s


class Convention(Enum):
    """Role assignment of the servo sum/difference onto the gimbal rings."""

    SUM_TO_OUTER = "printed-eq1"
    SUM_TO_INNER = "text-figure"


def wrap_angle(angle: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    w = angle % TWO_PI
    if w > math.pi:
        w -= TWO_PI
    return w


def _require_finite(name, *values):
    # scalar-only on purpose; math.isfinite is ~25x cheaper than the
    # numpy equivalent and this runs in every angle-container init
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name}: non-finite value {v!r}")


@dataclass(frozen=True)
class GimbalAngles:
    """Outer/inner gimbal angles [rad] and rates [rad/s], angles in (-pi, pi]."""

    alpha: float
    beta: float
    alpha_rate: float = 0.0
    beta_rate: float = 0.0

    def __post_init__(self):
        _require_finite("GimbalAngles", self.alpha, self.beta, self.alpha_rate, self.beta_rate)
        object.__setattr__(self, "alpha", wrap_angle(self.alpha))
        object.__setattr__(self, "beta", wrap_angle(self.beta))


@dataclass(frozen=True)
class ServoAngles:
    """Angles [rad] and rates [rad/s] of the two gimbal-drive servos."""

    gamma_s1: float
    gamma_s2: float
    gamma_s1_rate: float = 0.0
    gamma_s2_rate: float = 0.0

    def __post_init__(self):
        _require_finite(
            "ServoAngles", self.gamma_s1, self.gamma_s2, self.gamma_s1_rate, self.gamma_s2_rate
        )
        object.__setattr__(self, "gamma_s1", wrap_angle(self.gamma_s1))
        object.__setattr__(self, "gamma_s2", wrap_angle(self.gamma_s2))


@dataclass(frozen=True)
class GearTrainSpec:
    """Geometry of the gimbal-drive bevel-gear set.

    Attributes:
        pitch_circle_radius_m: radius of the circle the gear set is laid
            out on (big gears sized as octagon sides of the tangential
            polygon, small gears as hexadecagon sides).
        teeth_big / teeth_small: tooth counts, coprime by construction.
        inner_drive_ratio: multiplier applied on the inner-gimbal row of
            the transmission map. The idealized map uses 1.0; set it to
            the physical stage ratio to model the real train.
        convention: which servo combination drives which ring.
    """

    pitch_circle_radius_m: float = 0.08
    teeth_big: int = 48
    teeth_small: int = 23
    inner_drive_ratio: float = 1.0
    convention: Convention = Convention.SUM_TO_OUTER

    def __post_init__(self):
        if self.pitch_circle_radius_m <= 0.0:
            raise ValueError("pitch_circle_radius_m must be > 0")
        if self.teeth_big <= 0 or self.teeth_small <= 0:
            raise ValueError("tooth counts must be positive")
        if math.gcd(self.teeth_big, self.teeth_small) != 1:
            raise ValueError(
                f"tooth counts {self.teeth_big}:{self.teeth_small} must be coprime"
            )
        if abs(self.teeth_small / self.teeth_big - ideal_gear_ratio()) >= 0.005:
            raise ValueError(
                "tooth ratio deviates from the bevel-geometry ratio by 0.005 or more"
            )
        if self.inner_drive_ratio == 0.0 or not np.isfinite(self.inner_drive_ratio):
            raise ValueError("inner_drive_ratio must be finite and nonzero")

    @property
    def tooth_ratio(self) -> float:
        return self.teeth_small / self.teeth_big


@functools.lru_cache(maxsize=None)
def _mix_matrix(spec: GearTrainSpec) -> np.ndarray:
    """2x2 map from (gamma_s1, gamma_s2) to (alpha, beta). Cached; treat as read-only."""
    if spec.convention is Convention.SUM_TO_OUTER:
        m = np.array([[0.5, 0.5], [0.5, -0.5]])
    else:
        m = np.array([[0.5, -0.5], [0.5, 0.5]])
    m[1, :] *= spec.inner_drive_ratio
    return m


@functools.lru_cache(maxsize=None)
def _mix_scalars(spec: GearTrainSpec) -> tuple[tuple, tuple]:
    """Forward and inverse map entries as plain floats for the hot paths."""
    m = _mix_matrix(spec)
    minv = np.linalg.inv(m)
    return tuple(m.ravel().tolist()), tuple(minv.ravel().tolist())


def servo_to_gimbal(servos: ServoAngles, spec: GearTrainSpec) -> GimbalAngles:
    """Map servo angles and rates to gimbal angles and rates."""
    (a, b, c, d), _ = _mix_scalars(spec)
    return GimbalAngles(
        a * servos.gamma_s1 + b * servos.gamma_s2,
        c * servos.gamma_s1 + d * servos.gamma_s2,
        a * servos.gamma_s1_rate + b * servos.gamma_s2_rate,
        c * servos.gamma_s1_rate + d * servos.gamma_s2_rate,
    )


def gimbal_to_servo(gimbal: GimbalAngles, spec: GearTrainSpec) -> ServoAngles:
    """Exact inverse of `servo_to_gimbal`."""
    _, (a, b, c, d) = _mix_scalars(spec)
    return ServoAngles(
        a * gimbal.alpha + b * gimbal.beta,
        c * gimbal.alpha + d * gimbal.beta,
        a * gimbal.alpha_rate + b * gimbal.beta_rate,
        c * gimbal.alpha_rate + d * gimbal.beta_rate,
    )


def servo_rates_for_gimbal_rates(
    alpha_rate: float, beta_rate: float, spec: GearTrainSpec
) -> tuple[float, float]:
    """Rate-only inverse map, for rate-level control."""
    _, (a, b, c, d) = _mix_scalars(spec)
    return a * alpha_rate + b * beta_rate, c * alpha_rate + d * beta_rate


def gimbal_torques_for_servo_torques(
    tau_s1: float, tau_s2: float, spec: GearTrainSpec
) -> tuple[float, float]:
    """Torque map conjugate to the angle map (power-consistent)."""
    _, (a, b, c, d) = _mix_scalars(spec)
    # inverse transpose: rows become columns
    return a * tau_s1 + c * tau_s2, b * tau_s1 + d * tau_s2


def bevel_gear_diameters(r: float) -> tuple[float, float]:
    """Pitch diameters (big, small) of the spherical bevel gears.

    The big gear spans one side of a regular octagon and the small gear
    one side of a regular hexadecagon, both tangential polygons of the
    circle of radius r.
    """
    if r <= 0.0:
        raise ValueError(f"gear-set circle radius must be > 0, got {r!r}")
    return 2.0 * r * math.tan(math.pi / 8.0), 2.0 * r * math.tan(math.pi / 16.0)


def ideal_gear_ratio() -> float:
    """Small-to-big diameter ratio fixed by the polygon construction."""
    return math.tan(math.pi / 16.0) / math.tan(math.pi / 8.0)


def select_tooth_counts(ideal_ratio: float, max_teeth: int) -> tuple[int, int]:
    """Pick the coprime pair (big, small) whose small/big is closest to `ideal_ratio`.

    Ties break toward the smaller big gear. Non-coprime pairs are never
    considered; they would wear unevenly because the same tooth pairs
    keep meeting.
    """
    if not (0.0 < ideal_ratio < 1.0):
        raise ValueError(f"ideal_ratio must lie in (0, 1), got {ideal_ratio!r}")
    if max_teeth < 8:
        raise ValueError(f"max_teeth must be >= 8, got {max_teeth!r}")

    best: tuple[float, int, int] | None = None
    for big in range(2, max_teeth + 1):
        for small in range(1, big):
            if math.gcd(big, small) != 1:
                continue
            err = abs(small / big - ideal_ratio)
            if best is None or err < best[0]:
                best = (err, big, small)
    assert best is not None
    return best[1], best[2]


@dataclass(frozen=True)
class ServoModel:
    """Position-commanded servo: first-order lag with rate and torque limits."""

    max_speed: float = 4.0  # rad/s
    max_torque: float = 8.0  # N m
    position_gain: float = 20.0  # 1/s
    deadband: float = 1e-4  # rad

    def __post_init__(self):
        if min(self.max_speed, self.max_torque, self.position_gain) <= 0.0:
            raise ValueError("servo limits and gain must be positive")
        if self.deadband < 0.0:
            raise ValueError("deadband must be >= 0")


def servo_step(
    model: ServoModel, current: float, target: float, dt: float
) -> tuple[float, float]:
    """Advance a servo one step toward its position target.

    Returns (new_angle, applied_torque). Inside the deadband the servo
    holds position with zero output; outside it tracks as a first-order
    lag, displacement clamped to max_speed*dt and torque to max_torque.
    """
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt!r}")
    err = target - current
    if abs(err) <= model.deadband:
        return current, 0.0
    step = err * -math.expm1(-model.position_gain * dt)
    max_step = model.max_speed * dt
    if abs(step) > max_step:
        step = math.copysign(max_step, step)
    torque = model.max_torque * (step / max_step)
    return current + step, torque


@dataclass(frozen=True)
class RotorDrive:
    """Constant-speed drive for the main rotor (proportional speed loop)."""

    target_speed: float = DEFAULT_ROTOR_SPEED  # rad/s
    speed_gain: float = 0.5  # N m s/rad
    max_torque: float = 2.0  # N m

    def __post_init__(self):
        if self.target_speed < 0.0:
            raise ValueError("target_speed must be >= 0")
        if self.speed_gain <= 0.0 or self.max_torque <= 0.0:
            raise ValueError("speed_gain and max_torque must be positive")


def rotor_speed_control(drive: RotorDrive, current_speed: float) -> float:
    """Torque holding the rotor at its speed setpoint, clamped to the drive limit."""
    _require_finite("rotor speed", current_speed)
    torque = drive.speed_gain * (drive.target_speed - current_speed)
    return float(np.clip(torque, -drive.max_torque, drive.max_torque))
