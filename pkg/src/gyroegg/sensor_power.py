"""IMU models for the two mount points, plus the battery and regulator chain.

One IMU sits on the hull, the other on the inner gimbal ring; both
report body-frame angular rate and specific force. The power side
models a 7S li-ion pack feeding two linear 12 V servo rails, a 5 V
buck rail for the controller, and the spin motor directly at pack
voltage. The motor's electrical draw is an estimate calibrated so a
full pack runs it for about an hour; nobody published the real figure.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .dynamics import RobotState, generalized_acceleration, point_kinematics
from .params import RobotParams
from .rotation import Frame, quat_identity, quat_integrate, quat_normalize, quat_to_matrix
from .transmission import DEFAULT_ROTOR_SPEED

# generic MEMS-class noise floors
DEFAULT_GYRO_NOISE = math.radians(0.01)  # rad/s/sqrt(Hz)
DEFAULT_ACCEL_NOISE = 100e-6 * 9.81  # m/s^2/sqrt(Hz)

# full-speed electrical draw of the spin motor, chosen so the pack's
# 67.34 Wh lasts about an hour against it
SPIN_MOTOR_FULL_POWER = 67.3  # W
MOTOR_EFFICIENCY = 0.7
MOTOR_IDLE_POWER = 3.0  # W

_MOUNT_BODY = {Frame.SHELL: 0, Frame.INNER_GIMBAL: 2}


@dataclass(frozen=True)
class ImuMount:
    """Where an IMU sits and how badly it reads."""

    frame: Frame = Frame.SHELL
    position_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation_offset: np.ndarray = field(default_factory=quat_identity)
    gyro_noise_density: float = DEFAULT_GYRO_NOISE
    accel_noise_density: float = DEFAULT_ACCEL_NOISE
    sample_rate: float = 200.0

    def __post_init__(self):
        if self.frame not in _MOUNT_BODY:
            raise ValueError(f"IMUs mount on the hull or the inner ring, got {self.frame}")
        pos = np.asarray(self.position_offset, dtype=float)
        quat = quat_normalize(np.asarray(self.orientation_offset, dtype=float))
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ValueError(f"position_offset must be a finite 3-vector, got {pos!r}")
        if self.gyro_noise_density < 0.0 or self.accel_noise_density < 0.0:
            raise ValueError("noise densities must be >= 0")
        if not self.sample_rate > 0.0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate!r}")
        pos.setflags(write=False)
        quat.setflags(write=False)
        object.__setattr__(self, "position_offset", pos)
        object.__setattr__(self, "orientation_offset", quat)


def imu_read(mount, params, state, rng_seed=None, accel=None):
    """One IMU sample: (gyro rad/s, specific force m/s^2), mount frame.

    `accel` is the current generalized acceleration; pass the one the
    integrator just computed to read specific force under contact and
    actuation. None recomputes the free-coasting acceleration, which is
    exact for an unactuated robot. `rng_seed` may be an int or a
    numpy Generator; None disables the noise injection entirely.
    """
    udot = accel
    if udot is None:
        udot = generalized_acceleration(params, state)
    body = _MOUNT_BODY[mount.frame]
    _, _, acc, rot_body, omega_body = point_kinematics(
        params, state, body, mount.position_offset, udot
    )
    offset_rot = quat_to_matrix(mount.orientation_offset)
    gyro = offset_rot.T @ omega_body
    gravity = np.array([0.0, 0.0, -params.gravity])
    specific = offset_rot.T @ (rot_body.T @ (acc - gravity))
    if rng_seed is not None:
        rng = (
            rng_seed
            if isinstance(rng_seed, np.random.Generator)
            else np.random.default_rng(rng_seed)
        )
        root_rate = math.sqrt(mount.sample_rate)
        gyro = gyro + rng.normal(0.0, mount.gyro_noise_density * root_rate, 3)
        specific = specific + rng.normal(0.0, mount.accel_noise_density * root_rate, 3)
    return gyro, specific


def attitude_from_imu(samples, dt, gain=0.05):
    """Complementary-filter attitude from a history of (gyro, accel) pairs.

    Integrates the gyro and pulls the estimated gravity direction
    toward the accelerometer's at `gain` per sample. Heading is held
    by the gyro alone; the accelerometer cannot see rotation about
    gravity, so only tilt converges for a static robot.
    """
    if len(samples) < 1:
        raise ValueError("need at least one sample")
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    quat = quat_identity()
    for gyro, accel in samples:
        gyro = np.asarray(gyro, dtype=float)
        accel = np.asarray(accel, dtype=float)
        norm = np.linalg.norm(gyro) * dt
        if norm > 0.0:
            quat = quat_integrate(quat, gyro, dt)
        a_norm = np.linalg.norm(accel)
        if a_norm > 1e-6:
            measured_up = accel / a_norm
            predicted_up = quat_to_matrix(quat).T @ np.array([0.0, 0.0, 1.0])
            correction = np.cross(measured_up, predicted_up)
            if np.linalg.norm(correction) > 0.0:
                quat = quat_integrate(quat, gain / dt * correction, dt)
    return quat


@dataclass(frozen=True)
class BatteryPack:
    """Series li-ion pack with an affine voltage-vs-charge model."""

    cells_series: int = 7
    cell_voltage: float = 3.7  # nominal, used for the energy figure
    cell_capacity: float = 2.6  # Ah
    charge_state: float = 2.6  # Ah remaining
    protection_cutoff_voltage: float = 21.0

    CELL_FULL = 4.2
    CELL_EMPTY = 3.0

    def __post_init__(self):
        if self.cells_series < 1:
            raise ValueError("need at least one cell")
        if not 0.0 <= self.charge_state <= self.cell_capacity:
            raise ValueError(
                f"charge_state must lie in [0, {self.cell_capacity}], "
                f"got {self.charge_state!r}"
            )

    @property
    def state_of_charge(self) -> float:
        return self.charge_state / self.cell_capacity

    @property
    def voltage(self) -> float:
        per_cell = self.CELL_EMPTY + (self.CELL_FULL - self.CELL_EMPTY) * self.state_of_charge
        return self.cells_series * per_cell

    @property
    def nominal_energy_wh(self) -> float:
        return self.cells_series * self.cell_voltage * self.cell_capacity


class RailKind(Enum):
    LINEAR = "linear"
    BUCK = "buck"


@dataclass(frozen=True)
class Rail:
    voltage: float
    kind: RailKind
    efficiency: float = 1.0

    def __post_init__(self):
        if not self.voltage > 0.0:
            raise ValueError(f"rail voltage must be > 0, got {self.voltage!r}")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency!r}")


@dataclass(frozen=True)
class RegulatorChain:
    """Rails between the pack and everything that is not the spin motor."""

    rails: tuple = (
        Rail(12.0, RailKind.LINEAR),
        Rail(12.0, RailKind.LINEAR),
        Rail(5.0, RailKind.BUCK, efficiency=0.8),
    )


@dataclass(frozen=True)
class LoadProfile:
    """Current per rail plus the motor's direct-at-pack power draw."""

    rail_currents: tuple = (0.0, 0.0, 0.0)
    dc_motor_power: float = 0.0  # W at the pack terminals

    def __post_init__(self):
        if any(i < 0.0 for i in self.rail_currents) or self.dc_motor_power < 0.0:
            raise ValueError("loads must be >= 0")

    @staticmethod
    def motor_only(rotor_speed=DEFAULT_ROTOR_SPEED, mechanical_power=0.0) -> "LoadProfile":
        return LoadProfile(
            rail_currents=(0.0, 0.0, 0.0),
            dc_motor_power=spin_motor_power(rotor_speed, mechanical_power),
        )

    @staticmethod
    def full_actuation(rotor_speed=DEFAULT_ROTOR_SPEED, mechanical_power=0.0) -> "LoadProfile":
        # two servos at their rated 1.5 A, controller at 0.5 A on the
        # 5 V rail, motor holding speed
        return LoadProfile(
            rail_currents=(1.5, 1.5, 0.5),
            dc_motor_power=spin_motor_power(rotor_speed, mechanical_power),
        )


def spin_motor_power(rotor_speed, mechanical_power=0.0) -> float:
    """Electrical draw of the spin motor [W].

    Speed-dependent spin-hold losses (quadratic, calibrated at full
    speed) plus any commanded mechanical power through the motor
    efficiency, plus controller idle draw. Off means off.
    """
    if rotor_speed == 0.0 and mechanical_power == 0.0:
        return 0.0
    hold = SPIN_MOTOR_FULL_POWER * (rotor_speed / DEFAULT_ROTOR_SPEED) ** 2
    return hold + max(mechanical_power, 0.0) / MOTOR_EFFICIENCY + MOTOR_IDLE_POWER


def pack_current(pack: BatteryPack, chain: RegulatorChain, load: LoadProfile) -> float:
    """Total current out of the pack for this load [A]."""
    if len(load.rail_currents) != len(chain.rails):
        raise ValueError(
            f"load names {len(load.rail_currents)} rails, chain has {len(chain.rails)}"
        )
    voltage = pack.voltage
    total = load.dc_motor_power / voltage
    for rail, current in zip(chain.rails, load.rail_currents):
        if rail.kind is RailKind.LINEAR:
            if rail.voltage >= voltage and current > 0.0:
                raise ValueError(
                    f"linear {rail.voltage} V rail needs headroom, pack is at {voltage:.2f} V"
                )
            total += current
        else:
            total += rail.voltage * current / (voltage * rail.efficiency)
    return total


def rail_losses(pack: BatteryPack, chain: RegulatorChain, load: LoadProfile):
    """Per-rail dissipated power [W]: linear headroom drop, buck inefficiency."""
    voltage = pack.voltage
    losses = []
    for rail, current in zip(chain.rails, load.rail_currents):
        if rail.kind is RailKind.LINEAR:
            losses.append((voltage - rail.voltage) * current)
        else:
            out = rail.voltage * current
            losses.append(out * (1.0 - rail.efficiency) / rail.efficiency)
    return tuple(losses)


def power_step(pack: BatteryPack, chain: RegulatorChain, load: LoadProfile, dt: float):
    """Advance the pack by dt seconds: (new pack, pack current A, alive)."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    current = pack_current(pack, chain, load)
    drained = max(pack.charge_state - current * dt / 3600.0, 0.0)
    new_pack = replace(pack, charge_state=drained)
    return new_pack, current, new_pack.voltage > new_pack.protection_cutoff_voltage


def runtime_estimate(pack: BatteryPack, chain: RegulatorChain, load: LoadProfile) -> float:
    """Minutes until the pack is drained at this constant load.

    Closed form charge/current at the present pack voltage. Zero load
    never drains: returns infinity.
    """
    current = pack_current(pack, chain, load)
    if current == 0.0:
        return math.inf
    return pack.charge_state / current * 60.0
