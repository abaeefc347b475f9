"""Ellipsoid-on-plane contact with regularized Coulomb friction.

The shell touches the ground at a single point (generic for a convex
body on a plane). Normal force is a spring-damper on penetration depth,
clamped so the ground never pulls. Friction opposes the contact-point
slip velocity through a continuous coefficient ramp: linear up to the
regularization speed, blending from the static to the kinetic value
just above it. This sidesteps stick-slip complementarity; the
`rolling_residual` diagnostic measures what the regularization costs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import RobotState
from .params import RobotParams
from .rotation import quat_to_matrix


@dataclass(frozen=True)
class GroundPlane:
    """Flat ground {x : normal . x = height} with contact material properties.

    Stiffness and damping are penalty-method tunables, not physical
    constants. The defaults give a 7 kg robot about 1.4 mm of static
    penetration and half-critical normal damping.
    """

    normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    height: float = 0.0
    stiffness: float = 5.0e4
    damping: float = 600.0
    mu_static: float = 0.8
    mu_kinetic: float = 0.6
    slip_regularization_velocity: float = 1.0e-3

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValueError(f"normal must be a finite 3-vector, got {n!r}")
        length = float(np.linalg.norm(n))
        if abs(length - 1.0) > 1e-6:
            raise ValueError(f"normal must be unit length, got |n| = {length!r}")
        n = n / length
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        for name in ("stiffness", "damping", "mu_static", "mu_kinetic"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if not self.slip_regularization_velocity > 0.0:
            raise ValueError("slip_regularization_velocity must be > 0")

    @staticmethod
    def tuned_for(total_mass: float, stiffness: float = 5.0e4,
                  damping_ratio: float = 0.5, **kwargs) -> "GroundPlane":
        """Plane with damping set to `damping_ratio` of critical for `total_mass`."""
        if total_mass <= 0.0:
            raise ValueError(f"total_mass must be > 0, got {total_mass!r}")
        damping = 2.0 * damping_ratio * math.sqrt(stiffness * total_mass)
        return GroundPlane(stiffness=stiffness, damping=damping, **kwargs)


@dataclass(frozen=True)
class ContactResult:
    """What the contact solver found at one instant."""

    point: np.ndarray
    depth: float
    normal_force: float
    friction_force: np.ndarray
    rolling: bool

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float)
        fric = np.asarray(self.friction_force, dtype=float)
        if not (np.all(np.isfinite(point)) and np.all(np.isfinite(fric))):
            raise ValueError("contact point and friction force must be finite")
        if self.normal_force < 0.0:
            raise ValueError(f"normal force must be >= 0, got {self.normal_force!r}")
        point.setflags(write=False)
        fric.setflags(write=False)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "friction_force", fric)

    @property
    def in_contact(self) -> bool:
        return self.depth > 0.0


def ellipsoid_support_point(semi_axes, orientation, center, direction) -> np.ndarray:
    """Point of the ellipsoid surface extremal in a world direction.

    The ellipsoid is the image of the unit sphere under scaling by the
    semi-axes followed by the rotation: the sphere's support map is the
    normalized direction, so the ellipsoid's follows by pushing the
    direction through the transpose and the point back through the map.

    Args:
        semi_axes: (a, b, c) along the body axes [m].
        orientation: body-to-world unit quaternion.
        center: ellipsoid center in world [m].
        direction: unit world vector to maximize along.

    Returns:
        Surface point p maximizing dot(p, direction), world frame.
    """
    axes = np.asarray(semi_axes, dtype=float)
    if axes.shape != (3,) or np.any(axes <= 0.0):
        raise ValueError(f"semi-axes must be three positive lengths, got {axes!r}")
    d = np.asarray(direction, dtype=float)
    length = float(np.linalg.norm(d))
    if not 0.999999 < length < 1.000001:
        raise ValueError(f"direction must be unit length, got |d| = {length!r}")
    rot = quat_to_matrix(np.asarray(orientation, dtype=float))
    scaled = axes * (rot.T @ (d / length))
    support_body = axes * (scaled / np.linalg.norm(scaled))
    return np.asarray(center, dtype=float) + rot @ support_body


def _friction_coefficient(plane: GroundPlane, slip_speed: float) -> float:
    # linear ramp to mu_static at the regularization speed, then a
    # linear blend down to mu_kinetic over one more regularization width
    v = plane.slip_regularization_velocity
    if slip_speed <= v:
        return plane.mu_static * (slip_speed / v)
    if slip_speed <= 2.0 * v:
        return plane.mu_static + (plane.mu_kinetic - plane.mu_static) * (
            slip_speed / v - 1.0
        )
    return plane.mu_kinetic


def contact_wrench(plane: GroundPlane, params: RobotParams, state: RobotState):
    """Ground reaction on the shell: (force, torque about shell COM, ContactResult).

    Both force and torque are world-frame; the pair plugs straight into
    the dynamics step as an external wrench. Separated shell gets an
    exact zero wrench.
    """
    rot = state.rotation_matrix
    lowest = ellipsoid_support_point(
        params.semi_axes, state.orientation, state.position, -plane.normal
    )
    depth = plane.height - float(plane.normal @ lowest)
    if depth <= 0.0:
        return (
            np.zeros(3),
            np.zeros(3),
            ContactResult(lowest, 0.0, 0.0, np.zeros(3), False),
        )

    omega_world = rot @ state.omega_body
    v_point = state.velocity + np.cross(omega_world, lowest - state.position)
    depth_rate = -float(plane.normal @ v_point)
    normal_force = plane.stiffness * depth + plane.damping * depth_rate
    if normal_force < 0.0:
        normal_force = 0.0

    v_tangent = v_point + depth_rate * plane.normal
    slip = float(np.linalg.norm(v_tangent))
    if slip > 0.0 and normal_force > 0.0:
        mu = _friction_coefficient(plane, slip)
        friction = (-mu * normal_force / slip) * v_tangent
    else:
        friction = np.zeros(3)

    force = normal_force * plane.normal + friction
    shell_com = state.position + rot @ params.shell.com_offset
    torque = np.cross(lowest - shell_com, force)
    result = ContactResult(
        lowest, depth, normal_force, friction,
        rolling=slip < plane.slip_regularization_velocity,
    )
    return force, torque, result


def rolling_residual(params: RobotParams, state: RobotState, contact: ContactResult) -> float:
    """Speed of the shell material point at the contact, world frame.

    Zero for perfect rolling. Raises if called without an active
    contact; a residual of a separated shell means the caller's
    bookkeeping is wrong.
    """
    if not contact.in_contact:
        raise ValueError("rolling_residual needs an active contact")
    omega_world = state.rotation_matrix @ state.omega_body
    v_point = state.velocity + np.cross(omega_world, contact.point - state.position)
    return float(np.linalg.norm(v_point))


def contact_spring_energy(plane: GroundPlane, contact: ContactResult) -> float:
    """Elastic energy currently stored in the penetration spring [J]."""
    return 0.5 * plane.stiffness * contact.depth * contact.depth


def contact_dissipation_rate(
    plane: GroundPlane, params: RobotParams, state: RobotState, contact: ContactResult
) -> float:
    """Instantaneous power lost to friction and normal damping [W].

    Non-negative by construction: friction opposes slip, and whenever
    the clamp zeroes the normal force the spring energy drains without
    doing work on the body.
    """
    if not contact.in_contact:
        return 0.0
    omega_world = state.rotation_matrix @ state.omega_body
    v_point = state.velocity + np.cross(omega_world, contact.point - state.position)
    depth_rate = -float(plane.normal @ v_point)
    v_tangent = v_point + depth_rate * plane.normal
    friction_power = -float(contact.friction_force @ v_tangent)
    normal_power = depth_rate * (
        contact.normal_force - plane.stiffness * contact.depth
    )
    return friction_power + normal_power
