"""Coupled equations of motion for the shell + gimbal + rotor chain.

Generalized coordinates: shell pose (position + quaternion) plus the
three joint angles (outer gimbal alpha, inner gimbal beta, rotor
angle). Quasi-velocities: world-frame shell COM velocity, body-frame
shell angular velocity, and the three joint rates, nine in total.

The mass matrix and bias forces are assembled by projecting each
body's Newton-Euler balance onto the joint-space Jacobians (virtual
power).
All Jacobians and bias accelerations are analytic, so conservation
holds to integrator accuracy rather than finite-difference accuracy.

Frame chain (each rotation relative to its parent):

    world <-quat- shell <-Rx(alpha)- outer <-Ry(beta)- inner <-Rz(theta)- rotor

Joint axes pass through the shell's geometric center. Per-body
Jacobians are built in the shell frame, where the shell rotation R
cancels in every product except the translational column block.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from gyroegg.params import RobotParams
from gyroegg.rotation import (
    quat_derivative,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
    rk4_step,
    rot_x,
    rot_y,
    rot_z,
    skew,
)
from gyroegg.transmission import GimbalAngles

N_COORDS = 9  # shell twist 6 + alpha, beta, rotor angle
FLAT_SIZE = 19
JOINT_EPSILON = 1e-12  # keeps M invertible when gimbal masses vanish
DEFAULT_RATE_BOUND = 1e4

_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])
_Z = np.array([0.0, 0.0, 1.0])


class SimulationUnstableError(RuntimeError):
    """Raised when rates blow past the configured bound mid-step."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class RobotState:
    """Full instantaneous state of the robot.

    `orientation` maps shell frame to world (scalar-first unit
    quaternion); `omega_body` is the shell angular velocity in the
    shell frame. Joint angles and rates live in `gimbal` plus the
    rotor pair.
    """

    position: np.ndarray
    orientation: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega_body: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gimbal: GimbalAngles = GimbalAngles(0.0, 0.0)
    rotor_angle: float = 0.0
    rotor_rate: float = 0.0

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        vel = np.asarray(self.velocity, dtype=float)
        omg = np.asarray(self.omega_body, dtype=float)
        quat = np.asarray(self.orientation, dtype=float)
        for name, v in (("position", pos), ("velocity", vel), ("omega_body", omg)):
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 3-vector, got {v!r}")
        if quat.shape != (4,):
            raise ValueError(f"orientation must be a quaternion, got shape {quat.shape}")
        if not np.all(np.isfinite([self.rotor_angle, self.rotor_rate])):
            raise ValueError("rotor angle/rate must be finite")
        quat = quat_normalize(quat)
        for arr in (pos, vel, omg, quat):
            arr.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)
        object.__setattr__(self, "omega_body", omg)
        object.__setattr__(self, "orientation", quat)

    @staticmethod
    def at_rest(position=(0.0, 0.0, 0.0), rotor_rate=0.0) -> "RobotState":
        return RobotState(
            position=np.asarray(position, dtype=float),
            orientation=np.array([1.0, 0.0, 0.0, 0.0]),
            rotor_rate=rotor_rate,
        )

    @property
    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    def joint_rates(self) -> np.ndarray:
        return np.array([self.gimbal.alpha_rate, self.gimbal.beta_rate, self.rotor_rate])

    def to_flat(self) -> np.ndarray:
        return np.concatenate(
            [
                self.position,
                self.orientation,
                self.velocity,
                self.omega_body,
                [
                    self.gimbal.alpha,
                    self.gimbal.beta,
                    self.rotor_angle,
                    self.gimbal.alpha_rate,
                    self.gimbal.beta_rate,
                    self.rotor_rate,
                ],
            ]
        )

    @staticmethod
    def from_flat(flat: np.ndarray) -> "RobotState":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (FLAT_SIZE,):
            raise ValueError(f"flat state must have {FLAT_SIZE} entries, got {flat.shape}")
        return RobotState(
            position=flat[0:3],
            orientation=flat[3:7],
            velocity=flat[7:10],
            omega_body=flat[10:13],
            gimbal=GimbalAngles(flat[13], flat[14], flat[16], flat[17]),
            rotor_angle=flat[15],
            rotor_rate=flat[18],
        )


class ActuationMode(Enum):
    TORQUE = "torque"
    KINEMATIC = "kinematic"


@dataclass(frozen=True)
class ActuationInput:
    """Per-step actuation: joint torques, or gimbal rate targets.

    In TORQUE mode `alpha_cmd`/`beta_cmd` are joint torques in N m; in
    KINEMATIC mode they are rate targets in rad/s enforced exactly for
    the step. The rotor is always torque-driven.
    """

    mode: ActuationMode = ActuationMode.TORQUE
    alpha_cmd: float = 0.0
    beta_cmd: float = 0.0
    rotor_torque: float = 0.0

    def __post_init__(self):
        vals = (self.alpha_cmd, self.beta_cmd, self.rotor_torque)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"actuation must be finite, got {vals!r}")

    @staticmethod
    def torques(alpha=0.0, beta=0.0, rotor=0.0) -> "ActuationInput":
        return ActuationInput(ActuationMode.TORQUE, alpha, beta, rotor)

    @staticmethod
    def rate_targets(alpha_rate=0.0, beta_rate=0.0, rotor=0.0) -> "ActuationInput":
        return ActuationInput(ActuationMode.KINEMATIC, alpha_rate, beta_rate, rotor)


ZERO_ACTUATION = ActuationInput()


# body index order everywhere: shell, outer gimbal, inner gimbal, rotor
_JOINTS_OF = ((), (0,), (0, 1), (0, 1, 2))


@dataclass
class _Kinematics:
    """Per-state kinematic quantities, shell frame unless noted."""

    rot: np.ndarray  # shell -> world
    att: list  # body -> shell rotations, one per body
    axes: list  # joint axes a1, a2, a3
    axis_dots: list  # their frozen-rate time derivatives
    rel_omega: list  # s_k: body angular velocity relative to shell
    omega: list  # w_k = shell omega + s_k
    com: list  # rho_k: body COM position from shell center
    omega_body: list  # w_k expressed in body frame k
    jac_v: list  # world-frame COM velocity = rot @ (jac_v[k] @ u)
    jac_w: list  # body-frame angular velocity = att[k].T @ (jac_w[k] @ u)


def _kinematics(params: RobotParams, state: RobotState) -> _Kinematics:
    alpha, beta = state.gimbal.alpha, state.gimbal.beta
    rates = state.joint_rates()
    omega_s = state.omega_body

    r_out = rot_x(alpha)
    att = [np.eye(3), r_out, r_out @ rot_y(beta), None]
    att[3] = att[2] @ rot_z(state.rotor_angle)

    a1 = _X
    a2 = r_out @ _Y
    a3 = att[2] @ _Z
    axes = [a1, a2, a3]
    # a1 is fixed in the shell; a2 rides the outer gimbal, a3 the inner
    axis_dots = [
        np.zeros(3),
        np.cross(rates[0] * a1, a2),
        np.cross(rates[0] * a1 + rates[1] * a2, a3),
    ]

    rel_omega, omega, com, omega_body, jac_v, jac_w = [], [], [], [], [], []
    rot = state.rotation_matrix
    rot_t = rot.T
    for k, body in enumerate(params.bodies):
        s_k = np.zeros(3)
        for j in _JOINTS_OF[k]:
            s_k = s_k + rates[j] * axes[j]
        w_k = omega_s + s_k
        rho_k = att[k] @ body.com_offset

        jv = np.zeros((3, N_COORDS))
        jv[:, 0:3] = rot_t
        jv[:, 3:6] = -skew(rho_k)
        jw = np.zeros((3, N_COORDS))
        jw[:, 3:6] = np.eye(3)
        for j in _JOINTS_OF[k]:
            jv[:, 6 + j] = np.cross(axes[j], rho_k)
            jw[:, 6 + j] = axes[j]

        rel_omega.append(s_k)
        omega.append(w_k)
        com.append(rho_k)
        omega_body.append(att[k].T @ w_k)
        jac_v.append(jv)
        jac_w.append(jw)

    return _Kinematics(
        rot, att, axes, axis_dots, rel_omega, omega, com, omega_body, jac_v, jac_w
    )


def assemble_mass_matrix(params: RobotParams, state: RobotState) -> np.ndarray:
    """Generalized 9x9 mass matrix M(q), symmetric positive definite."""
    kin = _kinematics(params, state)
    m = np.zeros((N_COORDS, N_COORDS))
    for k, body in enumerate(params.bodies):
        if body.mass > 0.0:
            m += body.mass * kin.jac_v[k].T @ kin.jac_v[k]
        inertia_shell = kin.att[k] @ body.inertia_com @ kin.att[k].T
        m += kin.jac_w[k].T @ inertia_shell @ kin.jac_w[k]
    m[6:, 6:] += JOINT_EPSILON * np.eye(3)
    m = 0.5 * (m + m.T)
    eigvals = np.linalg.eigvalsh(m)
    if eigvals[0] <= 0.0:
        raise ValueError(
            f"mass matrix not positive definite (eigenvalues {eigvals}); "
            "parameter set is not physically consistent"
        )
    return m


def _bias_and_mass(params: RobotParams, state: RobotState):
    """Mass matrix and generalized bias force h, so that M du = Q - h."""
    kin = _kinematics(params, state)
    rates = state.joint_rates()
    omega_s = state.omega_body
    mass = np.zeros((N_COORDS, N_COORDS))
    bias = np.zeros(N_COORDS)
    for k, body in enumerate(params.bodies):
        # frozen-rate derivatives of the relative angular velocity and COM
        sdot_k = np.zeros(3)
        for j in _JOINTS_OF[k]:
            sdot_k = sdot_k + rates[j] * kin.axis_dots[j]
        w_k = kin.omega[k]
        rho_k = kin.com[k]
        rho_dot = np.cross(kin.rel_omega[k], rho_k)
        g_k = np.cross(w_k, rho_k)
        g_dot = np.cross(sdot_k, rho_k) + np.cross(w_k, rho_dot)
        accel_shell = np.cross(omega_s, g_k) + g_dot  # world accel, shell axes

        wb = kin.omega_body[k]
        att_t = kin.att[k].T
        # body-frame angular acceleration at frozen u
        wdot_body = att_t @ sdot_k - np.cross(att_t @ kin.rel_omega[k], wb)
        inertia = body.inertia_com
        torque_body = inertia @ wdot_body + np.cross(wb, inertia @ wb)

        if body.mass > 0.0:
            mass += body.mass * kin.jac_v[k].T @ kin.jac_v[k]
            bias += kin.jac_v[k].T @ (body.mass * accel_shell)
        inertia_shell = kin.att[k] @ inertia @ att_t
        mass += kin.jac_w[k].T @ inertia_shell @ kin.jac_w[k]
        bias += kin.jac_w[k].T @ (kin.att[k] @ torque_body)
    mass[6:, 6:] += JOINT_EPSILON * np.eye(3)
    return 0.5 * (mass + mass.T), bias, kin


def _generalized_forces(params, state, kin, actuation, wrench):
    q = np.zeros(N_COORDS)
    if params.gravity != 0.0:
        grav_shell = kin.rot.T @ np.array([0.0, 0.0, -params.gravity])
        for k, body in enumerate(params.bodies):
            if body.mass > 0.0:
                q += kin.jac_v[k].T @ (body.mass * grav_shell)
    if wrench is not None:
        force, torque = wrench
        q += kin.jac_v[0].T @ (kin.rot.T @ np.asarray(force, dtype=float))
        q[3:6] += kin.rot.T @ np.asarray(torque, dtype=float)
    damping = params.joint_damping
    rates = state.joint_rates()
    q[6:9] -= damping * rates
    q[8] += actuation.rotor_torque
    if actuation.mode is ActuationMode.TORQUE:
        q[6] += actuation.alpha_cmd
        q[7] += actuation.beta_cmd
    return q


def _acceleration(params, state, actuation, wrench):
    mass, bias, kin = _bias_and_mass(params, state)
    q = _generalized_forces(params, state, kin, actuation, wrench)
    rhs = q - bias
    if actuation.mode is ActuationMode.KINEMATIC:
        # gimbal rates are prescribed: their accelerations vanish and
        # their rows drop out of the solve
        free = np.array([0, 1, 2, 3, 4, 5, 8])
        udot = np.zeros(N_COORDS)
        udot[free] = np.linalg.solve(mass[np.ix_(free, free)], rhs[free])
        return udot
    return np.linalg.solve(mass, rhs)


def _cross3(a, b):
    # np.cross spends most of its time normalizing axes; the hot loop
    # only ever crosses plain 3-vectors
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


class _Compiled:
    """Per-parameter constants hoisted out of the integration hot loop."""

    __slots__ = (
        "masses",
        "inertias",
        "offsets",
        "any_offset",
        "total_mass",
        "gravity",
        "damping",
    )

    def __init__(self, params: RobotParams):
        self.masses = [b.mass for b in params.bodies]
        self.inertias = [np.array(b.inertia_com) for b in params.bodies]
        self.offsets = [np.array(b.com_offset) for b in params.bodies]
        self.any_offset = any(np.any(o != 0.0) for o in self.offsets)
        self.total_mass = params.total_mass
        self.gravity = params.gravity
        self.damping = params.joint_damping


def _compiled(params: RobotParams) -> _Compiled:
    comp = getattr(params, "_hot_cache", None)
    if comp is None:
        comp = _Compiled(params)
        object.__setattr__(params, "_hot_cache", comp)
    return comp


def _fast_flat_acceleration(comp: _Compiled, flat, actuation, wrench):
    """Zero-COM-offset specialization working directly on the flat state.

    With every body COM on the joint origin, translation decouples:
    linear acceleration is wrench force over total mass plus gravity,
    and the rotational block reduces to six coordinates (shell omega
    plus three joint rates). Used for every stock configuration; the
    general path covers offset COMs.
    """
    quat = flat[3:7]
    omega_s = flat[10:13]
    alpha, beta, theta = flat[13], flat[14], flat[15]
    rates = flat[16:19]

    rot_out = rot_x(alpha)
    att_inner = rot_out @ rot_y(beta)
    att_rotor = att_inner @ rot_z(theta)
    att = (None, rot_out, att_inner, att_rotor)

    a1 = _X
    a2 = rot_out[:, 1]
    a3 = att_inner[:, 2]
    axes = (a1, a2, a3)
    d2 = rates[0] * _cross3(a1, a2)
    d3 = _cross3(rates[0] * a1 + rates[1] * a2, a3)

    s1 = rates[0] * a1
    s2 = s1 + rates[1] * a2
    s3 = s2 + rates[2] * a3
    rel = (None, s1, s2, s3)
    sdot = (None, np.zeros(3), rates[1] * d2, rates[1] * d2 + rates[2] * d3)

    mass = np.zeros((6, 6))
    bias = np.zeros(6)
    # shell: body frame is the shell frame, no relative motion
    inertia_shell = comp.inertias[0]
    mass[0:3, 0:3] += inertia_shell
    bias[0:3] += _cross3(omega_s, inertia_shell @ omega_s)

    for k in (1, 2, 3):
        att_k = att[k]
        inertia = comp.inertias[k]
        w_k = omega_s + rel[k]
        wb = att_k.T @ w_k
        sb = att_k.T @ rel[k]
        wdot_body = att_k.T @ sdot[k] - _cross3(sb, wb)
        torque_shell = att_k @ (inertia @ wdot_body + _cross3(wb, inertia @ wb))
        bias[0:3] += torque_shell
        if k == 3:
            # axisymmetric rotor: the spin rotation commutes with its
            # inertia, so the shell-frame tensor needs no theta
            inertia_sh = att_inner @ inertia @ att_inner.T
        else:
            inertia_sh = att_k @ inertia @ att_k.T
        mass[0:3, 0:3] += inertia_sh
        for j in _JOINTS_OF[k]:
            bias[3 + j] += axes[j] @ torque_shell
            col = inertia_sh @ axes[j]
            mass[0:3, 3 + j] += col
            mass[3 + j, 0:3] += col
            for i in _JOINTS_OF[k]:
                mass[3 + i, 3 + j] += axes[i] @ col
    mass[3, 3] += JOINT_EPSILON
    mass[4, 4] += JOINT_EPSILON
    mass[5, 5] += JOINT_EPSILON

    force = np.zeros(6)
    force[3:6] = -comp.damping * rates
    force[5] += actuation.rotor_torque
    if actuation.mode is ActuationMode.TORQUE:
        force[3] += actuation.alpha_cmd
        force[4] += actuation.beta_cmd
    accel_lin = np.array([0.0, 0.0, -comp.gravity])
    if wrench is not None:
        w_force, w_torque = wrench
        accel_lin = accel_lin + np.asarray(w_force, dtype=float) / comp.total_mass
        force[0:3] += quat_to_matrix(quat).T @ np.asarray(w_torque, dtype=float)

    rhs = force - bias
    udot = np.empty(N_COORDS)
    udot[0:3] = accel_lin
    if actuation.mode is ActuationMode.KINEMATIC:
        free = (0, 1, 2, 5)
        idx = np.array(free)
        sub = np.linalg.solve(mass[np.ix_(idx, idx)], rhs[idx])
        udot[3:6] = sub[0:3]
        udot[6] = 0.0
        udot[7] = 0.0
        udot[8] = sub[3]
    else:
        sol = np.linalg.solve(mass, rhs)
        udot[3:6] = sol[0:3]
        udot[6:9] = sol[3:6]
    return udot


def generalized_acceleration(
    params: RobotParams,
    state: RobotState,
    actuation: ActuationInput = ZERO_ACTUATION,
    external_wrench=None,
) -> np.ndarray:
    """Solve M(q) du = Q - h for the 9 quasi-velocity derivatives."""
    wrench = external_wrench(state, 0.0) if callable(external_wrench) else external_wrench
    return _acceleration(params, state, actuation, wrench)


def _flat_derivative(params, flat, t, actuation, wrench_fn, rate_bound):
    if np.max(np.abs(flat[7:13])) > rate_bound or np.max(np.abs(flat[16:19])) > rate_bound:
        state = RobotState.from_flat(flat)
        raise SimulationUnstableError(
            f"rates exceeded bound {rate_bound:g} at t = {t:.6f} s; state: {state!r}",
            state=state,
        )
    wrench = wrench_fn(RobotState.from_flat(flat), t) if callable(wrench_fn) else wrench_fn
    comp = _compiled(params)
    if comp.any_offset:
        udot = _acceleration(params, RobotState.from_flat(flat), actuation, wrench)
    else:
        udot = _fast_flat_acceleration(comp, flat, actuation, wrench)
    deriv = np.empty(FLAT_SIZE)
    deriv[0:3] = flat[7:10]
    # qdot = q (x) (0, omega) / 2, written out (quat_multiply is slow here)
    qw, qx, qy, qz = flat[3:7]
    ox, oy, oz = flat[10:13]
    deriv[3] = -0.5 * (qx * ox + qy * oy + qz * oz)
    deriv[4] = 0.5 * (qw * ox + qy * oz - qz * oy)
    deriv[5] = 0.5 * (qw * oy + qz * ox - qx * oz)
    deriv[6] = 0.5 * (qw * oz + qx * oy - qy * ox)
    deriv[7:13] = udot[0:6]
    deriv[13:16] = flat[16:19]
    deriv[16:19] = udot[6:9]
    return deriv


def dynamics_step(
    params: RobotParams,
    state: RobotState,
    actuation: ActuationInput = ZERO_ACTUATION,
    external_wrench=None,
    dt: float = 1e-4,
    t: float = 0.0,
    rate_bound: float = DEFAULT_RATE_BOUND,
) -> RobotState:
    """Advance the full coupled system one RK4 step.

    `external_wrench` is a (force, torque-about-shell-COM) pair in world
    coordinates, or a callable (state, t) -> that pair evaluated at
    every integrator stage, or None.
    """
    if not (0.0 < dt <= 1e-2):
        raise ValueError(f"dt must lie in (0, 1e-2], got {dt!r}")
    if actuation.mode is ActuationMode.KINEMATIC:
        # prescribed rates take effect at the start of the step
        state = replace(
            state,
            gimbal=GimbalAngles(
                state.gimbal.alpha,
                state.gimbal.beta,
                actuation.alpha_cmd,
                actuation.beta_cmd,
            ),
        )
    flat = state.to_flat()

    def deriv(y, time):
        return _flat_derivative(params, y, time, actuation, external_wrench, rate_bound)

    try:
        advanced = rk4_step(flat, deriv, t, dt)
    except (ArithmeticError, ValueError) as exc:
        raise SimulationUnstableError(
            f"integration produced non-finite values at t = {t:.6f} s "
            f"({exc}); last state: {state!r}",
            state=state,
        ) from exc
    advanced[3:7] = quat_normalize(advanced[3:7])
    return RobotState.from_flat(advanced)


def total_angular_momentum(
    params: RobotParams, state: RobotState, about=(0.0, 0.0, 0.0)
) -> np.ndarray:
    """World-frame angular momentum of all four bodies about a world point."""
    kin = _kinematics(params, state)
    about = np.asarray(about, dtype=float)
    rot = kin.rot
    total = np.zeros(3)
    for k, body in enumerate(params.bodies):
        r_k = state.position + rot @ kin.com[k]
        v_k = state.velocity + rot @ np.cross(kin.omega[k], kin.com[k])
        spin = rot @ kin.att[k] @ (body.inertia_com @ kin.omega_body[k])
        total += np.cross(r_k - about, body.mass * v_k) + spin
    return total


def composite_com_world(params: RobotParams, state: RobotState) -> np.ndarray:
    kin = _kinematics(params, state)
    weighted = np.zeros(3)
    for k, body in enumerate(params.bodies):
        weighted += body.mass * (state.position + kin.rot @ kin.com[k])
    return weighted / params.total_mass


def kinetic_energy(params: RobotParams, state: RobotState) -> float:
    kin = _kinematics(params, state)
    total = 0.0
    for k, body in enumerate(params.bodies):
        v_k = state.velocity + kin.rot @ np.cross(kin.omega[k], kin.com[k])
        wb = kin.omega_body[k]
        total += 0.5 * body.mass * float(v_k @ v_k)
        total += 0.5 * float(wb @ body.inertia_com @ wb)
    return total


def potential_energy(params: RobotParams, state: RobotState) -> float:
    """Gravitational PE relative to world z = 0."""
    kin = _kinematics(params, state)
    total = 0.0
    for k, body in enumerate(params.bodies):
        z_k = state.position[2] + float((kin.rot @ kin.com[k])[2])
        total += body.mass * params.gravity * z_k
    return total


def gyroscopic_reaction(rotor_momentum, gimbal_rate) -> np.ndarray:
    """Reaction torque on the structure from precessing the rotor axis.

    tau = gimbal_rate x L: tilting stored momentum L at a given rate
    demands this torque from the gimbal frame, and the frame feels the
    equal and opposite wrench.
    """
    rotor_momentum = np.asarray(rotor_momentum, dtype=float)
    gimbal_rate = np.asarray(gimbal_rate, dtype=float)
    if not (np.all(np.isfinite(rotor_momentum)) and np.all(np.isfinite(gimbal_rate))):
        raise ValueError("gyroscopic_reaction inputs must be finite")
    return np.cross(gimbal_rate, rotor_momentum)


def rotor_axis_world(state: RobotState) -> np.ndarray:
    """Current rotor spin axis as a world-frame unit vector."""
    alpha, beta = state.gimbal.alpha, state.gimbal.beta
    axis_shell = rot_x(alpha) @ rot_y(beta) @ _Z
    return quat_rotate(state.orientation, axis_shell)


def rotor_momentum_world(params: RobotParams, state: RobotState) -> np.ndarray:
    """Angular momentum of the rotor body alone, world frame."""
    kin = _kinematics(params, state)
    return kin.rot @ kin.att[3] @ (params.rotor.inertia_com @ kin.omega_body[3])


def point_kinematics(
    params: RobotParams,
    state: RobotState,
    body_index: int,
    offset,
    udot=None,
):
    """Position, velocity, acceleration of a material point, world frame.

    `offset` is fixed in the body's own frame. `udot` is the current
    generalized acceleration; None treats the motion as momentarily
    unaccelerated (coasting joints), which is exact for a robot at rest.
    Also returns the body-to-world rotation and the body-frame angular
    velocity, which is what a strapped-down gyro reads.
    """
    if not 0 <= body_index < 4:
        raise ValueError(f"body_index must be 0..3, got {body_index!r}")
    kin = _kinematics(params, state)
    rates = state.joint_rates()
    if udot is None:
        udot = np.zeros(N_COORDS)
    udot = np.asarray(udot, dtype=float)

    rho = kin.att[body_index] @ np.asarray(offset, dtype=float)
    w_k = kin.omega[body_index]
    s_k = kin.rel_omega[body_index]
    rot = kin.rot

    pos = state.position + rot @ rho
    vel = state.velocity + rot @ np.cross(w_k, rho)

    sdot = np.zeros(3)
    for j in _JOINTS_OF[body_index]:
        sdot = sdot + rates[j] * kin.axis_dots[j] + udot[6 + j] * kin.axes[j]
    wdot = udot[3:6] + sdot
    rho_dot = np.cross(s_k, rho)
    g_vec = np.cross(w_k, rho)
    acc_shell = (
        np.cross(state.omega_body, g_vec)
        + np.cross(wdot, rho)
        + np.cross(w_k, rho_dot)
    )
    acc = udot[0:3] + rot @ acc_shell
    rot_body_world = rot @ kin.att[body_index]
    omega_body_frame = kin.att[body_index].T @ w_k
    return pos, vel, acc, rot_body_world, omega_body_frame
