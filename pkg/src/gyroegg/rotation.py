"""Rotation, inertia and fixed-step integration kernels.

Conventions used throughout the package:

- Quaternions are scalar-first Hamilton quaternions q = [w, x, y, z],
  unit norm, right-handed, and encode the body-to-world rotation:
  v_world = R(q) @ v_body.
- Angular velocities attached to a quaternion are expressed in the body
  frame unless a name says otherwise.
- Inertia tensors are 3x3 symmetric positive definite matrices about the
  body's center of mass, in body axes.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

QUAT_NORM_TOL = 1e-9


class Frame(Enum):
    """Reference frames of the robot's kinematic chain."""

    WORLD = "world"
    SHELL = "shell"
    OUTER_GIMBAL = "outer_gimbal"
    INNER_GIMBAL = "inner_gimbal"
    ROTOR = "rotor"


def _require_finite(name: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} contains non-finite entries: {value!r}")


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    """Rescale to unit norm; rejects near-zero quaternions."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if not np.isfinite(n) or n < 1e-12:
        raise ValueError(f"cannot normalize quaternion with norm {n!r}")
    return q / n


def quat_multiply(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Hamilton product q * p (apply p first, then q, in body-to-world use)."""
    qw, qv = q[0], q[1:]
    pw, pv = p[0], p[1:]
    w = qw * pw - np.dot(qv, pv)
    v = qw * pv + pw * qv + np.cross(qv, pv)
    return np.array([w, v[0], v[1], v[2]])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        return quat_identity()
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis / n))


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix R with v_world = R @ v_body."""
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_rotate(q: np.ndarray, v_body: np.ndarray) -> np.ndarray:
    """Rotate a body-frame vector into the world frame."""
    return quat_to_matrix(q) @ np.asarray(v_body, dtype=float)


def quat_angle_between(q1: np.ndarray, q2: np.ndarray) -> float:
    """Geodesic angle of the relative rotation, double cover folded out."""
    dq = quat_multiply(quat_conjugate(quat_normalize(q1)), quat_normalize(q2))
    w = min(1.0, abs(dq[0]))
    return 2.0 * np.arccos(w)


def quat_integrate(q: np.ndarray, omega_body: np.ndarray, dt: float) -> np.ndarray:
    """Advance q by the exponential map of a constant body rate over dt.

    Args:
        q: current orientation, body to world.
        omega_body: angular velocity in the body frame [rad/s].
        dt: step length [s], must be > 0.

    Returns:
        Normalized quaternion after the rotation increment.
    """
    if not (dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt!r}")
    q = np.asarray(q, dtype=float)
    omega_body = np.asarray(omega_body, dtype=float)
    _require_finite("quaternion", q)
    _require_finite("omega_body", omega_body)

    theta = np.linalg.norm(omega_body) * dt
    half = 0.5 * theta
    if theta < 1e-10:
        # series for sin(half)/|omega*dt| keeps the zero-rate case exact
        k = 0.5 * dt * (1.0 - half * half / 6.0)
    else:
        k = np.sin(half) * dt / theta
    dq = np.concatenate(([np.cos(half)], k * omega_body))
    return quat_normalize(quat_multiply(q, dq))


def quat_derivative(q: np.ndarray, omega_body: np.ndarray) -> np.ndarray:
    """qdot = 0.5 * q * (0, omega_body)."""
    return 0.5 * quat_multiply(q, np.array([0.0, *omega_body]))


def rk4_step(state: np.ndarray, deriv, t: float, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step on a flat state vector.

    `deriv(state, time)` must be pure and return an array of the same
    shape. A non-finite derivative aborts the step and names the first
    offending component.
    """
    state = np.asarray(state, dtype=float)

    def eval_deriv(y, tau, stage):
        dy = np.asarray(deriv(y, tau), dtype=float)
        bad = np.flatnonzero(~np.isfinite(dy))
        if bad.size:
            raise ArithmeticError(
                f"non-finite derivative at component {bad[0]} (RK4 stage {stage}, t={tau})"
            )
        return dy

    k1 = eval_deriv(state, t, 1)
    k2 = eval_deriv(state + 0.5 * dt * k1, t + 0.5 * dt, 2)
    k3 = eval_deriv(state + 0.5 * dt * k2, t + 0.5 * dt, 3)
    k4 = eval_deriv(state + dt * k3, t + dt, 4)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(a) @ b == cross(a, b)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def require_spd(
    m: np.ndarray, name: str = "matrix", tol: float = 1e-9, semi: bool = False
) -> np.ndarray:
    """Validate a symmetric positive (semi-)definite 3x3 matrix and return it."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got shape {m.shape}")
    _require_finite(name, m)
    if not np.allclose(m, m.T, atol=tol * max(1.0, float(np.abs(m).max()))):
        raise ValueError(f"{name} is not symmetric")
    sym = 0.5 * (m + m.T)
    eigvals = np.linalg.eigvalsh(sym)
    floor = -tol if semi else 0.0
    if eigvals[0] <= floor:
        kind = "positive semi-definite" if semi else "positive definite"
        raise ValueError(f"{name} is not {kind} (eigenvalues {eigvals})")
    return sym


def parallel_axis(inertia_com: np.ndarray, mass: float, offset: np.ndarray) -> np.ndarray:
    """Shift an inertia tensor from the COM to an axis displaced by `offset`.

    Args:
        inertia_com: inertia about the center of mass [kg m^2]; symmetric
            positive semi-definite (a zero tensor models a point mass).
        mass: body mass [kg], > 0.
        offset: displacement from the new reference point to the COM [m].
    """
    if not (mass > 0.0):
        raise ValueError(f"mass must be > 0, got {mass!r}")
    inertia_com = require_spd(inertia_com, "inertia_com", semi=True)
    d = np.asarray(offset, dtype=float)
    _require_finite("offset", d)
    return inertia_com + mass * (np.dot(d, d) * np.eye(3) - np.outer(d, d))
