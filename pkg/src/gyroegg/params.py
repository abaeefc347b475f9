"""Mass, inertia and geometry parameters for the four-body robot.

The robot is a chain of four rigid bodies: the ellipsoidal shell, the
outer gimbal ring (pivoting about the shell's major symmetry axis, x),
the inner gimbal ring (pivoting about y of the outer ring) and the
rotor (spinning about z of the inner ring). All joint axes pass through
the shell's geometric center and are mutually orthogonal when the
gimbal angles are zero.

Every inertia tensor is expressed in its own body frame about the
body's center of mass. `com_offset` locates that center of mass
relative to the shared joint origin, in the body's own frame.

The named configurations carry masses and inertias that are plausible
estimates for the two built prototypes, not measured values; anything
constructed from them is flagged `estimated`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from gyroegg.rotation import require_spd, rot_z

ROTOR_SYMMETRY_TOL = 1e-9
COM_BALANCE_TOL = 1e-9  # m, for the named configs only

STANDARD_GRAVITY = 9.81  # m/s^2


def _frozen_vec3(value) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector has non-finite entries: {v!r}")
    v.setflags(write=False)
    return v


def _frozen_mat3(value) -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class BodyParams:
    """One rigid body: mass, COM inertia, COM position in its joint frame.

    Zero mass with a zero inertia tensor is accepted so that limit
    cases (massless gimbals) remain constructible; the full robot
    enforces a positive shell mass separately.
    """

    mass: float
    inertia_com: np.ndarray
    com_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (self.mass >= 0.0 and np.isfinite(self.mass)):
            raise ValueError(f"mass must be finite and >= 0, got {self.mass!r}")
        object.__setattr__(self, "inertia_com", _frozen_mat3(self.inertia_com))
        object.__setattr__(self, "com_offset", _frozen_vec3(self.com_offset))
        require_spd(self.inertia_com, "inertia_com", semi=True)
        # principal moments of any mass distribution obey the triangle
        # inequality; a violating tensor is not physically realizable
        lam = np.linalg.eigvalsh(0.5 * (self.inertia_com + self.inertia_com.T))
        if lam[0] + lam[1] < lam[2] - 1e-9 * max(lam[2], 1.0):
            raise ValueError(
                f"principal moments {lam} violate the triangle inequality"
            )


def _check_rotor_axisymmetric(inertia: np.ndarray):
    # invariance under a quarter turn about z (the spin axis) is
    # equivalent to axisymmetry of the tensor about that axis
    r = rot_z(np.pi / 2.0)
    dev = np.max(np.abs(r.T @ inertia @ r - inertia))
    if dev > ROTOR_SYMMETRY_TOL:
        raise ValueError(
            f"rotor inertia must be axisymmetric about its spin axis, "
            f"quarter-turn deviation {dev:.3e}"
        )


@dataclass(frozen=True)
class RobotParams:
    """Full parameter set for the shell + gimbal + rotor assembly."""

    shell: BodyParams
    outer_gimbal: BodyParams
    inner_gimbal: BodyParams
    rotor: BodyParams
    semi_axes: tuple[float, float, float] = (0.2, 0.2, 0.2)
    gravity: float = STANDARD_GRAVITY
    joint_damping: float = 0.001  # N m s/rad, all three joints
    estimated: bool = True

    def __post_init__(self):
        a, b, c = self.semi_axes
        if not (a > 0.0 and b > 0.0 and c > 0.0):
            raise ValueError(f"semi-axes must be positive, got {self.semi_axes!r}")
        if self.shell.mass <= 0.0:
            raise ValueError("shell mass must be positive")
        if self.gravity < 0.0:
            raise ValueError("gravity is a magnitude, must be >= 0")
        if self.joint_damping < 0.0:
            raise ValueError("joint_damping must be >= 0")
        _check_rotor_axisymmetric(self.rotor.inertia_com)

    @property
    def bodies(self) -> tuple[BodyParams, BodyParams, BodyParams, BodyParams]:
        return (self.shell, self.outer_gimbal, self.inner_gimbal, self.rotor)

    @property
    def total_mass(self) -> float:
        return sum(b.mass for b in self.bodies)

    def composite_com(self) -> np.ndarray:
        """Robot COM in the shell frame at zero gimbal angles.

        At alpha = beta = 0 every body frame coincides with the shell
        frame, so the COM is just the mass-weighted sum of offsets. The
        design goal is that this sits at the geometric center; configs
        with deliberate imbalance will report it honestly.
        """
        weighted = sum(b.mass * b.com_offset for b in self.bodies)
        return np.asarray(weighted) / self.total_mass

    @property
    def rotor_spin_inertia(self) -> float:
        return float(self.rotor.inertia_com[2, 2])

    @property
    def is_spherical(self) -> bool:
        a, b, c = self.semi_axes
        scale = max(a, b, c)
        return abs(a - b) < 1e-12 * scale and abs(a - c) < 1e-12 * scale


def ellipsoid_inertia(
    mass: float, a: float, b: float, c: float, hollow_fraction: float = 0.0
) -> np.ndarray:
    """Inertia tensor of an ellipsoid about its center, axes aligned.

    The principal coefficient interpolates linearly between the solid
    value 1/5 and the thin-shell value 1/3:

        I_x = m * ((1 - h)/5 + h/3) * (b^2 + c^2)   (and cyclic)

    Both endpoints are exact for a sphere (2/5 and 2/3 m R^2). For
    aspherical thin shells the 1/3 endpoint is an approximation; a true
    constant-thickness shell has no elementary closed form.
    """
    if not (a > 0.0 and b > 0.0 and c > 0.0):
        raise ValueError(f"semi-axes must be positive, got {(a, b, c)!r}")
    if not (0.0 <= hollow_fraction <= 1.0):
        raise ValueError(f"hollow_fraction must lie in [0, 1], got {hollow_fraction!r}")
    if mass < 0.0:
        raise ValueError(f"mass must be >= 0, got {mass!r}")
    coef = (1.0 - hollow_fraction) / 5.0 + hollow_fraction / 3.0
    return np.diag(
        [
            coef * mass * (b * b + c * c),
            coef * mass * (a * a + c * c),
            coef * mass * (a * a + b * b),
        ]
    )


def _ring_inertia(mass: float, radius: float, axis: int) -> np.ndarray:
    """Thin circular ring with its symmetry axis along the given index."""
    spin = mass * radius * radius
    moments = [0.5 * spin] * 3
    moments[axis] = spin
    return np.diag(moments)


def _rotor_inertia(spin: float, transverse: float) -> np.ndarray:
    return np.diag([transverse, transverse, spin])


def _proto1() -> RobotParams:
    # 63 x 40 cm prototype. Total 7 kg split across shell, rings, rotor.
    return RobotParams(
        shell=BodyParams(3.0, ellipsoid_inertia(3.0, 0.315, 0.20, 0.20, 0.8)),
        outer_gimbal=BodyParams(0.8, _ring_inertia(0.8, 0.17, axis=0)),
        inner_gimbal=BodyParams(1.2, _ring_inertia(1.2, 0.14, axis=1)),
        rotor=BodyParams(2.0, _rotor_inertia(spin=0.010, transverse=0.0061)),
        semi_axes=(0.315, 0.20, 0.20),
    )


def _proto2() -> RobotParams:
    # 44 x 32 cm prototype, lighter internals
    return RobotParams(
        shell=BodyParams(1.8, ellipsoid_inertia(1.8, 0.22, 0.16, 0.16, 0.8)),
        outer_gimbal=BodyParams(0.5, _ring_inertia(0.5, 0.13, axis=0)),
        inner_gimbal=BodyParams(0.8, _ring_inertia(0.8, 0.10, axis=1)),
        rotor=BodyParams(1.2, _rotor_inertia(spin=0.004, transverse=0.0024)),
        semi_axes=(0.22, 0.16, 0.16),
    )


def _testsphere() -> RobotParams:
    # spherical shell with proto1 internals, for contact and rolling
    # tests where the support point sits exactly below the center
    p = _proto1()
    return replace(
        p,
        shell=BodyParams(3.0, ellipsoid_inertia(3.0, 0.20, 0.20, 0.20, 0.8)),
        semi_axes=(0.20, 0.20, 0.20),
    )


_NAMED = {"proto1": _proto1, "proto2": _proto2, "testsphere": _testsphere}


def named_params(name: str) -> RobotParams:
    """Look up one of the named parameter sets by name."""
    try:
        factory = _NAMED[name]
    except KeyError:
        raise ValueError(
            f"unknown parameter set {name!r}, valid names: {sorted(_NAMED)}"
        ) from None
    params = factory()
    assert np.linalg.norm(params.composite_com()) <= COM_BALANCE_TOL
    return params


def param_set_names() -> tuple[str, ...]:
    return tuple(sorted(_NAMED))
