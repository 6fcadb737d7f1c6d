"""Rotations and rigid motions.

Conventions used everywhere in the package:

* roll-pitch-yaw is ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``;
* quaternions are ``(w, x, y, z)`` with ``w >= 0``;
* the axis of the identity rotation is ``(1, 0, 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from handeye.errors import ValidationError

ROTATION_TOL = 1e-9
_IDENTITY_AXIS = np.array([1.0, 0.0, 0.0])


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def orthogonality_error(r) -> float:
    r = np.asarray(r, dtype=float)
    return float(np.linalg.norm(r.T @ r - np.eye(3)))


def check_rotation(r, tol: float = ROTATION_TOL, *, name: str = "rotation") -> np.ndarray:
    """Return ``r`` as an array after checking it is a proper rotation."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise ValidationError(f"{name} must be 3x3, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValidationError(f"{name} has non-finite entries")
    err = orthogonality_error(r)
    if err > tol:
        raise ValidationError(f"{name} is not orthogonal (|R^T R - I| = {err:.3g})")
    det = np.linalg.det(r)
    if abs(det - 1.0) > tol:
        raise ValidationError(f"{name} has determinant {det:.6g}, expected +1")
    return r


def _check_vector(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValidationError(f"{name} must have 3 components, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True, eq=False)
class RigidMotion:
    """Rigid transformation ``x -> R x + t``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _frozen(check_rotation(self.rotation)))
        object.__setattr__(self, "translation", _frozen(_check_vector(self.translation, "translation")))

    @classmethod
    def identity(cls) -> RigidMotion:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, h) -> RigidMotion:
        h = np.asarray(h, dtype=float)
        return cls(h[:3, :3], h[:3, 3])

    def matrix(self) -> np.ndarray:
        h = np.eye(4)
        h[:3, :3] = self.rotation
        h[:3, 3] = self.translation
        return h


@dataclass(frozen=True, eq=False)
class ScaledMotion:
    """Camera motion known up to scale: the true translation is ``scale * direction``."""

    rotation: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _frozen(check_rotation(self.rotation)))
        object.__setattr__(self, "direction", _frozen(_check_vector(self.direction, "direction")))

    def with_scale(self, scale: float) -> RigidMotion:
        return RigidMotion(self.rotation, scale * self.direction)

    @classmethod
    def from_motion(cls, motion: RigidMotion, scale: float = 1.0) -> ScaledMotion:
        """Strip a known scale from a full motion."""
        return cls(motion.rotation, motion.translation / scale)


def compose(m1: RigidMotion, m2: RigidMotion) -> RigidMotion:
    """``m1 @ m2`` in homogeneous coordinates."""
    return RigidMotion(m1.rotation @ m2.rotation, m1.rotation @ m2.translation + m1.translation)


def inverse(m: RigidMotion) -> RigidMotion:
    rt = m.rotation.T
    return RigidMotion(rt, -rt @ m.translation)


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rpy_to_rotation(roll: float, pitch: float, yaw: float) -> np.ndarray:
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)


def rotation_to_rpy(r) -> tuple[float, float, float]:
    """Inverse of :func:`rpy_to_rotation`, with pitch in ``[-pi/2, pi/2]``.

    At gimbal lock (``|pitch| = pi/2``) roll is set to zero.
    """
    r = np.asarray(r, dtype=float)
    sp = -r[2, 0]
    pitch = math.asin(max(-1.0, min(1.0, sp)))
    if abs(sp) < 1.0 - 1e-12:
        roll = math.atan2(r[2, 1], r[2, 2])
        yaw = math.atan2(r[1, 0], r[0, 0])
    else:
        roll = 0.0
        yaw = math.atan2(-r[0, 1], r[1, 1])
    return roll, pitch, yaw


def axis_angle_to_rotation(axis, angle: float) -> np.ndarray:
    """Rodrigues' formula; ``axis`` need not be normalised."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = skew(n)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def skew(v) -> np.ndarray:
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_to_quaternion(r) -> np.ndarray:
    """Unit quaternion ``(w, x, y, z)`` with ``w >= 0``."""
    r = np.asarray(r, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    # Shepperd: branch on the largest diagonal term for stability.
    if tr > max(r[0, 0], r[1, 1], r[2, 2]):
        s = 2.0 * math.sqrt(1.0 + tr)
        q = [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r[0, 0] - r[1, 1] - r[2, 2]))
        q = [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
    elif r[1, 1] >= r[2, 2]:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r[1, 1] - r[0, 0] - r[2, 2]))
        q = [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
    else:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r[2, 2] - r[0, 0] - r[1, 1]))
        q = [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
    q = np.array(q)
    q /= np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q


def quaternion_to_rotation(q) -> np.ndarray:
    w, x, y, z = np.asarray(q, dtype=float) / np.linalg.norm(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_to_axis_angle(r) -> AxisAngle:
    """Axis and angle in ``[0, pi]``, computed through the quaternion.

    Going through the quaternion avoids dividing by ``sin(angle)``, so the
    half-turn case needs no special handling.
    """
    q = rotation_to_quaternion(r)
    v = q[1:]
    nv = float(np.linalg.norm(v))
    angle = 2.0 * math.atan2(nv, q[0])
    if nv < 1e-15:
        return AxisAngle(_IDENTITY_AXIS.copy(), 0.0)
    return AxisAngle(v / nv, angle)


def rotation_angle(r) -> float:
    return rotation_to_axis_angle(r).angle


def conjugate_camera_motion(x: RigidMotion, b: RigidMotion) -> RigidMotion:
    """Camera motion ``A = X B X^-1`` induced by the robot motion ``b``."""
    return compose(compose(x, b), inverse(x))
