"""Error measures between rigid transforms.

The rotation error is the squared distance between unit quaternions,
minimised over the two signs a quaternion can take::

    min(|q1 - q2|^2, |q1 + q2|^2) = 2 - 2 cos(alpha / 2)

where ``alpha`` in ``[0, pi]`` is the angle of the residual rotation. The
squared norm (not the plain norm) is what makes that identity exact; the
sign minimisation keeps two representations of the same rotation at zero
distance. The value therefore lies in ``[0, 2]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from handeye import linalg
from handeye.errors import UnsupportedKindError, ValidationError
from handeye.motion import MotionSequence, SolutionType
from handeye.se3 import RigidMotion, rotation_to_quaternion


@dataclass(frozen=True)
class ErrorReport:
    rotation_error: float
    translation_rel_error: float
    lambda_rel_error: float | None = None


@dataclass(frozen=True)
class ConsistencyReport:
    rms_rotation: float
    rms_translation: float
    per_pair: list[tuple[float, float]]


def quaternion_distance(q1, q2) -> float:
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    return float(min(np.sum((q1 - q2) ** 2), np.sum((q1 + q2) ** 2)))


def rotation_error(estimated, truth) -> float:
    return quaternion_distance(rotation_to_quaternion(estimated), rotation_to_quaternion(truth))


def translation_error(estimated, truth) -> float:
    """Relative error ``|t_hat - t| / |t|``."""
    truth = np.asarray(truth, dtype=float)
    n = float(np.linalg.norm(truth))
    if n == 0.0:
        raise ValidationError("relative translation error is undefined for a zero reference")
    return float(np.linalg.norm(np.asarray(estimated, dtype=float) - truth)) / n


def scale_error(estimated: float, truth: float) -> float:
    return abs(estimated - truth) / abs(truth)


def consistency(s: MotionSequence, sol) -> ConsistencyReport:
    """Compare ``A_i X`` with ``X B_i`` for every pair.

    The translation residual of each pair is divided by the camera
    translation length ``lambda |u_i|``, or left absolute when that length
    is below 1e-12.
    """
    if sol.kind.type is not SolutionType.FULL:
        raise UnsupportedKindError(f"consistency needs a full solution, got {sol.kind}")
    r_x, t_x, lam = sol.rotation, sol.translation, sol.scale
    per_pair = []
    for p in s:
        r_a, u_a = p.camera.rotation, p.camera.direction
        rot = rotation_error(r_a @ r_x, r_x @ p.robot.rotation)
        res = float(np.linalg.norm(r_a @ t_x + lam * u_a - r_x @ p.robot.translation - t_x))
        denom = lam * float(np.linalg.norm(u_a))
        per_pair.append((rot, res / denom if denom >= 1e-12 else res))
    arr = np.array(per_pair)
    rms = np.sqrt(np.mean(arr**2, axis=0))
    return ConsistencyReport(float(rms[0]), float(rms[1]), per_pair)


def mean_rigid_transform(estimates) -> RigidMotion:
    """Average of several transforms: mean translation, projected mean rotation."""
    estimates = list(estimates)
    if not estimates:
        raise ValidationError("cannot average an empty list of transforms")
    r = np.mean([e.rotation for e in estimates], axis=0)
    t = np.mean([e.translation for e in estimates], axis=0)
    return RigidMotion(linalg.nearest_rotation(r), t)
