import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from handeye.motion import MotionSequence
from handeye.se3 import RigidMotion, ScaledMotion


def random_rotation(rng) -> np.ndarray:
    return Rotation.random(random_state=rng).as_matrix()


def rotation_about(axis, angle) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    return Rotation.from_rotvec(angle * axis / np.linalg.norm(axis)).as_matrix()


def homogeneous(r, t) -> np.ndarray:
    h = np.eye(4)
    h[:3, :3] = r
    h[:3, 3] = t
    return h


def make_sequence(x: RigidMotion, scale: float, robots) -> MotionSequence:
    """Exact camera motions ``A = X B X^-1``, computed with 4x4 matrices."""
    hx = homogeneous(x.rotation, x.translation)
    cams = []
    for b in robots:
        ha = hx @ homogeneous(b.rotation, b.translation) @ np.linalg.inv(hx)
        cams.append(ScaledMotion(ha[:3, :3], ha[:3, 3] / scale))
    return MotionSequence.from_motions(cams, robots)


def random_hand_eye(rng) -> RigidMotion:
    return RigidMotion(random_rotation(rng), rng.normal(size=3) * 0.3)


def quat_err(r1, r2) -> float:
    q1 = Rotation.from_matrix(r1).as_quat()
    q2 = Rotation.from_matrix(r2).as_quat()
    return float(min(np.sum((q1 - q2) ** 2), np.sum((q1 + q2) ** 2)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
