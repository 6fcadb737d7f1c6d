import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_sequence, random_hand_eye, random_rotation, rotation_about
from handeye import metrics
from handeye.errors import UnsupportedKindError, ValidationError
from handeye.motion import SolutionKind
from handeye.se3 import RigidMotion, rotation_to_quaternion
from handeye.solvers import HandEyeSolution


def test_rotation_error_examples(rng):
    r = random_rotation(rng)
    assert metrics.rotation_error(r, r) == 0.0
    residual = rotation_about(rng.normal(size=3), math.pi)
    assert metrics.rotation_error(residual @ r, r) == pytest.approx(2.0, abs=1e-12)
    q = rotation_to_quaternion(r)
    assert metrics.quaternion_distance(q, -q) == 0.0


@given(st.floats(0, math.pi))
def test_rotation_error_formula(alpha):
    r = rotation_about([0.3, -1, 0.5], 0.9)
    residual = rotation_about([1, 2, 3], alpha)
    assert metrics.rotation_error(residual @ r, r) == pytest.approx(2 - 2 * math.cos(alpha / 2), abs=1e-12)


def test_rotation_error_symmetric_and_monotone(rng):
    a, b = random_rotation(rng), random_rotation(rng)
    assert metrics.rotation_error(a, b) == pytest.approx(metrics.rotation_error(b, a), abs=1e-15)
    axis = rng.normal(size=3)
    errs = [metrics.rotation_error(rotation_about(axis, t) @ a, a) for t in np.linspace(0, math.pi, 50)]
    assert np.all(np.diff(errs) > 0)


def test_translation_error_examples(rng):
    t = rng.normal(size=3)
    assert metrics.translation_error(t, t) == 0.0
    assert metrics.translation_error(1.1 * t, t) == pytest.approx(0.1)
    assert metrics.translation_error(-t, t) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        metrics.translation_error(t, np.zeros(3))


def test_scale_error():
    assert metrics.scale_error(1.1, 1.0) == pytest.approx(0.1)


def full_case(rng):
    x, lam = random_hand_eye(rng), 1.3
    robots = [RigidMotion(rotation_about(rng.normal(size=3), 0.9), rng.normal(size=3)) for _ in range(3)]
    return x, lam, make_sequence(x, lam, robots)


def test_consistency_truth(rng):
    x, lam, s = full_case(rng)
    rep = metrics.consistency(s, HandEyeSolution(x.rotation, x.translation, lam, SolutionKind.full()))
    assert rep.rms_rotation < 1e-10 and rep.rms_translation < 1e-10
    assert len(rep.per_pair) == 3


def test_consistency_perturbations(rng):
    x, lam, s = full_case(rng)
    bad_r = rotation_about(rng.normal(size=3), math.radians(1)) @ x.rotation
    rep = metrics.consistency(s, HandEyeSolution(bad_r, x.translation, lam, SolutionKind.full()))
    assert rep.rms_rotation > 0
    base = metrics.consistency(s, HandEyeSolution(x.rotation, x.translation, lam, SolutionKind.full()))
    scaled = metrics.consistency(s, HandEyeSolution(x.rotation, x.translation, 1.1 * lam, SolutionKind.full()))
    assert scaled.rms_translation > base.rms_translation
    assert scaled.rms_rotation == base.rms_rotation


def test_consistency_needs_full_solution(rng):
    _, _, s = full_case(rng)
    with pytest.raises(UnsupportedKindError):
        metrics.consistency(s, HandEyeSolution(np.eye(3), None, 1.0, SolutionKind.rotation_and_scale()))


def test_mean_rigid_transform(rng):
    m = random_hand_eye(rng)
    out = metrics.mean_rigid_transform([m])
    np.testing.assert_allclose(out.rotation, m.rotation, atol=1e-14)
    out = metrics.mean_rigid_transform([m] * 5)
    np.testing.assert_allclose(out.translation, m.translation)
    axis = rng.normal(size=3)
    pair = [RigidMotion(rotation_about(axis, 0.3), np.ones(3)), RigidMotion(rotation_about(axis, -0.3), -np.ones(3))]
    out = metrics.mean_rigid_transform(pair)
    np.testing.assert_allclose(out.rotation, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(out.translation, 0.0)
    with pytest.raises(ValidationError):
        metrics.mean_rigid_transform([])
