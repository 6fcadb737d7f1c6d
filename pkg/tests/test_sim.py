import math
from dataclasses import replace

import numpy as np
import pytest

from handeye import sim
from handeye.io import rows_to_csv
from handeye.motion import MotionKind
from handeye.se3 import ScaledMotion, check_rotation, rotation_to_axis_angle, rotation_to_rpy

SMALL = sim.SimConfig(seed=3, trials=20)


def test_config_validation():
    with pytest.raises(ValueError):
        sim.SimConfig(trials=0)
    with pytest.raises(ValueError):
        sim.SimConfig(motions_per_trial=1)
    with pytest.raises(ValueError):
        sim.SimConfig(noise_nu=-0.1)
    with pytest.raises(ValueError):
        sim.SimConfig(motion_class=MotionKind.DEGENERATE)


def test_hand_eye_zero_sigma():
    cfg = sim.SimConfig(hand_eye_translation_sigma=0.0, hand_eye_rpy_sigma=0.0)
    x = sim.random_hand_eye(np.random.default_rng(1), cfg)
    np.testing.assert_array_equal(x.rotation, np.eye(3))
    np.testing.assert_array_equal(x.translation, np.zeros(3))


def test_hand_eye_deterministic():
    a = sim.random_hand_eye(sim.trial_rng(5, 2), sim.SimConfig())
    b = sim.random_hand_eye(sim.trial_rng(5, 2), sim.SimConfig())
    np.testing.assert_array_equal(a.rotation, b.rotation)
    np.testing.assert_array_equal(a.translation, b.translation)


def test_hand_eye_rpy_spread():
    sigma = math.radians(20)
    cfg = sim.SimConfig(hand_eye_rpy_sigma=sigma, hand_eye_translation_sigma=0.25)
    rng = np.random.default_rng(0)
    draws = [sim.random_hand_eye(rng, cfg) for _ in range(10_000)]
    rpy = np.array([rotation_to_rpy(x.rotation) for x in draws])
    np.testing.assert_allclose(rpy.std(axis=0), sigma, rtol=0.05)
    np.testing.assert_allclose(np.std([x.translation for x in draws], axis=0), 0.25, rtol=0.05)


@pytest.mark.parametrize("kind", list(MotionKind)[:4])
def test_robot_motion_classes(kind):
    cfg = sim.SimConfig(motion_class=kind, motions_per_trial=6)
    rng = np.random.default_rng(4)
    motions = sim.random_robot_motions(rng, cfg)
    assert len(motions) == 6
    for m in motions:
        assert np.linalg.norm(m.translation) <= 1.0 + 1e-12
        assert rotation_to_axis_angle(m.rotation).angle <= math.pi + 1e-12
    if kind is MotionKind.PURE_TRANSLATION:
        assert all(np.array_equal(m.rotation, np.eye(3)) for m in motions)
    if kind is MotionKind.PURE_ROTATION:
        assert all(not m.translation.any() for m in motions)
    if kind is MotionKind.PLANAR:
        axes = [rotation_to_axis_angle(m.rotation).axis for m in motions]
        for a in axes:
            assert abs(a @ axes[0]) == pytest.approx(1.0, abs=1e-9)
        for m in motions:
            assert abs(m.translation @ axes[0]) < 1e-12


def test_second_axis_kept_apart():
    cfg = sim.SimConfig(motions_per_trial=2)
    for i in range(50):
        a, b = sim.random_robot_motions(sim.trial_rng(0, i), cfg)
        na, nb = (rotation_to_axis_angle(m.rotation).axis for m in (a, b))
        assert math.acos(min(1.0, abs(na @ nb))) > sim.MIN_AXIS_SEPARATION


def test_motion_prefix_property():
    cfg = sim.SimConfig()
    short = sim.random_robot_motions(sim.trial_rng(1, 0), cfg, 3)
    long = sim.random_robot_motions(sim.trial_rng(1, 0), cfg, 8)
    for a, b in zip(short, long):
        np.testing.assert_array_equal(a.rotation, b.rotation)
        np.testing.assert_array_equal(a.translation, b.translation)


def test_noise_zero_is_identity():
    a = ScaledMotion(np.eye(3), np.array([1.0, 2.0, 3.0]))
    assert sim.add_noise(a, 0.0, np.random.default_rng(0)) is a


def test_noise_translation_magnitude():
    rng = np.random.default_rng(0)
    t = np.array([0.3, -0.4, 1.2])
    a = ScaledMotion(np.eye(3), t)
    nu = 0.05
    dev = [np.linalg.norm(sim.add_noise(a, nu, rng).direction - t) for _ in range(10_000)]
    expected = nu * np.linalg.norm(t) * math.sqrt(8 / math.pi)
    assert np.mean(dev) == pytest.approx(expected, rel=0.03)


def test_noisy_rotation_is_valid():
    rng = np.random.default_rng(2)
    a = ScaledMotion(sim.rpy_to_rotation(0.4, -0.2, 2.0), np.ones(3))
    for _ in range(100):
        check_rotation(sim.add_noise(a, 0.2, rng).rotation, 1e-12)


def test_noise_free_cases_are_exact():
    for kind in list(MotionKind)[:4]:
        case = sim.synthetic_case(replace(SMALL, motion_class=kind), 0)
        x = case.hand_eye
        for b, p in zip(case.robot, case.sequence()):
            a = p.camera.with_scale(case.scale)
            assert np.linalg.norm(a.rotation @ x.rotation - x.rotation @ b.rotation) < 1e-12
            res = a.rotation @ x.translation + a.translation - x.rotation @ b.translation - x.translation
            assert np.linalg.norm(res) < 1e-12


def test_trial_independence():
    a = sim.run_trial(SMALL, 7)
    b = sim.run_trial(replace(SMALL, trials=1000), 7)
    for m in sim.METHODS:
        assert a[m].errors == b[m].errors


def test_noise_free_sweep():
    for kind in list(MotionKind)[:4]:
        rows = sim.run_noise_sweep(replace(SMALL, motion_class=kind), [0.0])
        for r in rows:
            assert r.failures == 0
            assert r.rotation_error_median < 1e-8
            if kind in (MotionKind.GENERAL,):
                assert r.translation_error_median < 1e-8
            if r.method == "sfm" and kind is not MotionKind.PURE_ROTATION:
                assert r.lambda_error_median < 1e-8


def test_noise_increases_general_error():
    cfg = sim.SimConfig(seed=11, trials=100)
    clean, noisy = sim.run_noise_sweep(cfg, [0.0]), sim.run_noise_sweep(cfg, [0.01])
    for c, n in zip(clean, noisy):
        assert n.rotation_error_median < 0.05
        assert n.rotation_error_median > c.rotation_error_median


def test_sweep_deterministic_and_thread_independent():
    a = sim.run_motion_count_sweep(replace(SMALL, noise_nu=0.02), [2, 3])
    b = sim.run_motion_count_sweep(replace(SMALL, noise_nu=0.02), [2, 3], workers=4)
    assert rows_to_csv(a) == rows_to_csv(b)
    assert [r.sweep_value for r in a] == [2.0, 2.0, 3.0, 3.0]


def test_motion_count_zero_noise():
    rows = sim.run_motion_count_sweep(SMALL, [2, 6])
    assert all(r.rotation_error_median < 1e-8 and r.translation_error_median < 1e-8 for r in rows)
