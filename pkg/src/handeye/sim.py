"""Monte-Carlo simulation of hand-eye calibration under camera noise.

Every trial draws its own random hand-eye transform, robot motions and
scale from a generator seeded with ``(seed, trial index)``; the camera
noise comes from a second stream seeded with ``(seed, trial index, 1)``.
Results therefore do not depend on which other trials run, nor on the
order or the thread they run in. Because the noise stream is the same at
every noise level, a noise sweep perturbs the same data by increasing
amounts.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from handeye.errors import HandEyeError
from handeye.metrics import ErrorReport, rotation_error, scale_error, translation_error
from handeye.motion import MotionKind, MotionSequence, SolutionKind, SolutionType
from handeye.se3 import (
    RigidMotion,
    ScaledMotion,
    axis_angle_to_rotation,
    conjugate_camera_motion,
    rotation_to_rpy,
    rpy_to_rotation,
)
from handeye.solvers import solve_auto, solve_general

log = logging.getLogger(__name__)

MIN_AXIS_SEPARATION = math.radians(10.0)
METHODS = ("pose", "sfm")


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    Amplitudes cap the robot motions: translation lengths and rotation
    angles are drawn uniformly in ``[min_fraction * amplitude, amplitude]``.
    """

    seed: int = 0
    trials: int = 100
    motions_per_trial: int = 2
    motion_class: MotionKind = MotionKind.GENERAL
    translation_amplitude: float = 1.0
    rotation_amplitude: float = math.pi
    noise_nu: float = 0.0
    hand_eye_translation_sigma: float = 0.1
    hand_eye_rpy_sigma: float = math.radians(30.0)
    scale_range: tuple[float, float] = (0.5, 2.0)
    min_fraction: float = 0.5

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.motions_per_trial < 2:
            raise ValueError("motions_per_trial must be >= 2")
        if self.noise_nu < 0:
            raise ValueError("noise_nu must be >= 0")
        if self.motion_class is MotionKind.DEGENERATE:
            raise ValueError("cannot simulate degenerate motions")
        if not 0.0 < self.scale_range[0] <= self.scale_range[1]:
            raise ValueError("scale_range must be positive and ordered")
        if not 0.0 <= self.min_fraction <= 1.0:
            raise ValueError("min_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class TrialResult:
    errors: ErrorReport | None
    solution_kind: SolutionKind | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.errors is None


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    method: str
    rotation_error_median: float
    rotation_error_mean: float
    translation_error_median: float
    translation_error_mean: float
    lambda_error_median: float
    failures: int


@dataclass(frozen=True, eq=False)
class SyntheticCase:
    hand_eye: RigidMotion
    scale: float
    robot: list[RigidMotion]
    camera: list[RigidMotion]  # true (unscaled) camera motions, possibly noisy

    def sequence(self, scale: float | None = None) -> MotionSequence:
        """Camera/robot sequence with translations divided by ``scale`` (default: the drawn one)."""
        lam = self.scale if scale is None else scale
        return MotionSequence.from_motions([ScaledMotion.from_motion(a, lam) for a in self.camera], self.robot)


def trial_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, index, stream])


def random_hand_eye(rng: np.random.Generator, cfg: SimConfig) -> RigidMotion:
    rpy = rng.normal(0.0, 1.0, 3) * cfg.hand_eye_rpy_sigma
    t = rng.normal(0.0, 1.0, 3) * cfg.hand_eye_translation_sigma
    return RigidMotion(rpy_to_rotation(*rpy), t)


def _unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _in_plane_unit(rng: np.random.Generator, normal: np.ndarray) -> np.ndarray:
    v = rng.normal(size=3)
    v -= (v @ normal) * normal
    return v / np.linalg.norm(v)


def _magnitude(rng: np.random.Generator, amplitude: float, cfg: SimConfig) -> float:
    return float(rng.uniform(cfg.min_fraction * amplitude, amplitude))


def _random_axis_apart(rng: np.random.Generator, other: np.ndarray) -> np.ndarray:
    while True:
        axis = _unit(rng)
        if math.acos(min(1.0, abs(float(axis @ other)))) > MIN_AXIS_SEPARATION:
            return axis


def random_robot_motions(rng: np.random.Generator, cfg: SimConfig, count: int | None = None) -> list[RigidMotion]:
    """Robot motions of the configured class.

    Motions are drawn one after the other, so the first ``k`` motions of a
    longer sequence are the motions of the shorter one. For general and
    pure-rotation sequences the second axis is redrawn until it is more
    than 10 degrees away from the first. Planar sequences share one random
    axis and translate orthogonally to it.
    """
    n = cfg.motions_per_trial if count is None else count
    kind = cfg.motion_class
    if kind is MotionKind.PURE_TRANSLATION:
        return [RigidMotion(np.eye(3), _unit(rng) * _magnitude(rng, cfg.translation_amplitude, cfg)) for _ in range(n)]
    if kind is MotionKind.PLANAR:
        normal = _unit(rng)
        out = []
        for _ in range(n):
            angle = _magnitude(rng, cfg.rotation_amplitude, cfg) * rng.choice([-1.0, 1.0])
            t = _in_plane_unit(rng, normal) * _magnitude(rng, cfg.translation_amplitude, cfg)
            out.append(RigidMotion(axis_angle_to_rotation(normal, angle), t))
        return out
    out, first = [], None
    for i in range(n):
        axis = _unit(rng) if i != 1 else _random_axis_apart(rng, first)
        first = axis if i == 0 else first
        r = axis_angle_to_rotation(axis, _magnitude(rng, cfg.rotation_amplitude, cfg))
        if kind is MotionKind.PURE_ROTATION:
            t = np.zeros(3)
        else:
            t = _unit(rng) * _magnitude(rng, cfg.translation_amplitude, cfg)
        out.append(RigidMotion(r, t))
    return out


def add_noise(a: ScaledMotion, nu: float, rng: np.random.Generator) -> ScaledMotion:
    """Perturb a camera motion with relative noise level ``nu``.

    The translation gets ``nu * |t| * n`` with ``n`` a standard Gaussian
    3-vector; each roll-pitch-yaw angle is multiplied by ``1 + nu * r``
    with ``r`` standard Gaussian. The random numbers are drawn even when
    ``nu == 0`` so that the stream stays aligned across noise levels.
    """
    if nu < 0:
        raise ValueError("nu must be >= 0")
    n = rng.normal(size=3)
    r = rng.normal(size=3)
    if nu == 0.0:
        return a
    d = a.direction + nu * float(np.linalg.norm(a.direction)) * n
    rpy = np.array(rotation_to_rpy(a.rotation)) * (1.0 + nu * r)
    return ScaledMotion(rpy_to_rotation(*rpy), d)


def synthetic_case(cfg: SimConfig, index: int, count: int | None = None) -> SyntheticCase:
    """Draw one trial's ground truth and (noisy) camera motions."""
    rng = trial_rng(cfg.seed, index)
    x = random_hand_eye(rng, cfg)
    lam = float(rng.uniform(*cfg.scale_range))
    robot = random_robot_motions(rng, cfg, count)
    noise = trial_rng(cfg.seed, index, 1)
    camera = []
    for b in robot:
        a = conjugate_camera_motion(x, b)
        noisy = add_noise(ScaledMotion(a.rotation, a.translation), cfg.noise_nu, noise)
        camera.append(RigidMotion(noisy.rotation, noisy.direction))
    return SyntheticCase(x, lam, robot, camera)


def _solve(case: SyntheticCase, method: str, cfg: SimConfig) -> TrialResult:
    if method == "pose":
        seq, lam = case.sequence(1.0), 1.0
    else:
        seq, lam = case.sequence(), case.scale
    try:
        if cfg.motion_class is MotionKind.GENERAL:
            sol = solve_general(seq, scale=1.0 if method == "pose" else None)
        else:
            sol = solve_auto(seq)
    except HandEyeError as exc:
        return TrialResult(None, None, {"error": f"{exc.category}: {exc}"})
    rot = rotation_error(sol.rotation, case.hand_eye.rotation)
    trans = float("nan")
    if sol.kind.type is SolutionType.FULL:
        trans = translation_error(sol.translation, case.hand_eye.translation)
    lam_err = None if method == "pose" or sol.scale is None else scale_error(sol.scale, lam)
    return TrialResult(ErrorReport(rot, trans, lam_err), sol.kind, sol.diagnostics)


def run_trial(cfg: SimConfig, index: int) -> dict[str, TrialResult]:
    case = synthetic_case(cfg, index)
    return {m: _solve(case, m, cfg) for m in METHODS}


def _run_trials(cfg: SimConfig, workers: int) -> list[dict[str, TrialResult]]:
    indices = range(cfg.trials)
    if workers <= 1:
        return [run_trial(cfg, i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: run_trial(cfg, i), indices))


def _median(xs: list[float]) -> float:
    return float(np.median(xs)) if xs else float("nan")


def _mean(xs: list[float]) -> float:
    return float(np.mean(xs)) if xs else float("nan")


def summarize(value: float, results: Iterable[dict[str, TrialResult]]) -> list[SweepRow]:
    results = list(results)
    rows = []
    for m in METHODS:
        ok = [r[m].errors for r in results if not r[m].failed]
        rot = [e.rotation_error for e in ok]
        tr = [e.translation_rel_error for e in ok]
        lam = [e.lambda_rel_error for e in ok if e.lambda_rel_error is not None]
        rows.append(
            SweepRow(
                sweep_value=value,
                method=m,
                rotation_error_median=_median(rot),
                rotation_error_mean=_mean(rot),
                translation_error_median=_median(tr),
                translation_error_mean=_mean(tr),
                lambda_error_median=_median(lam),
                failures=len(results) - len(ok),
            )
        )
    return rows


def run_noise_sweep(cfg: SimConfig, nus: Iterable[float], workers: int = 1) -> list[SweepRow]:
    """Error statistics per noise level, for both the pose and the SfM method."""
    rows = []
    for nu in nus:
        c = replace(cfg, noise_nu=float(nu))
        rows.extend(summarize(float(nu), _run_trials(c, workers)))
    return rows


def run_motion_count_sweep(cfg: SimConfig, counts: Iterable[int], workers: int = 1) -> list[SweepRow]:
    """Error statistics per number of calibration motions."""
    rows = []
    for n in counts:
        c = replace(cfg, motions_per_trial=int(n))
        rows.extend(summarize(float(n), _run_trials(c, workers)))
    return rows
