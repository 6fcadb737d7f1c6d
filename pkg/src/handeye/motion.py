"""Calibration data model and motion-class detection.

Classification always looks at the robot motions, which come from joint
encoders and are treated as exact; camera motions are only used to report
the camera-side rotation axis for planar sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from handeye.errors import InsufficientMotionError, NoInformationError, ValidationError
from handeye.se3 import RigidMotion, ScaledMotion, rotation_to_axis_angle


class MotionKind(str, Enum):
    PURE_TRANSLATION = "PureTranslation"
    PURE_ROTATION = "PureRotation"
    PLANAR = "Planar"
    GENERAL = "General"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class MotionClass:
    kind: MotionKind
    axis: tuple[float, float, float] | None = None

    def __str__(self) -> str:
        if self.axis is None:
            return self.kind.value
        return f"{self.kind.value}({_fmt_axis(self.axis)})"


class SolutionType(str, Enum):
    FULL = "Full"
    TRANSLATION_UP_TO_SCALE = "TranslationUpToScale"
    TRANSLATION_UP_TO_AXIS = "TranslationUpToAxis"
    ROTATION_AND_SCALE_ONLY = "RotationAndScaleOnly"


_DESCRIPTIONS = {
    SolutionType.FULL: "rotation, translation and scale fully determined",
    SolutionType.TRANSLATION_UP_TO_SCALE: "rotation determined; translation determined up to scale (t_X / lambda)",
    SolutionType.TRANSLATION_UP_TO_AXIS: "rotation and scale determined; translation determined up to axis",
    SolutionType.ROTATION_AND_SCALE_ONLY: "rotation and scale determined; translation not observable",
}


@dataclass(frozen=True)
class SolutionKind:
    """Which unknowns a solution actually pins down.

    For ``TRANSLATION_UP_TO_AXIS`` the camera-side rotation axis along
    which the translation stays free is stored in ``axis``.
    """

    type: SolutionType
    axis: tuple[float, float, float] | None = None

    @classmethod
    def full(cls) -> SolutionKind:
        return cls(SolutionType.FULL)

    @classmethod
    def up_to_scale(cls) -> SolutionKind:
        return cls(SolutionType.TRANSLATION_UP_TO_SCALE)

    @classmethod
    def up_to_axis(cls, axis) -> SolutionKind:
        return cls(SolutionType.TRANSLATION_UP_TO_AXIS, tuple(float(a) for a in axis))

    @classmethod
    def rotation_and_scale(cls) -> SolutionKind:
        return cls(SolutionType.ROTATION_AND_SCALE_ONLY)

    @property
    def description(self) -> str:
        text = _DESCRIPTIONS[self.type]
        if self.axis is not None:
            text += f" {_fmt_axis(self.axis)}"
        return text

    def __str__(self) -> str:
        if self.axis is None:
            return self.type.value
        return f"{self.type.value}({_fmt_axis(self.axis)})"


def _fmt_axis(axis) -> str:
    return "(" + ", ".join(f"{a:.6g}" for a in axis) + ")"


@dataclass(frozen=True)
class ClassifyTolerances:
    """Thresholds for motion classification.

    ``trans`` is relative to the largest robot translation in the sequence.
    """

    angle: float = 1e-6
    trans: float = 1e-6
    axis: float = 1e-4


DEFAULT_TOLERANCES = ClassifyTolerances()


@dataclass(frozen=True, eq=False)
class MotionPair:
    camera: ScaledMotion
    robot: RigidMotion


@dataclass(frozen=True, eq=False)
class MotionSequence:
    """Corresponding camera/robot motions.

    ``anchor`` is the index of the pair whose camera direction has unit
    norm, so that the scale equals that pair's true translation length.
    ``None`` means the directions carry an arbitrary common scale.
    """

    pairs: tuple[MotionPair, ...]
    anchor: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pairs = tuple(self.pairs)
        if not pairs:
            raise ValidationError("a motion sequence needs at least one pair")
        object.__setattr__(self, "pairs", pairs)
        if self.anchor is not None:
            if not 0 <= self.anchor < len(pairs):
                raise ValidationError(f"anchor index {self.anchor} out of range")
            norm = float(np.linalg.norm(pairs[self.anchor].camera.direction))
            if abs(norm - 1.0) > 1e-9:
                raise ValidationError(f"anchor pair {self.anchor} direction has norm {norm:.6g}, expected 1")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @classmethod
    def from_motions(
        cls,
        cameras: Iterable[ScaledMotion],
        robots: Iterable[RigidMotion],
        anchor: int | None = None,
        metadata: dict | None = None,
    ) -> MotionSequence:
        pairs = tuple(MotionPair(a, b) for a, b in zip(cameras, robots, strict=True))
        return cls(pairs, anchor, dict(metadata or {}))

    def anchored(self) -> tuple[MotionSequence, float]:
        """Rescale directions so the first pair with a translation has unit direction.

        Returns the new sequence and the factor ``s`` the directions were
        divided by; a scale recovered from the new sequence is the old one
        times ``s``.
        """
        for i, p in enumerate(self.pairs):
            n = float(np.linalg.norm(p.camera.direction))
            if n > 0.0:
                pairs = tuple(MotionPair(ScaledMotion(q.camera.rotation, q.camera.direction / n), q.robot) for q in self.pairs)
                return MotionSequence(pairs, i, dict(self.metadata)), n
        return MotionSequence(self.pairs, None, dict(self.metadata)), 1.0

    def max_robot_translation(self) -> float:
        return max(float(np.linalg.norm(p.robot.translation)) for p in self.pairs)


def axis_separation(n1, n2) -> float:
    """Angle between two rotation axes, ignoring their orientation (in ``[0, pi/2]``)."""
    c = abs(float(np.dot(n1, n2)))
    return math.acos(min(1.0, c))


def classify_pair(p: MotionPair, tol: ClassifyTolerances = DEFAULT_TOLERANCES, reference: float = 1.0) -> MotionClass:
    """Class of a single pair from its robot motion.

    ``reference`` is the translation length that ``tol.trans`` is relative
    to; :func:`classify_sequence` passes the largest robot translation.
    """
    aa = rotation_to_axis_angle(p.robot.rotation)
    rotates = aa.angle > tol.angle
    translates = float(np.linalg.norm(p.robot.translation)) > tol.trans * reference
    if rotates and translates:
        return MotionClass(MotionKind.GENERAL)
    if rotates:
        return MotionClass(MotionKind.PURE_ROTATION)
    if translates:
        return MotionClass(MotionKind.PURE_TRANSLATION)
    return MotionClass(MotionKind.DEGENERATE)


def pair_classes(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> list[MotionClass]:
    ref = s.max_robot_translation()
    return [classify_pair(p, tol, ref) for p in s.pairs]


def rotation_axes(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> list[tuple[int, np.ndarray, float]]:
    """``(index, robot axis, angle)`` for every pair whose robot motion rotates."""
    out = []
    for i, p in enumerate(s.pairs):
        aa = rotation_to_axis_angle(p.robot.rotation)
        if aa.angle > tol.angle:
            out.append((i, aa.axis, aa.angle))
    return out


def best_axis_pair(axes: Sequence[tuple[int, np.ndarray, float]]) -> tuple[int, int, float] | None:
    """Pair of rotating motions with the widest axis separation."""
    best = None
    for (i, ni, _), (j, nj, _) in itertools.combinations(axes, 2):
        sep = axis_separation(ni, nj)
        if best is None or sep > best[2]:
            best = (i, j, sep)
    return best


def classify_sequence(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> MotionClass:
    """Class of a whole sequence.

    Identity pairs are ignored. A sequence whose rotating motions all share
    one axis is ``Planar`` even when it also holds pure translations, since
    the planar solver handles that mix.
    """
    if len(s) == 0:
        raise ValidationError("empty motion sequence")
    kinds = [c.kind for c in pair_classes(s, tol)]
    informative = [k for k in kinds if k is not MotionKind.DEGENERATE]
    if not informative:
        return MotionClass(MotionKind.DEGENERATE)
    if all(k is MotionKind.PURE_TRANSLATION for k in informative):
        return MotionClass(MotionKind.PURE_TRANSLATION)
    if all(k is MotionKind.PURE_ROTATION for k in informative):
        return MotionClass(MotionKind.PURE_ROTATION)
    axes = rotation_axes(s, tol)
    best = best_axis_pair(axes)
    if best is not None and best[2] > tol.axis:
        return MotionClass(MotionKind.GENERAL)
    # Every rotating motion shares one axis; report the one from the largest rotation.
    _, n_b, _ = max(axes, key=lambda a: a[2])
    return MotionClass(MotionKind.PLANAR, tuple(float(x) for x in n_b))


def camera_axis(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Camera rotation axis of the largest robot rotation in the sequence."""
    axes = rotation_axes(s, tol)
    if not axes:
        raise InsufficientMotionError("no rotating motion in the sequence")
    i, _, _ = max(axes, key=lambda a: a[2])
    return rotation_to_axis_angle(s.pairs[i].camera.rotation).axis


def _independent_translations(vectors: Sequence[np.ndarray], tol: float) -> bool:
    for a, b in itertools.combinations(vectors, 2):
        if np.linalg.norm(np.cross(a, b)) > tol * np.linalg.norm(a) * np.linalg.norm(b):
            return True
    return False


def planar_translation_available(s: MotionSequence, n_b, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> bool:
    """Whether a planar sequence provides a (real or virtual) translation off the rotation axis."""
    classes = pair_classes(s, tol)
    ref = s.max_robot_translation()
    for p, c in zip(s.pairs, classes):
        if c.kind is MotionKind.PURE_TRANSLATION:
            t = p.robot.translation
            if np.linalg.norm(np.cross(t, n_b)) > tol.axis * np.linalg.norm(t):
                return True
    rot = [p for p, c in zip(s.pairs, classes) if c.kind in (MotionKind.PURE_ROTATION, MotionKind.GENERAL)]
    eye = np.eye(3)
    for p1, p2 in itertools.combinations(rot, 2):
        t1 = (eye - p2.robot.rotation) @ p1.robot.translation - (eye - p1.robot.rotation) @ p2.robot.translation
        if np.linalg.norm(t1) > tol.trans * max(ref, 1e-300):
            return True
    return False


def expected_solution_kind(c: MotionClass, s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> SolutionKind:
    """What a sequence of class ``c`` can determine.

    Raises when the class is known but its identifiability condition fails
    (parallel translations, parallel rotation axes, no usable translation
    in the planar case) and when the sequence is degenerate.
    """
    if c.kind is MotionKind.DEGENERATE:
        raise NoInformationError("all motions are identity; nothing can be calibrated")
    if c.kind is MotionKind.PURE_TRANSLATION:
        ts = [p.robot.translation for p, k in zip(s.pairs, pair_classes(s, tol)) if k.kind is MotionKind.PURE_TRANSLATION]
        if not _independent_translations(ts, tol.axis):
            raise InsufficientMotionError("pure translations are all parallel; need two independent directions")
        return SolutionKind.rotation_and_scale()
    if c.kind is MotionKind.PURE_ROTATION:
        best = best_axis_pair(rotation_axes(s, tol))
        if best is None or best[2] <= tol.axis:
            raise InsufficientMotionError("pure rotations need two non-parallel axes")
        return SolutionKind.up_to_scale()
    if c.kind is MotionKind.PLANAR:
        n_b = np.asarray(c.axis)
        if not planar_translation_available(s, n_b, tol):
            raise InsufficientMotionError(
                "planar motions give no translation off the rotation axis "
                "((I - R_B2) t_B1 - (I - R_B1) t_B2 vanishes)"
            )
        return SolutionKind.up_to_axis(camera_axis(s, tol))
    return SolutionKind.full()
