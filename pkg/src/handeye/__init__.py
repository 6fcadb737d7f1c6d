"""Hand-eye calibration from camera motions known up to scale."""

__version__ = "0.1.0"

from handeye.errors import HandEyeError  # noqa: E402
from handeye.motion import (  # noqa: E402
    ClassifyTolerances,
    MotionClass,
    MotionKind,
    MotionPair,
    MotionSequence,
    SolutionKind,
    SolutionType,
    classify_pair,
    classify_sequence,
    expected_solution_kind,
)
from handeye.se3 import RigidMotion, ScaledMotion  # noqa: E402
from handeye.solvers import (  # noqa: E402
    HandEyeSolution,
    solve_auto,
    solve_general,
    solve_planar,
    solve_rotations,
    solve_translations_closed_form,
    solve_translations_two,
)

__all__ = [
    "ClassifyTolerances",
    "HandEyeError",
    "HandEyeSolution",
    "MotionClass",
    "MotionKind",
    "MotionPair",
    "MotionSequence",
    "RigidMotion",
    "ScaledMotion",
    "SolutionKind",
    "SolutionType",
    "classify_pair",
    "classify_sequence",
    "expected_solution_kind",
    "solve_auto",
    "solve_general",
    "solve_planar",
    "solve_rotations",
    "solve_translations_closed_form",
    "solve_translations_two",
]
