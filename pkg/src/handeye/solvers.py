"""Linear hand-eye solvers for camera motions known up to a global scale.

With camera motions ``A_i = (R_Ai, lambda * u_Ai)`` and robot motions
``B_i = (R_Bi, t_Bi)``, the constraint ``A_i X = X B_i`` splits into

    R_Ai R_X = R_X R_Bi
    R_Ai t_X + lambda u_Ai = R_X t_Bi + t_X

and, with the row-major ``vec``, into one homogeneous system per pair in
the 13 unknowns ``(vec(R_X), t_X, lambda)``::

    [ I9 - R_Ai (x) R_Bi      0         0    ]
    [ I3 (x) t_Bi^T       I3 - R_Ai  -u_Ai  ]

Each motion class gets its own solver because the class decides which of
the unknowns the system can determine.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from handeye import linalg
from handeye.errors import (
    ClassificationError,
    DegenerateDataError,
    InsufficientMotionError,
    NumericalError,
)
from handeye.motion import (
    DEFAULT_TOLERANCES,
    ClassifyTolerances,
    MotionKind,
    MotionSequence,
    SolutionKind,
    SolutionType,
    best_axis_pair,
    classify_sequence,
    expected_solution_kind,
    pair_classes,
    rotation_axes,
)
from handeye.se3 import RigidMotion, rotation_to_axis_angle

log = logging.getLogger(__name__)

NULL_SPACE_GAP = 1e3
HALF_TURN_WARNING = 1e-3
_I3 = np.eye(3)
_I9 = np.eye(9)


@dataclass(frozen=True, eq=False)
class HandEyeSolution:
    """Estimated hand-eye transform.

    ``translation`` means different things depending on ``kind``:
    ``t_X`` for a full solution, ``t_X / lambda`` when the translation is
    only known up to scale, the in-plane component ``t_perp`` when it is
    known up to the axis ``kind.axis``, and ``None`` when it is not
    observable.
    """

    rotation: np.ndarray
    translation: np.ndarray | None
    scale: float | None
    kind: SolutionKind
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scale is not None and not self.scale > 0:
            raise NumericalError(f"scale must be positive, got {self.scale}")
        has_t = self.translation is not None
        if has_t == (self.kind.type is SolutionType.ROTATION_AND_SCALE_ONLY):
            raise ValueError(f"translation presence inconsistent with kind {self.kind}")
        has_scale = self.scale is not None
        if has_scale == (self.kind.type is SolutionType.TRANSLATION_UP_TO_SCALE):
            raise ValueError(f"scale presence inconsistent with kind {self.kind}")

    def as_motion(self) -> RigidMotion:
        if self.kind.type is not SolutionType.FULL:
            raise ValueError(f"solution of kind {self.kind} is not a full rigid transform")
        return RigidMotion(self.rotation, self.translation)


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    matrix: np.ndarray
    pair_count: int


def pair_block(r_a, u_a, r_b, t_b) -> np.ndarray:
    """The 12x13 block one motion pair contributes."""
    block = np.zeros((12, 13))
    block[:9, :9] = _I9 - linalg.kron(r_a, r_b)
    block[9:, :9] = linalg.kron(_I3, np.reshape(t_b, (1, 3)))
    block[9:, 9:12] = _I3 - r_a
    block[9:, 12] = -np.asarray(u_a)
    return block


def assemble(s: MotionSequence) -> AssembledSystem:
    blocks = [pair_block(p.camera.rotation, p.camera.direction, p.robot.rotation, p.robot.translation) for p in s]
    return AssembledSystem(np.vstack(blocks), len(s))


def unknown_vector(rotation, translation, scale: float) -> np.ndarray:
    return np.concatenate([linalg.vec(rotation), np.asarray(translation, dtype=float), [float(scale)]])


def rotation_stack(s: MotionSequence) -> np.ndarray:
    """Rows ``I9 - R_Ai (x) R_Bi`` for every pair, stacked."""
    return np.vstack([_I9 - linalg.kron(p.camera.rotation, p.robot.rotation) for p in s])


def scale_to_rotation(v) -> np.ndarray:
    """Rescale a null-space vector into a rotation candidate.

    ``V = unvec(v)`` is proportional to ``R_X``; dividing by the signed cube
    root of ``det(V)`` gives determinant one. No orthogonalisation here.
    """
    m = linalg.unvec(v, 3, 3)
    det = float(np.linalg.det(m))
    if abs(det) < 1e-12:
        raise NumericalError("null-space matrix is singular; data inconsistent with a rotation")
    return math.copysign(1.0, det) / abs(det) ** (1.0 / 3.0) * m


def _near_half_turn(s: MotionSequence) -> list[str]:
    out = []
    for i, p in enumerate(s):
        angle = rotation_to_axis_angle(p.robot.rotation).angle
        if abs(angle - math.pi) < HALF_TURN_WARNING:
            out.append(f"pair {i}: rotation angle {angle:.6f} is close to pi; rank analysis is ill-conditioned")
    return out


def rotation_nullspace(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray, dict]:
    """Hand-eye rotation from the null space of the stacked rotation rows.

    Returns the orthogonalised rotation, the rescaled null-space matrix
    before orthogonalisation and a diagnostics dict.
    """
    best = best_axis_pair(rotation_axes(s, tol))
    if best is None or best[2] <= tol.axis:
        raise InsufficientMotionError("rotation needs two motions with non-parallel rotation axes")
    stack = rotation_stack(s)
    _, sv, vt = np.linalg.svd(stack, full_matrices=False)
    if sv[7] <= linalg.DEFAULT_RANK_TOL * sv[0]:
        raise InsufficientMotionError("rotation null space has dimension > 1 (parallel rotation axes)")
    gap = linalg.gap_ratio(sv, 8)
    warnings = _near_half_turn(s)
    if gap <= NULL_SPACE_GAP:
        # Expected with noisy data: the smallest singular direction is the least-squares estimate.
        log.debug("no clear null-space gap (sigma8/sigma9 = %.3g)", gap)
    raw = scale_to_rotation(vt[8])
    rotation = linalg.nearest_rotation(raw)
    diag = {
        "rotation_singular_values": [float(x) for x in sv],
        "rotation_gap_ratio": gap,
        "null_space_clear": gap > NULL_SPACE_GAP,
        "orthogonality_before_projection": float(np.linalg.norm(raw.T @ raw - _I3)),
        "warnings": warnings,
    }
    for w in warnings:
        log.warning(w)
    return rotation, raw, diag


def solve_rotation_nullspace(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return rotation_nullspace(s, tol)[0]


def _lstsq(a: np.ndarray, b: np.ndarray, rank: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Least squares through the SVD pseudo-inverse.

    With ``rank`` given, only the leading ``rank`` singular directions are
    kept, which yields the minimum-norm solution of a rank-deficient system.
    """
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    k = len(s) if rank is None else rank
    with np.errstate(divide="ignore", invalid="ignore"):
        x = vt[:k].T @ ((u[:, :k].T @ b) / s[:k])
    return x, s


def _require_class(s: MotionSequence, tol: ClassifyTolerances, *kinds: MotionKind):
    c = classify_sequence(s, tol)
    if c.kind not in kinds:
        expected = " or ".join(k.value for k in kinds)
        raise ClassificationError(f"sequence is {c}, solver needs {expected}")
    return c


def solve_general(
    s: MotionSequence,
    tol: ClassifyTolerances = DEFAULT_TOLERANCES,
    *,
    scale: float | None = None,
) -> HandEyeSolution:
    """Two-step solution for sequences with non-parallel rotation axes.

    Step one takes ``R_X`` from the rotation null space; step two solves
    ``(I - R_Ai) t_X - lambda u_Ai = -R_X t_Bi`` in the least-squares sense.
    Passing ``scale`` treats it as known (camera motions from pose
    estimation) and solves for ``t_X`` alone; the returned scale is then
    the given one.
    """
    _require_class(s, tol, MotionKind.GENERAL)
    rotation, _, diag = rotation_nullspace(s, tol)
    if scale is None:
        c = np.vstack([np.hstack([_I3 - p.camera.rotation, -p.camera.direction.reshape(3, 1)]) for p in s])
        d = np.concatenate([-rotation @ p.robot.translation for p in s])
    else:
        c = np.vstack([_I3 - p.camera.rotation for p in s])
        d = np.concatenate([scale * p.camera.direction - rotation @ p.robot.translation for p in s])
    x, sv = _lstsq(c, d)
    diag["translation_singular_values"] = [float(v) for v in sv]
    if sv[-1] <= linalg.DEFAULT_RANK_TOL * sv[0]:
        raise DegenerateDataError("translation system is rank deficient")
    diag["translation_condition"] = float(sv[0] / sv[-1])
    if scale is None:
        t_x, lam = x[:3], float(x[3])
        if lam < 0:
            msg = f"negative scale {lam:.6g}; flipping sign of (t_X, lambda)"
            log.warning(msg)
            diag["warnings"].append(msg)
            t_x, lam = -t_x, -lam
        if lam == 0.0:
            raise NumericalError("estimated scale is zero")
    else:
        t_x, lam = x, float(scale)
    return HandEyeSolution(rotation, t_x, lam, SolutionKind.full(), diag)


def _pure_translations(s: MotionSequence, tol: ClassifyTolerances) -> list[int]:
    return [i for i, c in enumerate(pair_classes(s, tol)) if c.kind is MotionKind.PURE_TRANSLATION]


def translation_rotation_closed_form(t_b, u_a) -> tuple[np.ndarray, float]:
    """Closed-form rotation from three pure translations.

    ``t_b`` and ``u_a`` are sequences of three robot translations and
    camera directions. Returns ``(R, lambda)`` where
    ``R = lambda/D * (u1 (t2 x t3)^T + u2 (t3 x t1)^T + u3 (t1 x t2)^T)``
    with ``D = det(t1, t2, t3)`` and lambda chosen so that ``det(R) = 1``.
    ``R`` is returned as computed, without orthogonalisation.
    """
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in t_b)
    u1, u2, u3 = (np.asarray(u, dtype=float) for u in u_a)
    delta = float(np.linalg.det(np.column_stack([t1, t2, t3])))
    if delta == 0.0:
        raise DegenerateDataError("robot translations are coplanar")
    w = (np.outer(u1, np.cross(t2, t3)) + np.outer(u2, np.cross(t3, t1)) + np.outer(u3, np.cross(t1, t2))) / delta
    det_w = float(np.linalg.det(w))
    if det_w <= 0.0:
        raise NumericalError(f"closed-form rotation has determinant {det_w:.3g}; expected positive")
    lam = det_w ** (-1.0 / 3.0)
    return lam * w, lam


def solve_translations_closed_form(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> HandEyeSolution:
    """Rotation and scale from three independent pure translations.

    With more than three translations, the triple with the largest
    normalised determinant is used.
    """
    idx = _pure_translations(s, tol)
    if len(idx) < 3:
        raise InsufficientMotionError("closed-form solver needs three pure translations")
    best, best_det = None, 0.0
    for tri in itertools.combinations(idx, 3):
        ts = [s[i].robot.translation for i in tri]
        d = abs(np.linalg.det(np.column_stack(ts))) / np.prod([np.linalg.norm(t) for t in ts])
        if d > best_det:
            best, best_det = tri, d
    if best is None or best_det <= tol.axis:
        raise DegenerateDataError("pure translations are coplanar (det(t_B1, t_B2, t_B3) ~ 0)")
    raw, lam = translation_rotation_closed_form(
        [s[i].robot.translation for i in best], [s[i].camera.direction for i in best]
    )
    rotation = linalg.nearest_rotation(raw)
    diag = {
        "triple": list(best),
        "normalized_delta": float(best_det),
        "orthogonality_before_projection": float(np.linalg.norm(raw.T @ raw - _I3)),
        "warnings": [],
    }
    return HandEyeSolution(rotation, None, lam, SolutionKind.rotation_and_scale(), diag)


def _scale_from_norms(dirs, trans) -> float:
    """Least-squares fit of ``lambda * |u_i| = |t_i|``."""
    un = np.array([np.linalg.norm(u) for u in dirs])
    tn = np.array([np.linalg.norm(t) for t in trans])
    denom = float(un @ un)
    if denom == 0.0:
        raise DegenerateDataError("camera translations are all zero")
    return float(un @ tn) / denom


def _rotation_from_two_vectors(b1, a1, b2, a2) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``R b1 = a1``, ``R b2 = a2`` and ``R (b1 x b2) = a1 x a2`` for ``R``.

    Built as the 9x9 Kronecker system on ``vec(R)``; returns the raw and the
    orthogonalised matrix.
    """
    rows = [linalg.kron(_I3, np.reshape(b, (1, 3))) for b in (b1, b2, np.cross(b1, b2))]
    m = np.vstack(rows)
    rhs = np.concatenate([a1, a2, np.cross(a1, a2)])
    raw = linalg.unvec(np.linalg.solve(m, rhs), 3, 3)
    return raw, linalg.nearest_rotation(raw)


def solve_translations_two(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> HandEyeSolution:
    """Rotation and scale from two or more independent pure translations.

    The scale comes from norm preservation over every translation; the
    rotation from the pair of translations that is furthest from parallel,
    completed with their cross product.
    """
    idx = _pure_translations(s, tol)
    if len(idx) < 2:
        raise InsufficientMotionError("need at least two pure translations")
    lam = _scale_from_norms([s[i].camera.direction for i in idx], [s[i].robot.translation for i in idx])
    best, best_sep = None, 0.0
    for i, j in itertools.combinations(idx, 2):
        ti, tj = s[i].robot.translation, s[j].robot.translation
        sep = np.linalg.norm(np.cross(ti, tj)) / (np.linalg.norm(ti) * np.linalg.norm(tj))
        if sep > best_sep:
            best, best_sep = (i, j), sep
    if best is None or best_sep <= tol.axis:
        raise DegenerateDataError("pure translations are parallel")
    i, j = best
    raw, rotation = _rotation_from_two_vectors(
        s[i].robot.translation, lam * s[i].camera.direction, s[j].robot.translation, lam * s[j].camera.direction
    )
    diag = {
        "pair": [i, j],
        "sin_separation": float(best_sep),
        "orthogonality_before_projection": float(np.linalg.norm(raw.T @ raw - _I3)),
        "warnings": [],
    }
    return HandEyeSolution(rotation, None, lam, SolutionKind.rotation_and_scale(), diag)


def solve_rotations(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> HandEyeSolution:
    """Rotation and ``t_X / lambda`` from pure rotations of the robot."""
    _require_class(s, tol, MotionKind.PURE_ROTATION)
    rotation, _, diag = rotation_nullspace(s, tol)
    c = np.vstack([_I3 - p.camera.rotation for p in s])
    d = np.concatenate([p.camera.direction for p in s])
    t0, sv = _lstsq(c, d)
    diag["translation_singular_values"] = [float(v) for v in sv]
    if sv[-1] <= linalg.DEFAULT_RANK_TOL * sv[0]:
        raise InsufficientMotionError("translation system is rank deficient")
    return HandEyeSolution(rotation, t0, None, SolutionKind.up_to_scale(), diag)


def virtual_translation(p1, p2) -> tuple[np.ndarray, np.ndarray]:
    """Pure translation equivalent to two motions sharing a rotation axis.

    Returns ``(t'_B, u'_A)`` with ``t'_B = (I - R_B2) t_B1 - (I - R_B1) t_B2``
    and the matching camera direction, so that ``R_X t'_B = lambda u'_A``.
    """
    tb = (_I3 - p2.robot.rotation) @ p1.robot.translation - (_I3 - p1.robot.rotation) @ p2.robot.translation
    ua = (_I3 - p2.camera.rotation) @ p1.camera.direction - (_I3 - p1.camera.rotation) @ p2.camera.direction
    return tb, ua


def solve_planar(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> HandEyeSolution:
    """Rotation, scale and in-plane translation for motions sharing one rotation axis.

    Needs a translation that is not parallel to the rotation axis: a real
    pure translation if one exists, otherwise the virtual translation built
    from two rotating motions. The translation component along the camera
    rotation axis ``n_a`` stays undetermined.
    """
    _require_class(s, tol, MotionKind.PLANAR)
    classes = pair_classes(s, tol)
    axes = rotation_axes(s, tol)
    k, n_b, _ = max(axes, key=lambda a: a[2])
    n_a = rotation_to_axis_angle(s[k].camera.rotation).axis
    diag: dict = {"warnings": _near_half_turn(s)}

    trans = [i for i, c in enumerate(classes) if c.kind is MotionKind.PURE_TRANSLATION]
    usable = [i for i in trans if np.linalg.norm(np.cross(s[i].robot.translation, n_b)) > tol.axis * np.linalg.norm(s[i].robot.translation)]
    if usable:
        lam = _scale_from_norms([s[i].camera.direction for i in trans], [s[i].robot.translation for i in trans])
        j = max(usable, key=lambda i: np.linalg.norm(np.cross(s[i].robot.translation, n_b)))
        t_b, u_a = s[j].robot.translation, s[j].camera.direction
        diag["translation_source"] = f"pair {j}"
    else:
        rotating = [a[0] for a in axes]
        best, best_norm = None, 0.0
        for i, j in itertools.combinations(rotating, 2):
            tb, ua = virtual_translation(s[i], s[j])
            nrm = float(np.linalg.norm(tb))
            if nrm > best_norm:
                best, best_norm = (tb, ua, i, j), nrm
        if best is None or best_norm <= tol.trans * max(s.max_robot_translation(), 1e-300):
            raise InsufficientMotionError(
                "no usable translation: (I - R_B2) t_B1 - (I - R_B1) t_B2 vanishes for every pair of motions"
            )
        t_b, u_a, i, j = best
        lam = _scale_from_norms([u_a], [t_b])
        diag["translation_source"] = f"virtual from pairs {i}, {j}"
    if np.linalg.norm(np.cross(t_b, n_b)) <= tol.axis * np.linalg.norm(t_b):
        raise InsufficientMotionError("translation is parallel to the rotation axis")

    raw, rotation = _rotation_from_two_vectors(t_b, lam * u_a, n_b, n_a)
    diag["orthogonality_before_projection"] = float(np.linalg.norm(raw.T @ raw - _I3))

    rot_pairs = [s[a[0]] for a in axes]
    c = np.vstack([_I3 - p.camera.rotation for p in rot_pairs])
    d = np.concatenate([lam * p.camera.direction - rotation @ p.robot.translation for p in rot_pairs])
    t_perp, sv = _lstsq(c, d, rank=2)
    diag["translation_singular_values"] = [float(v) for v in sv]
    return HandEyeSolution(rotation, t_perp, lam, SolutionKind.up_to_axis(n_a), diag)


def solve_auto(s: MotionSequence, tol: ClassifyTolerances = DEFAULT_TOLERANCES) -> HandEyeSolution:
    """Classify the sequence and run the matching solver."""
    c = classify_sequence(s, tol)
    expected = expected_solution_kind(c, s, tol)
    if c.kind is MotionKind.PURE_TRANSLATION:
        sol = solve_translations_two(s, tol)
    elif c.kind is MotionKind.PURE_ROTATION:
        sol = solve_rotations(s, tol)
    elif c.kind is MotionKind.PLANAR:
        sol = solve_planar(s, tol)
    else:
        sol = solve_general(s, tol)
    if sol.kind.type is not expected.type:
        raise NumericalError(f"solver returned {sol.kind}, expected {expected}")
    sol.diagnostics["motion_class"] = str(c)
    return sol


def joint_null_space(s: MotionSequence) -> dict:
    """One-shot null space of the full 12n x 13 system (diagnostic only).

    The 13-vector is scaled so that its rotation part has unit determinant.
    Unlike the two-step route, the rotation part is not guaranteed
    orthogonal under noise, so this is only reported, never used as the
    estimate.
    """
    m = assemble(s).matrix
    _, sv, vt = np.linalg.svd(m, full_matrices=True)
    v = vt[-1]
    r = linalg.unvec(v[:9], 3, 3)
    det = float(np.linalg.det(r))
    if abs(det) < 1e-12:
        raise NumericalError("rotation part of the joint null vector is singular")
    mu = math.copysign(abs(det) ** (1.0 / 3.0), det)
    v = v / mu
    return {
        "rotation": linalg.unvec(v[:9], 3, 3),
        "translation": v[9:12],
        "scale": float(v[12]),
        "singular_values": sv,
    }


def system_residual(s: MotionSequence, rotation, translation, scale: float) -> float:
    """Norm of the assembled system applied to a candidate solution."""
    return float(np.linalg.norm(assemble(s).matrix @ unknown_vector(rotation, translation, scale)))
