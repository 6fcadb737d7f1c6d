"""JSON motion files, result files and sweep CSVs.

A motion file looks like::

    {
      "version": 1,
      "metadata": {"units": "m"},
      "anchor": 0,
      "pairs": [
        {"camera": {"rotation": [9 reals, row-major], "direction": [3 reals]},
         "robot":  {"rotation": [9 reals, row-major], "translation": [3 reals]}}
      ]
    }

``anchor`` is optional. Floats are written with ``repr`` precision, so a
save/load round trip is exact.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import logging
import math
from pathlib import Path

import numpy as np

from handeye import __version__, linalg
from handeye.errors import ParseError, ValidationError
from handeye.motion import MotionPair, MotionSequence, SolutionKind, SolutionType
from handeye.se3 import RigidMotion, ScaledMotion, orthogonality_error
from handeye.solvers import HandEyeSolution

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (1,)
# Rotations further than this from SO(3) are rejected outright.
ROTATION_REJECT_TOL = 1e-3
ROTATION_WARN_TOL = 1e-6
# Below this the stored matrix is kept bit-for-bit.
ROTATION_EXACT_TOL = 1e-12

CSV_HEADER = (
    "sweep_value",
    "method",
    "rotation_error_median",
    "rotation_error_mean",
    "translation_error_median",
    "translation_error_mean",
    "lambda_error_median",
    "failures",
)


def _floats(value, n: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ValidationError(f"{where}: expected a list of {n} numbers")
    try:
        arr = np.array([float(v) for v in value])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: non-numeric entry") from exc
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{where}: non-finite entry")
    return arr


def _rotation(value, where: str) -> np.ndarray:
    r = _floats(value, 9, where).reshape(3, 3)
    det = float(np.linalg.det(r))
    if det <= 0:
        raise ValidationError(f"{where}: determinant {det:.6g} is not positive (reflection)")
    err = orthogonality_error(r)
    if err > ROTATION_REJECT_TOL or abs(det - 1.0) > ROTATION_REJECT_TOL:
        raise ValidationError(f"{where}: not a rotation (|R^T R - I| = {err:.3g}, det = {det:.6g})")
    if err <= ROTATION_EXACT_TOL and abs(det - 1.0) <= ROTATION_EXACT_TOL:
        return r
    if err > ROTATION_WARN_TOL:
        log.warning("%s: re-orthogonalising rotation (|R^T R - I| = %.3g)", where, err)
    return linalg.nearest_rotation(r)


def _section(obj, key: str, where: str) -> dict:
    value = obj.get(key) if isinstance(obj, dict) else None
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: missing '{key}' object")
    return value


def sequence_from_dict(data) -> MotionSequence:
    if not isinstance(data, dict):
        raise ValidationError("motion file must contain a JSON object")
    version = data.get("version")
    if version not in SUPPORTED_VERSIONS:
        raise ValidationError(f"unsupported motion file version {version!r}")
    raw_pairs = data.get("pairs")
    if not isinstance(raw_pairs, list) or not raw_pairs:
        raise ValidationError("motion file has no pairs")
    pairs = []
    for i, item in enumerate(raw_pairs):
        where = f"pair {i}"
        cam = _section(item, "camera", where)
        rob = _section(item, "robot", where)
        camera = ScaledMotion(
            _rotation(cam.get("rotation"), f"{where} camera rotation"),
            _floats(cam.get("direction"), 3, f"{where} camera direction"),
        )
        robot = RigidMotion(
            _rotation(rob.get("rotation"), f"{where} robot rotation"),
            _floats(rob.get("translation"), 3, f"{where} robot translation"),
        )
        pairs.append(MotionPair(camera, robot))
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValidationError("metadata must be an object")
    return MotionSequence(tuple(pairs), data.get("anchor"), dict(metadata))


def sequence_to_dict(s: MotionSequence) -> dict:
    out: dict = {"version": FORMAT_VERSION, "metadata": dict(s.metadata)}
    if s.anchor is not None:
        out["anchor"] = s.anchor
    out["pairs"] = [
        {
            "camera": {"rotation": p.camera.rotation.reshape(-1).tolist(), "direction": p.camera.direction.tolist()},
            "robot": {"rotation": p.robot.rotation.reshape(-1).tolist(), "translation": p.robot.translation.tolist()},
        }
        for p in s
    ]
    return out


def load_motions(path) -> MotionSequence:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return sequence_from_dict(data)


def save_motions(s: MotionSequence, path) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(s), indent=2) + "\n")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.integer):
        return int(value)
    return value


def solution_to_dict(sol: HandEyeSolution) -> dict:
    out = {
        "kind": sol.kind.type.value,
        "description": sol.kind.description,
        "rotation": sol.rotation.reshape(-1).tolist(),
    }
    if sol.kind.axis is not None:
        out["axis"] = list(sol.kind.axis)
    if sol.translation is not None:
        out["translation"] = np.asarray(sol.translation).tolist()
    if sol.scale is not None:
        out["scale"] = float(sol.scale)
    return out


def solution_from_dict(data: dict) -> HandEyeSolution:
    try:
        kind_type = SolutionType(data["kind"])
        rotation = np.array(data["rotation"], dtype=float).reshape(3, 3)
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"malformed solution record: {exc}") from exc
    axis = data.get("axis")
    kind = SolutionKind(kind_type, tuple(axis) if axis is not None else None)
    t = data.get("translation")
    return HandEyeSolution(rotation, None if t is None else np.array(t, dtype=float), data.get("scale"), kind)


def result_document(sol: HandEyeSolution, *, input_path=None, config: dict | None = None) -> dict:
    provenance = {"tool_version": __version__, "config": _jsonable(config or {})}
    if input_path is not None:
        provenance["input_sha256"] = file_digest(input_path)
    return {
        "version": FORMAT_VERSION,
        "solution": solution_to_dict(sol),
        "diagnostics": _jsonable(sol.diagnostics),
        "provenance": provenance,
    }


def save_result(sol: HandEyeSolution, path, *, input_path=None, config: dict | None = None) -> None:
    doc = result_document(sol, input_path=input_path, config=config)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_result(path) -> HandEyeSolution:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read result file {path}: {exc}") from exc
    if doc.get("version") not in SUPPORTED_VERSIONS:
        raise ValidationError(f"unsupported result file version {doc.get('version')!r}")
    return solution_from_dict(doc["solution"])


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def rows_to_csv(rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def write_sweep_csv(rows, path) -> None:
    Path(path).write_text(rows_to_csv(rows))


__all__ = [
    "CSV_HEADER",
    "load_motions",
    "load_result",
    "rows_to_csv",
    "save_motions",
    "save_result",
    "sequence_from_dict",
    "sequence_to_dict",
    "solution_from_dict",
    "solution_to_dict",
    "write_sweep_csv",
]
