import json

import numpy as np
import pytest

from conftest import make_sequence, random_hand_eye, rotation_about
from handeye import io as hio
from handeye.errors import ParseError, ValidationError
from handeye.motion import SolutionKind
from handeye.se3 import RigidMotion
from handeye.sim import SweepRow
from handeye.solvers import HandEyeSolution


def sample_sequence(rng, n=3):
    robots = [RigidMotion(rotation_about(rng.normal(size=3), 1.0), rng.normal(size=3)) for _ in range(n)]
    s = make_sequence(random_hand_eye(rng), 1.7, robots)
    return type(s)(s.pairs, None, {"units": "m"})


def pair_dict(r, u=(0.0, 0.0, 1.0)):
    return {
        "camera": {"rotation": list(np.ravel(r)), "direction": list(u)},
        "robot": {"rotation": list(np.ravel(r)), "translation": [0.0, 0.0, 1.0]},
    }


def test_single_pair_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"version": 1, "pairs": [pair_dict(np.eye(3))]}))
    assert len(hio.load_motions(path)) == 1


def test_reflection_rejected_with_pair_index():
    data = {"version": 1, "pairs": [pair_dict(np.eye(3)), pair_dict(np.diag([1.0, 1.0, -1.0]))]}
    with pytest.raises(ValidationError, match="pair 1"):
        hio.sequence_from_dict(data)


def test_roundtrip_is_exact(tmp_path, rng):
    s = sample_sequence(rng)
    path = tmp_path / "m.json"
    hio.save_motions(s, path)
    back = hio.load_motions(path)
    assert back.metadata == {"units": "m"}
    for p, q in zip(s, back):
        np.testing.assert_array_equal(p.camera.rotation, q.camera.rotation)
        np.testing.assert_array_equal(p.camera.direction, q.camera.direction)
        np.testing.assert_array_equal(p.robot.rotation, q.robot.rotation)
        np.testing.assert_array_equal(p.robot.translation, q.robot.translation)


def test_slightly_off_rotation_is_projected():
    r = rotation_about([1, 2, 3], 0.5) + 1e-5
    s = hio.sequence_from_dict({"version": 1, "pairs": [pair_dict(r)]})
    rr = s[0].robot.rotation
    assert np.linalg.norm(rr.T @ rr - np.eye(3)) < 1e-12


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"version": 2, "pairs": []},
        {"version": 1, "pairs": []},
        {"version": 1, "pairs": [{"camera": {}}]},
        {"version": 1, "pairs": [pair_dict(2 * np.eye(3))]},
        {"version": 1, "pairs": [pair_dict(np.eye(3), u=(0, "a", 1))]},
        {"version": 1, "pairs": [pair_dict(np.eye(3), u=(0, 1))]},
        {"version": 1, "metadata": [], "pairs": [pair_dict(np.eye(3))]},
    ],
)
def test_malformed_documents(data):
    with pytest.raises(ValidationError):
        hio.sequence_from_dict(data)


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        hio.load_motions(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        hio.load_motions(bad)


def test_result_roundtrip(tmp_path, rng):
    s = sample_sequence(rng)
    inp = tmp_path / "m.json"
    hio.save_motions(s, inp)
    sol = HandEyeSolution(rotation_about([0, 0, 1], 0.3), np.array([0.1, 0.2, 0.3]), 1.5, SolutionKind.up_to_axis([0, 0, 1]), {"warnings": []})
    out = tmp_path / "r.json"
    hio.save_result(sol, out, input_path=inp, config={"solver": "planar"})
    doc = json.loads(out.read_text())
    assert doc["provenance"]["input_sha256"] == hio.file_digest(inp)
    assert doc["provenance"]["config"] == {"solver": "planar"}
    back = hio.load_result(out)
    assert back.kind == sol.kind
    np.testing.assert_array_equal(back.rotation, sol.rotation)
    np.testing.assert_array_equal(back.translation, sol.translation)
    assert back.scale == sol.scale


def test_csv_format():
    rows = [SweepRow(0.1, "pose", 1e-3, 2e-3, 0.5, 0.25, float("nan"), 0)]
    text = hio.rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(hio.CSV_HEADER)
    assert lines[1] == "0.1,pose,0.001,0.002,0.5,0.25,nan,0"
