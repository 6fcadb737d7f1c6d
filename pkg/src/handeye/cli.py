"""Command-line interface.

Exit codes: 0 success, 2 usage, 3 parse/validation, 4 insufficient motion,
5 degenerate data, 6 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from handeye import __version__
from handeye import io as hio
from handeye.errors import HandEyeError
from handeye.motion import (
    ClassifyTolerances,
    MotionKind,
    MotionSequence,
    classify_sequence,
    expected_solution_kind,
    pair_classes,
)
from handeye.sim import SimConfig, run_motion_count_sweep, run_noise_sweep, synthetic_case
from handeye.solvers import (
    solve_auto,
    solve_general,
    solve_planar,
    solve_rotations,
    solve_translations_closed_form,
    solve_translations_two,
)

EXIT_OK = 0
EXIT_USAGE = 2

SOLVERS = {
    "auto": solve_auto,
    "general": solve_general,
    "translations": solve_translations_two,
    "translations3": solve_translations_closed_form,
    "rotations": solve_rotations,
    "planar": solve_planar,
}

CLASS_NAMES = {
    "general": MotionKind.GENERAL,
    "translation": MotionKind.PURE_TRANSLATION,
    "rotation": MotionKind.PURE_ROTATION,
    "planar": MotionKind.PLANAR,
}

SIM_DEFAULTS = {
    "seed": 0,
    "trials": 100,
    "nu": None,
    "motions": None,
    "motion_class": "general",
    "translation_amplitude": 1.0,
    "rotation_amplitude": 180.0,
    "hand_eye_translation_sigma": 0.1,
    "hand_eye_rpy_sigma": 30.0,
    "workers": 1,
}


class UsageError(Exception):
    pass


def _tolerances(args) -> ClassifyTolerances:
    base = ClassifyTolerances()
    return ClassifyTolerances(
        angle=base.angle if args.tol_angle is None else args.tol_angle,
        trans=base.trans if args.tol_trans is None else args.tol_trans,
        axis=base.axis if args.tol_axis is None else args.tol_axis,
    )


def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x: .9g}" for x in np.asarray(v).reshape(-1)) + "]"


def _print_summary(sol, s: MotionSequence, out) -> None:
    unit = s.metadata.get("units", "input units")
    print(f"solution kind : {sol.kind}", file=out)
    print(f"meaning       : {sol.kind.description}", file=out)
    if "motion_class" in sol.diagnostics:
        print(f"motion class  : {sol.diagnostics['motion_class']}", file=out)
    print("rotation R_X  :", file=out)
    for row in sol.rotation:
        print(f"  {_fmt_vec(row)}", file=out)
    if sol.translation is not None:
        label = {
            "Full": f"translation t_X ({unit})",
            "TranslationUpToScale": "t_X / lambda",
            "TranslationUpToAxis": f"in-plane translation t_perp ({unit})",
        }[sol.kind.type.value]
        print(f"{label}: {_fmt_vec(sol.translation)}", file=out)
    if sol.kind.axis is not None:
        print(f"free axis n_a : {_fmt_vec(sol.kind.axis)}  (t_X = t_perp + alpha * n_a)", file=out)
    if sol.scale is not None:
        print(f"scale lambda  : {sol.scale:.12g}", file=out)
    for w in sol.diagnostics.get("warnings", []):
        print(f"warning       : {w}", file=out)


def cmd_calibrate(args) -> int:
    s = hio.load_motions(args.input)
    tol = _tolerances(args)
    sol = SOLVERS[args.solver](s, tol)
    _print_summary(sol, s, sys.stdout)
    if args.output:
        cfg = {"solver": args.solver, "tolerances": asdict(tol)}
        hio.save_result(sol, args.output, input_path=args.input, config=cfg)
    return EXIT_OK


def cmd_classify(args) -> int:
    s = hio.load_motions(args.input)
    tol = _tolerances(args)
    for i, c in enumerate(pair_classes(s, tol)):
        print(f"pair {i}: {c}")
    c = classify_sequence(s, tol)
    try:
        kind = expected_solution_kind(c, s, tol)
    except HandEyeError:
        print(f"sequence: {c}")
        raise
    print(f"sequence: {c} / {kind}")
    print(f"meaning : {kind.description}")
    return EXIT_OK


def _parse_grid(text: str, cast):
    """``a,b,c`` or ``start:stop[:step]`` (inclusive) into a list."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1.0)
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step)) + 1
            return [cast(round(start + k * step, 12)) for k in range(n)]
        return [cast(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid grid {text!r}") from exc


def _sim_settings(args) -> dict:
    settings = dict(SIM_DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(SIM_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        settings.update(loaded)
    for key in SIM_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _sim_config(settings: dict, **overrides) -> SimConfig:
    try:
        kind = CLASS_NAMES[settings["motion_class"]]
    except KeyError as exc:
        raise UsageError(f"unknown motion class {settings['motion_class']!r}") from exc
    try:
        return SimConfig(
            seed=int(settings["seed"]),
            trials=int(settings["trials"]),
            motion_class=kind,
            translation_amplitude=float(settings["translation_amplitude"]),
            rotation_amplitude=math.radians(float(settings["rotation_amplitude"])),
            hand_eye_translation_sigma=float(settings["hand_eye_translation_sigma"]),
            hand_eye_rpy_sigma=math.radians(float(settings["hand_eye_rpy_sigma"])),
            **overrides,
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args) -> int:
    settings = _sim_settings(args)
    workers = int(settings["workers"])
    if args.sweep == "noise":
        nus = _parse_grid(settings["nu"] if settings["nu"] is not None else "0:0.2:0.02", float)
        motions = _parse_grid(settings["motions"] if settings["motions"] is not None else "2", int)
        if len(motions) != 1:
            raise UsageError("a noise sweep takes a single --motions value")
        if any(nu < 0 for nu in nus):
            raise UsageError("noise levels must be >= 0")
        cfg = _sim_config(settings, motions_per_trial=motions[0])
        rows = run_noise_sweep(cfg, nus, workers=workers)
    else:
        counts = _parse_grid(settings["motions"] if settings["motions"] is not None else "2:15", int)
        nus = _parse_grid(settings["nu"] if settings["nu"] is not None else "0.01", float)
        if len(nus) != 1:
            raise UsageError("a motion-count sweep takes a single --nu value")
        if any(n < 2 for n in counts):
            raise UsageError("motion counts must be >= 2")
        cfg = _sim_config(settings, noise_nu=nus[0])
        rows = run_motion_count_sweep(cfg, counts, workers=workers)
    text = hio.rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    settings = _sim_settings(args)
    nu = float(settings["nu"]) if settings["nu"] is not None else 0.0
    motions = int(settings["motions"]) if settings["motions"] is not None else 3
    cfg = _sim_config(settings, motions_per_trial=max(motions, 2), noise_nu=nu)
    case = synthetic_case(cfg, 0, motions)
    seq = case.sequence()
    meta = {
        "units": "m",
        "source": "handeye generate",
        "true_rotation": case.hand_eye.rotation.reshape(-1).tolist(),
        "true_translation": case.hand_eye.translation.tolist(),
        "true_scale": case.scale,
    }
    seq = MotionSequence(seq.pairs, None, meta)
    hio.save_motions(seq, args.output)
    return EXIT_OK


def _add_tolerance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-angle", type=float, help="rotation angle below which a motion counts as no rotation (rad)")
    p.add_argument("--tol-trans", type=float, help="translation threshold relative to the largest robot translation")
    p.add_argument("--tol-axis", type=float, help="angle below which two rotation axes count as parallel (rad)")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with simulation settings; flags take precedence")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--nu", help="noise level(s): value, list a,b,c or range start:stop:step")
    p.add_argument("--motions", help="motion count(s): value, list or range start:stop")
    p.add_argument("--class", dest="motion_class", choices=sorted(CLASS_NAMES))
    p.add_argument("--translation-amplitude", type=float, help="max robot translation length")
    p.add_argument("--rotation-amplitude", type=float, help="max robot rotation angle (degrees)")
    p.add_argument("--hand-eye-translation-sigma", type=float)
    p.add_argument("--hand-eye-rpy-sigma", type=float, help="degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="handeye", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate the hand-eye transform from a motion file")
    p.add_argument("input")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="auto")
    p.add_argument("--output", help="write a JSON result file")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("classify", help="report motion classes and what they can determine")
    p.add_argument("input")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="run a Monte-Carlo sweep and write a CSV table")
    p.add_argument("--sweep", choices=("noise", "motions"), default="noise")
    p.add_argument("--workers", type=int, help="threads for running trials")
    p.add_argument("--output", help="CSV path (default: stdout)")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="write a synthetic motion file")
    p.add_argument("--output", required=True)
    _add_sim_flags(p)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HandEyeError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return 6


if __name__ == "__main__":
    sys.exit(main())
