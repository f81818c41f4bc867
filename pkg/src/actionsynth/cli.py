"""Command line interface.

Subcommands: generate, stats, splits, camera-sim, validate, loss-check.
Exit codes: 0 success, 1 validation failure, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .camera import CAMERA_KINDS, sample_rig, simulate
from .distributions import RngStream
from .generate import (
    GenerationError,
    audit_records,
    compute_stats,
    generate_dataset,
    make_splits,
    read_manifest,
    write_splits,
)
from .motions import LibraryError, MotionLibrary, load_library
from .multitask import (
    LossWeights,
    MultiTaskLabel,
    SegmentScores,
    finite_difference_check,
    multitask_loss,
)
from .sample_library import build_sample_library
from .scenario import GeneratorParams, default_params, load_params, validate_params


def _load_config(path: str | None) -> GeneratorParams:
    if path is None:
        return default_params()
    return load_params(path)


def _load_lib(path: str | None) -> MotionLibrary:
    if path is None:
        return build_sample_library()
    return load_library(path)


def _cmd_generate(args) -> int:
    params = _load_config(args.config)
    library = _load_lib(args.library)
    records = generate_dataset(
        params, library, args.out, args.seed,
        per_category=args.per_category, total=args.total,
        workers=args.workers, max_retries=args.max_retries,
    )
    print(f"wrote {len(records)} records to {Path(args.out) / 'manifest.jsonl'} "
          f"(kernels: {kernels.BACKEND})")
    return 0


def _cmd_stats(args) -> int:
    records = read_manifest(args.manifest)
    print(json.dumps(compute_stats(records).to_json_obj(), indent=1))
    return 0


def _cmd_splits(args) -> int:
    records = read_manifest(args.manifest)
    splits = make_splits(records, train_ratio=args.ratio, split_count=args.count, seed=args.seed)
    paths = write_splits(splits, args.out)
    print(f"wrote {len(paths)} split files to {args.out}")
    return 0


def _cmd_camera_sim(args) -> int:
    rig = sample_rig(args.kind, RngStream(args.seed))
    n_frames = int(round(args.duration * args.fps))
    prot = np.tile(np.array([0.0, 0.0, 1.0]), (max(n_frames, 1), 1))
    traj = simulate(rig, prot, args.fps, args.duration)
    lines = ["frame,cam_px,cam_py,cam_pz,look_x,look_y,look_z"]
    for f in range(traj.frame_count):
        p, d = traj.positions[f], traj.look_dirs[f]
        lines.append(f"{f}," + ",".join("%.6f" % v for v in (*p, *d)))
    Path(args.out).write_text("\n".join(lines) + "\n")
    separation = float(np.linalg.norm(traj.positions[-1] - traj.states[-1, 6:9]))
    print(f"wrote {traj.frame_count} frames to {args.out}; "
          f"final camera-target separation {separation:.3f} m")
    return 0


def _cmd_validate(args) -> int:
    params = _load_config(args.config)
    library = _load_lib(args.library)
    findings = validate_params(params, library)
    if args.manifest:
        findings += audit_records(read_manifest(args.manifest), params, library)
    for finding in findings:
        print(finding)
    if findings:
        return 1
    print("configuration valid")
    return 0


def _cmd_loss_check(args) -> int:
    obj = json.loads(Path(args.input).read_text())
    scores = SegmentScores(
        real=np.asarray(obj["scores"]["real"], dtype=np.float64),
        virtual=np.asarray(obj["scores"]["virtual"], dtype=np.float64),
    )
    label = MultiTaskLabel(obj["label"]["source"], int(obj["label"]["class_index"]))
    weights = LossWeights(float(obj["weights"]["real"]), float(obj["weights"]["virtual"]))
    heads = scores.consensus()
    loss = multitask_loss(heads, label, weights)
    err = finite_difference_check(heads, label, weights)
    print(json.dumps({"loss": loss, "max_fd_relative_error": err}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actionsynth",
        description="Procedural human-action scenario generator and ground-truth emitter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a dataset (manifest + track files)")
    gen.add_argument("--config", help="generator parameter JSON (default: built-in)")
    gen.add_argument("--library", help="motion library JSON (default: bundled sample library)")
    count = gen.add_mutually_exclusive_group(required=True)
    count.add_argument("--per-category", type=int, help="videos per action category")
    count.add_argument("--total", type=int, help="total videos, categories sampled from weights")
    gen.add_argument("--seed", type=int, required=True, help="master seed (no implicit entropy)")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--workers", type=int, default=1)
    gen.add_argument("--max-retries", type=int, default=3)
    gen.set_defaults(func=_cmd_generate)

    stats = sub.add_parser("stats", help="print dataset statistics as JSON")
    stats.add_argument("--manifest", required=True)
    stats.set_defaults(func=_cmd_stats)

    splits = sub.add_parser("splits", help="write stratified train/test split files")
    splits.add_argument("--manifest", required=True)
    splits.add_argument("--out", required=True)
    splits.add_argument("--ratio", type=float, default=0.8)
    splits.add_argument("--count", type=int, default=3)
    splits.add_argument("--seed", type=int, default=0)
    splits.set_defaults(func=_cmd_splits)

    cam = sub.add_parser("camera-sim", help="simulate a camera rig against a stationary subject")
    cam.add_argument("--kind", choices=CAMERA_KINDS, default="kite")
    cam.add_argument("--seed", type=int, required=True)
    cam.add_argument("--duration", type=float, default=10.0)
    cam.add_argument("--fps", type=float, default=30.0)
    cam.add_argument("--out", required=True)
    cam.set_defaults(func=_cmd_camera_sim)

    val = sub.add_parser("validate", help="validate a configuration (and optionally a manifest)")
    val.add_argument("--config", help="generator parameter JSON (default: built-in)")
    val.add_argument("--library", help="motion library JSON (default: bundled sample library)")
    val.add_argument("--manifest", help="also audit an emitted manifest")
    val.set_defaults(func=_cmd_validate)

    loss = sub.add_parser("loss-check", help="evaluate the multi-task loss and gradient check")
    loss.add_argument("--input", required=True, help="JSON with scores per head, label, weights")
    loss.set_defaults(func=_cmd_loss_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (GenerationError, LibraryError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
