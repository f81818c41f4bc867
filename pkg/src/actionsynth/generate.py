"""End-to-end dataset generation: scenarios to manifest + per-video track files.

Outputs are fully determined by (params, library, master seed): each video's
scenario seed derives from (master seed, index, attempt), so results are
identical whether scenarios are rendered serially or by a worker pool.
Layout: `manifest.jsonl` (one record per line), `tracks/<id>.csv` per video,
and optional `splits/split<i>_{train,test}.txt` files.
"""

from __future__ import annotations

import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .camera import camera_basis, simulate
from .distributions import RngStream, derive_seed
from .motions import MotionLibrary
from .ragdoll import RootPlacement, apply_variation, enforce_limits, pose_track
from .scenario import (
    GeneratorParams,
    ScenarioDescriptor,
    ScenarioError,
    sample_scenario,
    validate_params,
)

__all__ = [
    "GenerationError",
    "ManifestRecord",
    "DatasetStats",
    "generate_dataset",
    "render_scenario",
    "read_manifest",
    "compute_stats",
    "audit_records",
    "make_splits",
    "write_splits",
]

log = logging.getLogger(__name__)

_HIST_FIELDS = (
    ("environment", "environment"),
    ("weather", "weather"),
    ("day_phase", "day_phase"),
    ("variation_mode", "variation_mode"),
    ("camera_kind", "camera_kind"),
    ("human_model", "human_model"),
)


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ManifestRecord:
    video_id: str
    seed: int
    action: str
    human_model: str
    environment: str
    camera_kind: str
    day_phase: str
    weather: str
    variation_mode: str
    motion_id: str
    motion_duration: float
    supporting_actors: int
    duration: float
    frame_count: int
    fps: float
    resolution: tuple[int, int]
    track_path: str
    clamp_events: int
    retries: int

    def to_json_obj(self) -> dict:
        return {
            "video_id": self.video_id,
            "seed": self.seed,
            "action": self.action,
            "human_model": self.human_model,
            "environment": self.environment,
            "camera_kind": self.camera_kind,
            "day_phase": self.day_phase,
            "weather": self.weather,
            "variation_mode": self.variation_mode,
            "motion_id": self.motion_id,
            "motion_duration": self.motion_duration,
            "supporting_actors": self.supporting_actors,
            "duration": self.duration,
            "frame_count": self.frame_count,
            "fps": self.fps,
            "resolution": list(self.resolution),
            "track_path": self.track_path,
            "clamp_events": self.clamp_events,
            "retries": self.retries,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ManifestRecord":
        return cls(
            video_id=obj["video_id"],
            seed=int(obj["seed"]),
            action=obj["action"],
            human_model=obj["human_model"],
            environment=obj["environment"],
            camera_kind=obj["camera_kind"],
            day_phase=obj["day_phase"],
            weather=obj["weather"],
            variation_mode=obj["variation_mode"],
            motion_id=obj["motion_id"],
            motion_duration=float(obj["motion_duration"]),
            supporting_actors=int(obj["supporting_actors"]),
            duration=float(obj["duration"]),
            frame_count=int(obj["frame_count"]),
            fps=float(obj["fps"]),
            resolution=tuple(int(v) for v in obj["resolution"]),
            track_path=obj["track_path"],
            clamp_events=int(obj["clamp_events"]),
            retries=int(obj["retries"]),
        )


def _video_id(index: int, action: str) -> str:
    return f"v{index:05d}_{action.replace(' ', '_')}"


def _track_header() -> str:
    cols = ["frame", "cam_px", "cam_py", "cam_pz", "look_x", "look_y", "look_z"]
    for k in range(15):
        cols += [f"j{k}_wx", f"j{k}_wy", f"j{k}_wz", f"j{k}_sx", f"j{k}_sy", f"j{k}_vis"]
    cols += ["bbox_x0", "bbox_y0", "bbox_x1", "bbox_y1"]
    return ",".join(cols)


def _fmt(x: float) -> str:
    return "%.6f" % x


def render_scenario(params: GeneratorParams, library: MotionLibrary, master_seed: int,
                    index: int, action: str | None = None,
                    max_retries: int = 3) -> tuple[ManifestRecord, str, ScenarioDescriptor]:
    """Render one video: (manifest record, track CSV text, descriptor).

    Failed draws are retried with a derived seed; the record counts retries.
    """
    desc: ScenarioDescriptor | None = None
    retries = 0
    last_err: ScenarioError | None = None
    for attempt in range(max_retries + 1):
        seed = derive_seed(master_seed, index, attempt)
        try:
            desc = sample_scenario(params, library, seed, action=action)
            break
        except ScenarioError as err:
            log.warning("scenario %d attempt %d failed: %s", index, attempt, err)
            retries += 1
            last_err = err
    if desc is None:
        raise GenerationError(f"scenario {index}: no valid draw after {retries} attempts: {last_err}")

    scene = desc.scene
    clip = library.clip(scene.motion_id)
    varied = apply_variation(clip, scene.plan, clip.skeleton, library)
    clamped, violations = enforce_limits(varied, clip.skeleton)

    fps = params.fps
    n_frames = int(round(scene.duration * fps))
    placement = RootPlacement(scene.placement.position, scene.placement.heading_deg)
    pose = pose_track(clamped, placement, scene.duration, fps)
    prot = np.ascontiguousarray(pose.positions[:, 0, :])
    traj = simulate(scene.rig, prot, fps, scene.duration)

    width, height = params.resolution
    focal = (height / 2.0) / np.tan(np.radians(params.camera_vfov_deg) / 2.0)
    out = io.StringIO()
    out.write(_track_header() + "\n")
    for f in range(n_frames):
        cam = traj.positions[f]
        look = traj.look_dirs[f]
        right, up, fwd = camera_basis(look)
        pix = kernels.project_points(pose.positions[f], cam, right, up, fwd,
                                     focal, width / 2.0, height / 2.0)
        cells = [str(f), _fmt(cam[0]), _fmt(cam[1]), _fmt(cam[2]),
                 _fmt(look[0]), _fmt(look[1]), _fmt(look[2])]
        for k in range(15):
            w = pose.positions[f, k]
            cells += [_fmt(w[0]), _fmt(w[1]), _fmt(w[2]),
                      _fmt(pix[k, 0]), _fmt(pix[k, 1]), str(int(pix[k, 2]))]
        vis = pix[:, 2] > 0.5
        if vis.any():
            xs, ys = pix[vis, 0], pix[vis, 1]
            bbox = (
                min(max(xs.min(), 0.0), width), min(max(ys.min(), 0.0), height),
                min(max(xs.max(), 0.0), width), min(max(ys.max(), 0.0), height),
            )
        else:
            bbox = (np.nan, np.nan, np.nan, np.nan)
        cells += [_fmt(v) for v in bbox]
        out.write(",".join(cells) + "\n")

    video_id = _video_id(index, scene.action)
    record = ManifestRecord(
        video_id=video_id,
        seed=desc.seed,
        action=scene.action,
        human_model=desc.human_model,
        environment=scene.environment,
        camera_kind=scene.camera_kind,
        day_phase=desc.world.day_phase,
        weather=desc.world.weather,
        variation_mode=scene.variation_mode,
        motion_id=scene.motion_id,
        motion_duration=scene.motion_duration,
        supporting_actors=scene.supporting_actors,
        duration=scene.duration,
        frame_count=n_frames,
        fps=fps,
        resolution=params.resolution,
        track_path=f"tracks/{video_id}.csv",
        clamp_events=len(violations),
        retries=retries,
    )
    return record, out.getvalue(), desc


_WORKER_CTX: dict = {}


def _worker_init(params: GeneratorParams, library: MotionLibrary) -> None:
    _WORKER_CTX["params"] = params
    _WORKER_CTX["library"] = library


def _worker_render(job: tuple[int, str | None, int, int]) -> tuple[ManifestRecord, str]:
    index, action, master_seed, max_retries = job
    record, csv_text, _ = render_scenario(
        _WORKER_CTX["params"], _WORKER_CTX["library"], master_seed, index, action, max_retries
    )
    return record, csv_text


def generate_dataset(params: GeneratorParams, library: MotionLibrary, out_dir: str | Path,
                     master_seed: int, per_category: int | None = None,
                     total: int | None = None, workers: int = 1,
                     max_retries: int = 3) -> list[ManifestRecord]:
    """Generate the dataset under out_dir and return the manifest records.

    Exactly one of per_category (forces each action category in turn) and
    total (samples categories from the action weights) must be given.
    """
    if (per_category is None) == (total is None):
        raise ValueError("specify exactly one of per_category and total")
    findings = validate_params(params, library)
    if findings:
        raise GenerationError("invalid configuration: " + "; ".join(findings))

    if per_category is not None:
        if per_category <= 0:
            raise ValueError("per_category must be positive")
        jobs = [
            (idx, action, master_seed, max_retries)
            for idx, action in enumerate(
                a for a in params.actions for _ in range(per_category)
            )
        ]
    else:
        if total <= 0:
            raise ValueError("total must be positive")
        jobs = [(idx, None, master_seed, max_retries) for idx in range(total)]

    out_dir = Path(out_dir)
    (out_dir / "tracks").mkdir(parents=True, exist_ok=True)

    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(params, library)
        ) as pool:
            results = list(pool.map(_worker_render, jobs, chunksize=8))
    else:
        _worker_init(params, library)
        results = [_worker_render(job) for job in jobs]

    records = []
    with (out_dir / "manifest.jsonl").open("w") as manifest:
        for record, csv_text in results:
            (out_dir / record.track_path).write_text(csv_text)
            manifest.write(json.dumps(record.to_json_obj()) + "\n")
            records.append(record)
    return records


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    records = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ManifestRecord.from_json_obj(json.loads(line)))
    if not records:
        raise GenerationError(f"manifest {path} is empty")
    return records


@dataclass(frozen=True)
class DatasetStats:
    clip_count: int
    total_frames: int
    total_duration: float
    mean_duration: float
    per_category: dict[str, int]
    histograms: dict[str, dict[str, int]]

    def to_json_obj(self) -> dict:
        return {
            "clip_count": self.clip_count,
            "total_frames": self.total_frames,
            "total_duration": self.total_duration,
            "mean_duration": self.mean_duration,
            "per_category": self.per_category,
            "histograms": self.histograms,
        }


def compute_stats(records: Sequence[ManifestRecord]) -> DatasetStats:
    if not records:
        raise GenerationError("cannot compute statistics of an empty manifest")
    per_category: dict[str, int] = {}
    histograms: dict[str, dict[str, int]] = {name: {} for name, _ in _HIST_FIELDS}
    total_frames = 0
    total_duration = 0.0
    for rec in records:
        per_category[rec.action] = per_category.get(rec.action, 0) + 1
        total_frames += rec.frame_count
        total_duration += rec.duration
        for name, attr in _HIST_FIELDS:
            value = getattr(rec, attr)
            histograms[name][value] = histograms[name].get(value, 0) + 1
    return DatasetStats(
        clip_count=len(records),
        total_frames=total_frames,
        total_duration=total_duration,
        mean_duration=total_duration / len(records),
        per_category=dict(sorted(per_category.items())),
        histograms={k: dict(sorted(v.items())) for k, v in histograms.items()},
    )


def audit_records(records: Iterable[ManifestRecord], params: GeneratorParams,
                  library: MotionLibrary) -> list[str]:
    """Re-validate the conditional constraints on emitted records."""
    problems = []
    camera_idx = {kind: i for i, kind in enumerate(params.camera_kinds)}
    action_idx = {name: i for i, name in enumerate(params.actions)}
    for rec in records:
        where = f"{rec.video_id}:"
        if rec.camera_kind == "indoors" and rec.environment != "house":
            problems.append(f"{where} indoors camera outside the house environment")
        a = action_idx.get(rec.action)
        if a is None:
            problems.append(f"{where} unknown action {rec.action!r}")
            continue
        c = camera_idx.get(rec.camera_kind)
        if c is None or not params.action_camera_allowed[a][c]:
            problems.append(f"{where} camera {rec.camera_kind!r} not allowed for {rec.action!r}")
        spec = library.action(rec.action)
        if rec.supporting_actors != spec.supporting_actors:
            problems.append(
                f"{where} {rec.supporting_actors} supporting actors, expected {spec.supporting_actors}"
            )
        limit = min(rec.motion_duration, params.max_duration)
        if not params.min_duration - 1e-9 <= rec.duration <= limit + 1e-9:
            problems.append(f"{where} duration {rec.duration} outside [{params.min_duration}, {limit}]")
        if rec.frame_count != int(round(rec.duration * rec.fps)):
            problems.append(f"{where} frame count {rec.frame_count} != round(duration * fps)")
    return problems


def make_splits(records: Sequence[ManifestRecord], train_ratio: float = 0.8,
                split_count: int = 3, seed: int = 0) -> list[tuple[list[str], list[str]]]:
    """Stratified train/test partitions; each split shuffles with a derived stream."""
    if not records:
        raise GenerationError("cannot split an empty manifest")
    by_category: dict[str, list[str]] = {}
    for rec in records:
        by_category.setdefault(rec.action, []).append(rec.video_id)
    for action, ids in by_category.items():
        if len(ids) < 2:
            raise GenerationError(f"category {action!r} has {len(ids)} clip(s); need at least 2")
    splits = []
    for s in range(split_count):
        rng = RngStream(seed, s)
        train: list[str] = []
        test: list[str] = []
        for action in sorted(by_category):
            ids = by_category[action]
            order = rng.permutation(len(ids))
            n_train = int(round(train_ratio * len(ids)))
            n_train = min(max(n_train, 1), len(ids) - 1)
            shuffled = [ids[i] for i in order]
            train.extend(shuffled[:n_train])
            test.extend(shuffled[n_train:])
        splits.append((train, test))
    return splits


def write_splits(splits: Sequence[tuple[list[str], list[str]]], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, (train, test) in enumerate(splits, start=1):
        for name, ids in (("train", train), ("test", test)):
            path = out_dir / f"split{i}_{name}.txt"
            path.write_text("\n".join(ids) + "\n")
            paths.append(path)
    return paths
