"""Motion variation engine and forward kinematics for the 15-part rig.

Variations never touch an action's critical muscles: perturbations add a
circular positional drift to affected muscles, weakening scales joint
excursions toward the bind pose, blending swaps complementary channels for a
donor clip's channels (time-normalized), and object use records a binding
without altering channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .distributions import RngStream
from .motions import ActionSpec, Channel, MotionClip, MotionLibrary
from .skeleton import MUSCLES, RagdollSpec, canonical_muscle_order

__all__ = [
    "VARIATION_MODES",
    "VariationRanges",
    "PerturbParams",
    "BlendDonor",
    "ObjectBinding",
    "VariationPlan",
    "LimitViolation",
    "RootPlacement",
    "PoseTrack",
    "plan_variation",
    "apply_variation",
    "enforce_limits",
    "forward_kinematics",
    "pose_track",
]

VARIATION_MODES = ("none", "perturbation", "weakening", "objects", "blending")


@dataclass(frozen=True)
class VariationRanges:
    """Sampling ranges for variation parameters (documented defaults, configurable)."""

    perturb_amplitude: tuple[float, float] = (0.02, 0.15)   # m
    perturb_frequency: tuple[float, float] = (0.5, 3.0)     # Hz
    weaken_factor: tuple[float, float] = (0.2, 0.9)

    def to_json_obj(self) -> dict:
        return {
            "perturb_amplitude": list(self.perturb_amplitude),
            "perturb_frequency": list(self.perturb_frequency),
            "weaken_factor": list(self.weaken_factor),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "VariationRanges":
        return cls(
            perturb_amplitude=tuple(obj["perturb_amplitude"]),
            perturb_frequency=tuple(obj["perturb_frequency"]),
            weaken_factor=tuple(obj["weaken_factor"]),
        )


@dataclass(frozen=True)
class PerturbParams:
    """Circular orbit drift: amplitude (m), frequency (Hz), phase (rad), orbit plane basis."""

    amplitude: float
    frequency: float
    phase: float
    basis_u: tuple[float, float, float]
    basis_v: tuple[float, float, float]


@dataclass(frozen=True)
class BlendDonor:
    clip_id: str
    muscles: tuple[str, ...]


@dataclass(frozen=True)
class ObjectBinding:
    kind: str                       # "dynamic" | "static"
    object_kind: str
    attach_muscle: str | None       # dynamic only
    anchor_offset: tuple[float, float, float]
    event_fraction: float | None = None  # scripted event instant as a fraction of the video


@dataclass(frozen=True)
class VariationPlan:
    mode: str
    affected: tuple[str, ...] = ()
    perturb: Mapping[str, PerturbParams] = field(default_factory=dict)
    weaken: Mapping[str, float] = field(default_factory=dict)
    donors: tuple[BlendDonor, ...] = ()
    object_binding: ObjectBinding | None = None

    def __post_init__(self):
        if self.mode not in VARIATION_MODES:
            raise ValueError(f"unknown variation mode {self.mode!r}")
        if self.mode == "none" and (
            self.affected or self.perturb or self.weaken or self.donors or self.object_binding
        ):
            raise ValueError("mode 'none' must carry no parameters")
        if len(self.donors) > 2:
            raise ValueError("at most two blend donors")


def _empty_plan() -> VariationPlan:
    return VariationPlan(mode="none")


def _affected_subset(spec: ActionSpec, rng: RngStream) -> tuple[str, ...]:
    comp = spec.complementary  # already in canonical order
    k = rng.integers(len(comp)) + 1
    perm = rng.permutation(len(comp))[:k]
    return canonical_muscle_order(comp[i] for i in perm)


def _orbit_basis(rng: RngStream) -> tuple[tuple[float, ...], tuple[float, ...]]:
    # Orbit plane normal sampled uniformly on the sphere, then any orthonormal pair in it.
    z = rng.uniform(-1.0, 1.0)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    s = math.sqrt(max(0.0, 1.0 - z * z))
    n = np.array([s * math.cos(theta), s * math.sin(theta), z])
    ref = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, ref)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return tuple(u), tuple(v)


def plan_variation(spec: ActionSpec, mode: str, library: MotionLibrary,
                   rng: RngStream, ranges: VariationRanges = VariationRanges()) -> VariationPlan:
    """Draw variation parameters; affected muscles come only from the complementary set."""
    if mode not in VARIATION_MODES:
        raise ValueError(f"unknown variation mode {mode!r}")
    if mode == "none":
        return _empty_plan()
    if mode == "objects":
        proto = spec.object_protocol
        if proto is None:
            raise ValueError(f"action {spec.name!r} has no object protocol")
        offset = (
            rng.uniform(-0.4, 0.4),
            rng.uniform(0.2, 0.6),
            rng.uniform(0.7, 1.3),
        )
        fraction = rng.uniform(0.2, 0.8) if proto.timed else None
        return VariationPlan(
            mode="objects",
            object_binding=ObjectBinding(
                kind=proto.kind,
                object_kind=proto.object_kind,
                attach_muscle=proto.attach_muscle,
                anchor_offset=offset,
                event_fraction=fraction,
            ),
        )

    if not spec.complementary:
        raise ValueError(f"action {spec.name!r} has no complementary muscles to vary")
    affected = _affected_subset(spec, rng)

    if mode == "perturbation":
        perturb = {}
        for muscle in affected:
            amplitude = rng.uniform(*ranges.perturb_amplitude)
            frequency = rng.uniform(*ranges.perturb_frequency)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            u, v = _orbit_basis(rng)
            perturb[muscle] = PerturbParams(amplitude, frequency, phase, u, v)
        return VariationPlan(mode="perturbation", affected=affected, perturb=perturb)

    if mode == "weakening":
        weaken = {m: rng.uniform(*ranges.weaken_factor) for m in affected}
        return VariationPlan(mode="weakening", affected=affected, weaken=weaken)

    # blending
    count = 1 + rng.integers(2)
    donor_ids = [library.clips[rng.integers(len(library.clips))].clip_id for _ in range(count)]
    assignment: list[list[str]] = [[] for _ in range(count)]
    for muscle in affected:
        assignment[rng.integers(count)].append(muscle)
    donors = tuple(
        BlendDonor(clip_id=cid, muscles=canonical_muscle_order(muscles))
        for cid, muscles in zip(donor_ids, assignment)
        if muscles
    )
    return VariationPlan(mode="blending", affected=affected, donors=donors)


def _drift_channel(p: PerturbParams, duration: float, fps: float) -> Channel:
    times = np.arange(0.0, duration + 1e-9, 1.0 / fps)
    angles = 2.0 * math.pi * p.frequency * times + p.phase
    u = np.asarray(p.basis_u)
    v = np.asarray(p.basis_v)
    values = p.amplitude * (np.cos(angles)[:, None] * u + np.sin(angles)[:, None] * v)
    return Channel(times=tuple(float(t) for t in times),
                   values=tuple(tuple(float(x) for x in row) for row in values))


def apply_variation(clip: MotionClip, plan: VariationPlan, ragdoll: RagdollSpec,
                    library: MotionLibrary | None = None) -> MotionClip:
    """Return the varied clip; channels outside the affected set stay bit-identical."""
    for muscle in plan.affected:
        if muscle not in clip.tracks:
            raise ValueError(f"clip {clip.clip_id!r} has no channel for muscle {muscle!r}")

    if plan.mode in ("none", "objects"):
        return clip

    if plan.mode == "perturbation":
        drift = dict(clip.drift_tracks)
        for muscle in plan.affected:
            drift[muscle] = _drift_channel(plan.perturb[muscle], clip.duration, clip.fps)
        return clip.replace(drift_tracks=drift)

    if plan.mode == "weakening":
        tracks = dict(clip.tracks)
        for muscle in plan.affected:
            factor = plan.weaken[muscle]
            ch = tracks[muscle]
            tracks[muscle] = Channel(
                times=ch.times,
                values=tuple(tuple(factor * x for x in v) for v in ch.values),
            )
        return clip.replace(tracks=tracks)

    # blending
    if library is None:
        raise ValueError("blending needs the motion library to resolve donor clips")
    tracks = dict(clip.tracks)
    for donor in plan.donors:
        donor_clip = library.clip(donor.clip_id)
        scale = clip.duration / donor_clip.duration
        for muscle in donor.muscles:
            if muscle not in donor_clip.tracks:
                raise ValueError(
                    f"donor clip {donor.clip_id!r} is missing channel {muscle!r}"
                )
            ch = donor_clip.tracks[muscle]
            tracks[muscle] = Channel(
                times=tuple(t * scale for t in ch.times),
                values=ch.values,
            )
    return clip.replace(tracks=tracks)


@dataclass(frozen=True)
class LimitViolation:
    muscle: str
    frame: int    # keyframe index within the channel
    axis: int     # 0=x, 1=y, 2=z
    overshoot: float


def enforce_limits(clip: MotionClip, ragdoll: RagdollSpec) -> tuple[MotionClip, list[LimitViolation]]:
    """Clamp every rotation component into its limit interval; report each clamp event.

    Clamping keyframes is enough: linear interpolation between two in-range
    keys cannot leave the interval.
    """
    report: list[LimitViolation] = []
    tracks = dict(clip.tracks)
    for m_idx, muscle in enumerate(ragdoll.muscles):
        limits = ragdoll.limits[m_idx]
        ch = tracks[muscle]
        new_values = []
        changed = False
        for k_idx, value in enumerate(ch.values):
            fixed = list(value)
            for axis in range(3):
                lo, hi = limits[axis]
                x = value[axis]
                if x < lo:
                    report.append(LimitViolation(muscle, k_idx, axis, lo - x))
                    fixed[axis] = lo
                    changed = True
                elif x > hi:
                    report.append(LimitViolation(muscle, k_idx, axis, x - hi))
                    fixed[axis] = hi
                    changed = True
            new_values.append(tuple(fixed))
        if changed:
            tracks[muscle] = Channel(times=ch.times, values=tuple(new_values))
    if not report:
        return clip, report
    return clip.replace(tracks=tracks), report


@dataclass(frozen=True)
class RootPlacement:
    """World placement of the protagonist: position (m) and heading about z (deg)."""

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    heading_deg: float = 0.0


@dataclass(frozen=True)
class PoseTrack:
    """Per-frame world muscle positions (m) and local joint rotations (deg)."""

    positions: np.ndarray   # (frames, 15, 3)
    rotations: np.ndarray   # (frames, 15, 3)
    fps: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("pose track has non-finite positions")

    @property
    def frame_count(self) -> int:
        return self.positions.shape[0]


def _heading_matrix(heading_deg: float) -> np.ndarray:
    h = math.radians(heading_deg)
    return np.array([
        [math.cos(h), -math.sin(h), 0.0],
        [math.sin(h), math.cos(h), 0.0],
        [0.0, 0.0, 1.0],
    ])


def _pose_at_times(clip: MotionClip, placement: RootPlacement, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    skel = clip.skeleton
    n = len(times)
    rot = np.empty((n, 15, 3))
    for j, muscle in enumerate(skel.muscles):
        rot[:, j, :] = clip.tracks[muscle].sample_many(times)
    root_local = clip.root_track.sample_many(times)
    origin = np.asarray(placement.position, dtype=np.float64)
    root_world = origin + root_local @ _heading_matrix(placement.heading_deg).T
    pos = kernels.fk_frames(rot, skel.parents_array(), skel.offsets_array(),
                            root_world, placement.heading_deg)
    for muscle, ch in clip.drift_tracks.items():
        pos[:, skel.index(muscle), :] += ch.sample_many(times)
    return pos, rot


def forward_kinematics(clip: MotionClip, placement: RootPlacement,
                       frame: int, fps: float | None = None) -> np.ndarray:
    """World positions of the 15 muscles at one frame (frame index at `fps`)."""
    rate = clip.fps if fps is None else fps
    t = frame / rate
    if frame < 0 or t > clip.duration + 1e-9:
        raise ValueError(f"frame {frame} at {rate} fps is outside clip {clip.clip_id!r}")
    pos, _ = _pose_at_times(clip, placement, np.array([t]))
    return pos[0]


def pose_track(clip: MotionClip, placement: RootPlacement,
               duration: float, fps: float) -> PoseTrack:
    """World pose for round(duration * fps) frames starting at clip time zero."""
    if duration > clip.duration + 1e-9:
        raise ValueError(
            f"requested {duration} s from clip {clip.clip_id!r} of {clip.duration} s"
        )
    n_frames = int(round(duration * fps))
    times = np.arange(n_frames) / fps
    pos, rot = _pose_at_times(clip, placement, times)
    return PoseTrack(positions=pos, rotations=rot, fps=fps)
