"""Keyframed motion clips, per-action rules and the action-motion match matrix.

A clip stores per-muscle rotation keyframes (15 channels) plus a root
translation track; interpolation between keys is componentwise linear.
Actions match clips through case-insensitive regex search over the clip's
free-text description, producing a binary action x clip matrix.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .skeleton import MUSCLES, RagdollSpec, canonical_muscle_order

__all__ = [
    "Channel",
    "MotionClip",
    "ObjectProtocol",
    "ActionSpec",
    "MotionLibrary",
    "LibraryError",
    "build_motion_matrix",
    "admissible_motions",
    "load_library",
    "save_library",
]

CLIP_SOURCES = ("mocap", "artist", "programmed")
ACTION_KINDS = ("sub_hmdb", "one_person", "two_people")


class LibraryError(ValueError):
    """Raised for malformed clip/library files and malformed action patterns."""


@dataclass(frozen=True)
class Channel:
    """Time-ordered keyframes; each value is a fixed-width vector (3 components)."""

    times: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.times:
            raise LibraryError("channel needs at least one keyframe")
        if len(self.times) != len(self.values):
            raise LibraryError("channel times/values length mismatch")
        for t0, t1 in zip(self.times, self.times[1:]):
            if not t1 > t0:
                raise LibraryError(f"keyframe times must be strictly increasing, got {t0} then {t1}")

    def sample(self, t: float) -> np.ndarray:
        """Linear interpolation, clamped to the end values outside the key range."""
        times = np.asarray(self.times)
        values = np.asarray(self.values)
        return np.array([np.interp(t, times, values[:, k]) for k in range(values.shape[1])])

    def sample_many(self, ts: np.ndarray) -> np.ndarray:
        times = np.asarray(self.times)
        values = np.asarray(self.values)
        out = np.empty((len(ts), values.shape[1]))
        for k in range(values.shape[1]):
            out[:, k] = np.interp(ts, times, values[:, k])
        return out

    def to_json_obj(self) -> dict:
        return {"times": list(self.times), "values": [list(v) for v in self.values]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Channel":
        return cls(
            times=tuple(float(t) for t in obj["times"]),
            values=tuple(tuple(float(x) for x in v) for v in obj["values"]),
        )


def _check_channel(clip_id: str, name: str, ch: Channel, width: int, duration: float) -> None:
    for v in ch.values:
        if len(v) != width:
            raise LibraryError(f"clip {clip_id!r}: channel {name!r} needs {width}-component values")
    if ch.times[0] < 0.0 or ch.times[-1] > duration + 1e-9:
        raise LibraryError(f"clip {clip_id!r}: channel {name!r} keys outside [0, duration]")


@dataclass(frozen=True)
class MotionClip:
    """One keyframed motion: 15 rotation channels (deg) plus root translation (m)."""

    clip_id: str
    source: str
    description: str
    fps: float
    duration: float
    skeleton: RagdollSpec
    tracks: Mapping[str, Channel]
    root_track: Channel
    # World-space positional drift per muscle, added by the variation engine.
    drift_tracks: Mapping[str, Channel] = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in CLIP_SOURCES:
            raise LibraryError(f"clip {self.clip_id!r}: unknown source {self.source!r}")
        if not self.duration > 0.0:
            raise LibraryError(f"clip {self.clip_id!r}: duration must be positive")
        if not self.fps > 0.0:
            raise LibraryError(f"clip {self.clip_id!r}: fps must be positive")
        for name in self.tracks:
            if name not in self.skeleton.muscles:
                raise LibraryError(f"clip {self.clip_id!r}: unknown muscle {name!r}")
        for name in self.skeleton.muscles:
            if name not in self.tracks:
                raise LibraryError(f"clip {self.clip_id!r}: missing channel for muscle {name!r}")
            _check_channel(self.clip_id, name, self.tracks[name], 3, self.duration)
        _check_channel(self.clip_id, "root", self.root_track, 3, self.duration)
        for name, ch in self.drift_tracks.items():
            if name not in self.skeleton.muscles:
                raise LibraryError(f"clip {self.clip_id!r}: drift on unknown muscle {name!r}")
            _check_channel(self.clip_id, f"drift:{name}", ch, 3, self.duration)

    def replace(self, **changes) -> "MotionClip":
        base = dict(
            clip_id=self.clip_id,
            source=self.source,
            description=self.description,
            fps=self.fps,
            duration=self.duration,
            skeleton=self.skeleton,
            tracks=dict(self.tracks),
            root_track=self.root_track,
            drift_tracks=dict(self.drift_tracks),
        )
        base.update(changes)
        return MotionClip(**base)

    def to_json_obj(self) -> dict:
        return {
            "id": self.clip_id,
            "source": self.source,
            "description": self.description,
            "fps": self.fps,
            "duration": self.duration,
            "skeleton": self.skeleton.to_json_obj(),
            "tracks": {m: self.tracks[m].to_json_obj() for m in self.skeleton.muscles},
            "root_track": self.root_track.to_json_obj(),
            "drift_tracks": {m: ch.to_json_obj() for m, ch in sorted(self.drift_tracks.items())},
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MotionClip":
        try:
            return cls(
                clip_id=str(obj["id"]),
                source=str(obj["source"]),
                description=str(obj["description"]),
                fps=float(obj["fps"]),
                duration=float(obj["duration"]),
                skeleton=RagdollSpec.from_json_obj(obj["skeleton"]),
                tracks={m: Channel.from_json_obj(c) for m, c in obj["tracks"].items()},
                root_track=Channel.from_json_obj(obj["root_track"]),
                drift_tracks={
                    m: Channel.from_json_obj(c)
                    for m, c in obj.get("drift_tracks", {}).items()
                },
            )
        except KeyError as err:
            raise LibraryError(f"clip {obj.get('id', '?')!r}: missing field {err}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotionClip):
            return NotImplemented
        return self.to_json_obj() == other.to_json_obj()


@dataclass(frozen=True)
class ObjectProtocol:
    """How an action uses an object: carried/attached (dynamic) or a fixture (static)."""

    kind: str                      # "dynamic" | "static"
    object_kind: str               # e.g. "ball", "bench"
    attach_muscle: str | None = None  # dynamic only
    timed: bool = False            # binding carries a scripted event time (e.g. impact)

    def __post_init__(self):
        if self.kind not in ("dynamic", "static"):
            raise ValueError(f"object protocol kind must be dynamic or static, got {self.kind!r}")
        if self.kind == "dynamic":
            if self.attach_muscle not in MUSCLES:
                raise ValueError(f"dynamic object needs an attach muscle, got {self.attach_muscle!r}")
        elif self.attach_muscle is not None:
            raise ValueError("static object protocol takes no attach muscle")

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "object_kind": self.object_kind,
            "attach_muscle": self.attach_muscle,
            "timed": self.timed,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ObjectProtocol":
        return cls(
            kind=obj["kind"],
            object_kind=obj["object_kind"],
            attach_muscle=obj.get("attach_muscle"),
            timed=bool(obj.get("timed", False)),
        )


@dataclass(frozen=True)
class ActionSpec:
    """Per-action rules: match patterns, muscle partition, object use, actor count."""

    name: str
    kind: str
    patterns: tuple[str, ...]
    critical: tuple[str, ...]
    complementary: tuple[str, ...]
    object_protocol: ObjectProtocol | None = None
    supporting_actors: int = 0

    def __init__(self, name, kind, patterns, critical, complementary=None,
                 object_protocol=None, supporting_actors=None):
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "kind", str(kind))
        object.__setattr__(self, "patterns", tuple(str(p) for p in patterns))
        crit = canonical_muscle_order(set(critical))
        if complementary is None:
            comp = canonical_muscle_order(set(MUSCLES) - set(crit))
        else:
            comp = canonical_muscle_order(set(complementary))
        object.__setattr__(self, "critical", crit)
        object.__setattr__(self, "complementary", comp)
        object.__setattr__(self, "object_protocol", object_protocol)
        if supporting_actors is None:
            supporting_actors = 1 if kind == "two_people" else 0
        object.__setattr__(self, "supporting_actors", int(supporting_actors))
        self._validate()

    def _validate(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"action {self.name!r}: unknown kind {self.kind!r}")
        if not self.patterns:
            raise ValueError(f"action {self.name!r}: needs at least one pattern")
        crit, comp = set(self.critical), set(self.complementary)
        if crit & comp:
            raise ValueError(f"action {self.name!r}: critical and complementary overlap")
        if crit | comp != set(MUSCLES):
            raise ValueError(f"action {self.name!r}: muscle partition must cover all 15 muscles")
        want = 1 if self.kind == "two_people" else 0
        if self.supporting_actors != want:
            raise ValueError(
                f"action {self.name!r}: {self.kind} actions need {want} supporting actor(s)"
            )

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "patterns": list(self.patterns),
            "critical": list(self.critical),
            "complementary": list(self.complementary),
            "object_protocol": self.object_protocol.to_json_obj() if self.object_protocol else None,
            "supporting_actors": self.supporting_actors,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ActionSpec":
        proto = obj.get("object_protocol")
        return cls(
            name=obj["name"],
            kind=obj["kind"],
            patterns=obj["patterns"],
            critical=obj["critical"],
            complementary=obj.get("complementary"),
            object_protocol=ObjectProtocol.from_json_obj(proto) if proto else None,
            supporting_actors=obj.get("supporting_actors"),
        )


def build_motion_matrix(actions: Sequence[ActionSpec], clips: Sequence[MotionClip]) -> np.ndarray:
    """Binary (action x clip) matrix; entry 1 iff any action pattern matches the description."""
    if not actions or not clips:
        raise LibraryError("build_motion_matrix needs non-empty actions and clips")
    compiled = []
    for spec in actions:
        row = []
        for pat in spec.patterns:
            try:
                row.append(re.compile(pat, re.IGNORECASE))
            except re.error as err:
                raise LibraryError(
                    f"action {spec.name!r}: bad pattern {pat!r}: {err}"
                ) from None
        compiled.append(row)
    matrix = np.zeros((len(actions), len(clips)), dtype=np.uint8)
    for a, row in enumerate(compiled):
        for b, clip in enumerate(clips):
            if any(rx.search(clip.description) for rx in row):
                matrix[a, b] = 1
    return matrix


class MotionLibrary:
    """Immutable clip collection + action specs; the match matrix is rebuilt on construction."""

    def __init__(self, clips: Sequence[MotionClip], actions: Sequence[ActionSpec]):
        self.clips = tuple(clips)
        self.actions = tuple(actions)
        ids = [c.clip_id for c in self.clips]
        if len(set(ids)) != len(ids):
            raise LibraryError("duplicate clip ids")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise LibraryError("duplicate action names")
        self.matrix = build_motion_matrix(self.actions, self.clips)
        self._clip_index = {c.clip_id: i for i, c in enumerate(self.clips)}
        self._action_index = {a.name: i for i, a in enumerate(self.actions)}

    def clip(self, clip_id: str) -> MotionClip:
        try:
            return self.clips[self._clip_index[clip_id]]
        except KeyError:
            raise KeyError(f"unknown clip id {clip_id!r}") from None

    def action(self, name: str) -> ActionSpec:
        try:
            return self.actions[self._action_index[name]]
        except KeyError:
            raise KeyError(f"unknown action {name!r}") from None

    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotionLibrary):
            return NotImplemented
        return self.clips == other.clips and self.actions == other.actions

    def to_json_obj(self) -> dict:
        return {
            "clips": [c.to_json_obj() for c in self.clips],
            "actions": [a.to_json_obj() for a in self.actions],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MotionLibrary":
        try:
            clips = [MotionClip.from_json_obj(c) for c in obj["clips"]]
            actions = [ActionSpec.from_json_obj(a) for a in obj["actions"]]
        except (TypeError, KeyError) as err:
            raise LibraryError(f"malformed library document: {err}") from None
        return cls(clips, actions)


def admissible_motions(action: ActionSpec, library: MotionLibrary,
                       min_duration: float) -> dict[str, float]:
    """Matched clips no shorter than min_duration, with uniform positive weights.

    An empty result is a valid return; callers decide whether that is an error.
    """
    row = library.matrix[library.actions.index(action)]
    picked = [
        c.clip_id
        for c, hit in zip(library.clips, row)
        if hit and c.duration >= min_duration
    ]
    if not picked:
        return {}
    w = 1.0 / len(picked)
    return {clip_id: w for clip_id in picked}


def load_library(path: str | Path) -> MotionLibrary:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise LibraryError(f"cannot read library {path}: {err}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise LibraryError(f"library {path} is not valid JSON: {err}") from None
    if not isinstance(obj, dict):
        raise LibraryError(f"library {path}: top level must be an object")
    return MotionLibrary.from_json_obj(obj)


def save_library(library: MotionLibrary, path: str | Path) -> None:
    Path(path).write_text(json.dumps(library.to_json_obj(), indent=1))
