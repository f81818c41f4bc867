"""Procedurally built sample motion library.

Real capture archives cannot ship with the package, so this module
synthesizes a deterministic stand-in: 75 keyframed clips (two per action,
two sub-minimum-length clips, and three deliberately over-limit "energetic"
clips that exercise the joint-limit clamp). Descriptions are written to match
the default action patterns. Load external clip files for real data.
"""

from __future__ import annotations

import math

import numpy as np

from .actions import DEFAULT_ACTIONS
from .distributions import RngStream
from .motions import Channel, MotionClip, MotionLibrary
from .skeleton import RagdollSpec, default_ragdoll

__all__ = ["build_sample_library"]

_DESCRIPTIONS: dict[str, tuple[str, str]] = {
    "brush hair": ("brush hair with long strokes", "combing and brushing hair while standing"),
    "catch": ("catch a ball thrown from the front", "catch an object with both hands"),
    "clap": ("clap hands rhythmically", "applause clapping sequence"),
    "climb stairs": ("climb a flight of stairs", "walking up stairs steadily"),
    "golf": ("golf swing with full follow through", "practice golf drive at the range"),
    "jump": ("jump in place with both feet", "running leap forward"),
    "kick ball": ("kick a ball with the right foot", "powerful kick toward the goal"),
    "push": ("push a heavy object forward", "pushing motion with both arms"),
    "pick": ("pick up a box from the ground", "bend down and pick an item"),
    "pour": ("pour water from a pitcher", "pouring a drink into a glass"),
    "pull up": ("pull-up on a high bar", "slow chin-up repetitions"),
    "run": ("run at a steady pace", "jogging along a straight path"),
    "shoot ball": ("shoot a basketball at the hoop", "jump shot basketball release"),
    "shoot bow": ("draw and shoot a bow", "archer releasing an arrow"),
    "shoot gun": ("fire a gun at a target", "aim a pistol and fire"),
    "sit": ("sit down on a bench", "sitting down slowly"),
    "stand": ("stand up from a chair", "standing upright from kneeling"),
    "swing baseball": ("swing a baseball bat", "baseball batting practice"),
    "throw": ("throw a ball overhand", "throwing motion with the right arm"),
    "walk": ("walk forward at an easy pace", "walk in a slow relaxed manner"),
    "wave": ("wave with the right hand", "waving greeting gesture"),
    "car hit": ("pedestrian car hit collision", "person struck in a car hit"),
    "crawl": ("crawl on hands and knees", "military crawl forward"),
    "dive floor": ("dive to the floor", "diving roll onto the ground"),
    "flee": ("flee in panic", "sprint away fleeing from danger"),
    "hop": ("hop on one leg", "hopping forward repeatedly"),
    "leg split": ("leg split on the floor", "gymnastic split descent"),
    "limp": ("limp with an injured leg", "limping walk cycle"),
    "moonwalk": ("moonwalk glide backwards", "smooth moonwalk sequence"),
    "stagger": ("stagger as if dizzy", "stumble and stagger sideways"),
    "surrender": ("surrender with hands up", "raise hands up in surrender"),
    "walking hug": ("walking hug between two people", "embrace and hug while walking"),
    "walk hold hands": ("walk while holding hands", "couple hold hands walking together"),
    "walk the line": ("walk the line heel to toe", "balance walking a straight line"),
    "bump into each other": ("two people bump into each other", "bump shoulder collision while walking"),
}

# Actions whose clips translate the root forward.
_MOVING = {
    "walk", "run", "flee", "limp", "moonwalk", "stagger", "hop", "crawl",
    "climb stairs", "walking hug", "walk hold hands", "walk the line",
}

_KEY_STEP = 0.25  # s between authored keyframes


def _key_times(duration: float) -> np.ndarray:
    return np.arange(0.0, duration + 1e-9, _KEY_STEP)


def _muscle_channel(skel: RagdollSpec, m_idx: int, times: np.ndarray,
                    rng: RngStream, overshoot_axis: int | None = None) -> Channel:
    values = np.zeros((len(times), 3))
    for axis in range(3):
        lo, hi = skel.limits[m_idx][axis]
        center = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        frac = rng.uniform(0.15, 0.6)
        if overshoot_axis == axis:
            frac = 1.2  # intentionally beyond the limit, pre-clamp
        amp = frac * half
        freq = rng.uniform(0.4, 1.2)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        values[:, axis] = center + amp * np.sin(2.0 * math.pi * freq * times + phase)
    return Channel(
        times=tuple(float(t) for t in times),
        values=tuple(tuple(float(v) for v in row) for row in values),
    )


def _root_channel(times: np.ndarray, moving: bool, rng: RngStream) -> Channel:
    speed = rng.uniform(0.6, 1.8) if moving else 0.0
    sway = rng.uniform(0.01, 0.05)
    bob_freq = rng.uniform(1.2, 2.2)
    values = np.stack([
        sway * np.sin(2.0 * math.pi * 0.7 * times),
        speed * times,
        0.95 + 0.02 * np.sin(2.0 * math.pi * bob_freq * times),
    ], axis=1)
    return Channel(
        times=tuple(float(t) for t in times),
        values=tuple(tuple(float(v) for v in row) for row in values),
    )


def _make_clip(clip_id: str, description: str, duration: float, moving: bool,
               skel: RagdollSpec, rng: RngStream,
               overshoot: tuple[str, int] | None = None) -> MotionClip:
    times = _key_times(duration)
    tracks = {}
    for m_idx, muscle in enumerate(skel.muscles):
        axis = overshoot[1] if overshoot is not None and overshoot[0] == muscle else None
        tracks[muscle] = _muscle_channel(skel, m_idx, times, rng, overshoot_axis=axis)
    return MotionClip(
        clip_id=clip_id,
        source="programmed",
        description=description,
        fps=30.0,
        duration=float(duration),
        skeleton=skel,
        tracks=tracks,
        root_track=_root_channel(times, moving, rng),
    )


def build_sample_library(seed: int = 7) -> MotionLibrary:
    """Deterministic 75-clip library covering every default action."""
    skel = default_ragdoll()
    clips = []
    idx = 0
    for spec in DEFAULT_ACTIONS:
        for description in _DESCRIPTIONS[spec.name]:
            rng = RngStream(seed, idx)
            duration = 5.0 + _KEY_STEP * rng.integers(29)  # 5.00 .. 12.00 s
            slug = spec.name.replace(" ", "_")
            clips.append(_make_clip(
                f"clip_{idx:03d}_{slug}", description, duration,
                spec.name in _MOVING, skel, rng,
            ))
            idx += 1

    # Short clips below the default minimum video length; the duration filter
    # must drop them.
    for description in ("short walk shuffle", "quick wave of the hand"):
        rng = RngStream(seed, idx)
        clips.append(_make_clip(f"clip_{idx:03d}_short", description, 0.5, False, skel, rng))
        idx += 1

    # Energetic clips with one deliberately over-limit channel each.
    energetic = (
        ("wild dive to the floor with flailing", ("left_forearm", 0)),
        ("violent car hit tumble", ("head", 0)),
        ("extreme stagger and fall", ("spine", 2)),
    )
    for description, overshoot in energetic:
        rng = RngStream(seed, idx)
        duration = 5.0 + _KEY_STEP * rng.integers(29)
        clips.append(_make_clip(
            f"clip_{idx:03d}_energetic", description, duration, False, skel, rng,
            overshoot=overshoot,
        ))
        idx += 1

    return MotionLibrary(clips, DEFAULT_ACTIONS)
