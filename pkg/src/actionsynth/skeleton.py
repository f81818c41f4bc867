"""The 15-part humanoid rig: hierarchy, bind pose and per-joint angular limits.

Conventions: world and bind offsets are meters, z up, T-pose bind (arms out
along +/-x, +y forward). Joint rotations are XYZ Euler angles in degrees,
composed as R = Rz @ Ry @ Rx acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["MUSCLES", "RagdollSpec", "default_ragdoll"]

# Canonical muscle order; every muscle collection in the package is kept in
# this order so that sampling is independent of set/hash iteration order.
MUSCLES: tuple[str, ...] = (
    "pelvis",
    "spine",
    "head",
    "left_upper_arm",
    "left_forearm",
    "left_hand",
    "right_upper_arm",
    "right_forearm",
    "right_hand",
    "left_thigh",
    "left_calf",
    "left_foot",
    "right_thigh",
    "right_calf",
    "right_foot",
)

_PARENTS: tuple[int, ...] = (-1, 0, 1, 1, 3, 4, 1, 6, 7, 0, 9, 10, 0, 12, 13)

_BIND_OFFSETS: tuple[tuple[float, float, float], ...] = (
    (0.00, 0.00, 0.00),   # pelvis (root; standing height comes from the root track)
    (0.00, 0.00, 0.22),   # spine
    (0.00, 0.00, 0.40),   # head
    (0.20, 0.00, 0.32),   # left_upper_arm
    (0.28, 0.00, 0.00),   # left_forearm
    (0.25, 0.00, 0.00),   # left_hand
    (-0.20, 0.00, 0.32),  # right_upper_arm
    (-0.28, 0.00, 0.00),  # right_forearm
    (-0.25, 0.00, 0.00),  # right_hand
    (0.10, 0.00, -0.03),  # left_thigh
    (0.00, 0.00, -0.45),  # left_calf
    (0.00, 0.00, -0.45),  # left_foot
    (-0.10, 0.00, -0.03), # right_thigh
    (0.00, 0.00, -0.45),  # right_calf
    (0.00, 0.00, -0.45),  # right_foot
)

# (min, max) degrees per Euler axis (x, y, z).
_LIMITS: tuple[tuple[tuple[float, float], ...], ...] = (
    ((-180, 180), (-180, 180), (-180, 180)),  # pelvis
    ((-45, 45), (-40, 40), (-30, 30)),        # spine
    ((-60, 60), (-75, 75), (-45, 45)),        # head
    ((-150, 150), (-100, 100), (-90, 90)),    # left_upper_arm
    ((0, 150), (-45, 45), (-45, 45)),         # left_forearm
    ((-60, 60), (-30, 30), (-80, 80)),        # left_hand
    ((-150, 150), (-100, 100), (-90, 90)),    # right_upper_arm
    ((0, 150), (-45, 45), (-45, 45)),         # right_forearm
    ((-60, 60), (-30, 30), (-80, 80)),        # right_hand
    ((-120, 120), (-60, 60), (-60, 60)),      # left_thigh
    ((-150, 10), (-20, 20), (-20, 20)),       # left_calf
    ((-45, 45), (-25, 25), (-25, 25)),        # left_foot
    ((-120, 120), (-60, 60), (-60, 60)),      # right_thigh
    ((-150, 10), (-20, 20), (-20, 20)),       # right_calf
    ((-45, 45), (-25, 25), (-25, 25)),        # right_foot
)


@dataclass(frozen=True)
class RagdollSpec:
    """Rig description: names, tree, bind offsets (m), angular limits (deg), strength."""

    muscles: tuple[str, ...] = MUSCLES
    parents: tuple[int, ...] = _PARENTS
    bind_offsets: tuple[tuple[float, float, float], ...] = _BIND_OFFSETS
    limits: tuple[tuple[tuple[float, float], ...], ...] = _LIMITS
    strength: tuple[float, ...] = field(default_factory=lambda: (1.0,) * 15)

    def __post_init__(self):
        n = len(self.muscles)
        if n != 15:
            raise ValueError(f"rig needs exactly 15 muscles, got {n}")
        if len(set(self.muscles)) != n:
            raise ValueError("duplicate muscle names")
        if len(self.parents) != n or len(self.bind_offsets) != n or len(self.limits) != n:
            raise ValueError("parents/bind_offsets/limits must have one entry per muscle")
        if self.parents[0] != -1:
            raise ValueError("first muscle must be the root (parent -1)")
        for i, p in enumerate(self.parents[1:], start=1):
            if not 0 <= p < i:
                raise ValueError(f"muscle {self.muscles[i]!r}: parent index {p} must precede it")
        for name, axes in zip(self.muscles, self.limits):
            if len(axes) != 3:
                raise ValueError(f"muscle {name!r}: limits need 3 axes")
            for lo, hi in axes:
                if lo > hi:
                    raise ValueError(f"muscle {name!r}: limit min {lo} > max {hi}")
        if len(self.strength) != n or any(not 0.0 <= s <= 1.0 for s in self.strength):
            raise ValueError("strength needs one value in [0, 1] per muscle")

    def index(self, muscle: str) -> int:
        try:
            return self.muscles.index(muscle)
        except ValueError:
            raise KeyError(f"unknown muscle {muscle!r}") from None

    def parents_array(self) -> np.ndarray:
        return np.asarray(self.parents, dtype=np.int64)

    def offsets_array(self) -> np.ndarray:
        return np.asarray(self.bind_offsets, dtype=np.float64)

    def limits_array(self) -> np.ndarray:
        """Shape (15, 3, 2): per muscle, per axis, (min, max) degrees."""
        return np.asarray(self.limits, dtype=np.float64)

    def to_json_obj(self) -> dict:
        return {
            "muscles": list(self.muscles),
            "parents": list(self.parents),
            "bind_offsets": [list(o) for o in self.bind_offsets],
            "limits": [[list(ax) for ax in m] for m in self.limits],
            "strength": list(self.strength),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RagdollSpec":
        return cls(
            muscles=tuple(obj["muscles"]),
            parents=tuple(int(p) for p in obj["parents"]),
            bind_offsets=tuple(tuple(float(v) for v in o) for o in obj["bind_offsets"]),
            limits=tuple(
                tuple(tuple(float(v) for v in ax) for ax in m) for m in obj["limits"]
            ),
            strength=tuple(float(s) for s in obj["strength"]),
        )


def default_ragdoll() -> RagdollSpec:
    return RagdollSpec()


def canonical_muscle_order(names) -> tuple[str, ...]:
    """Sort a muscle collection into the canonical rig order (deterministic)."""
    names = tuple(names)
    order = {m: i for i, m in enumerate(MUSCLES)}
    for n in names:
        if n not in order:
            raise KeyError(f"unknown muscle {n!r}")
    return tuple(sorted(names, key=order.__getitem__))
