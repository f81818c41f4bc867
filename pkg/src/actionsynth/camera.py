"""Spring-rig follow camera: rigid camera body <-spring-> target <-spring-> protagonist.

Each spring has a minimum-distance tolerance zone ({0, 1, 2} m) inside which
it exerts no force, which lets the protagonist drift off-center. Integration
is semi-implicit Euler at a fixed internal rate (default 120 Hz), sampled at
the video frame rate; orientation is a roll-free look-at. A pinhole model
projects world points to pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import kernels
from ._kernels_py import step_once
from .distributions import RngStream

__all__ = [
    "CAMERA_KINDS",
    "SpringParams",
    "RigParams",
    "CameraState",
    "CameraTrajectory",
    "default_rig",
    "sample_rig",
    "initial_state",
    "equilibrium_state",
    "step",
    "mechanical_energy",
    "simulate",
    "camera_basis",
    "project",
    "pixel_ray",
    "bbox_of",
]

CAMERA_KINDS = ("kite", "closeup", "indoors", "static")
WORLD_UP = np.array([0.0, 0.0, 1.0])

# Initial offsets: target sits away from the protagonist, camera away from the
# target, each at (rest + min distance + 0.5) m along a fixed unit direction.
_TARGET_DIR = np.array([-0.6, -0.64, 0.48])
_CAMERA_DIR = np.array([-0.48, -0.36, 0.8])


@dataclass(frozen=True)
class SpringParams:
    stiffness: float      # N/m
    damping: float        # N*s/m
    rest_length: float    # m
    min_distance: float   # m; no force below this separation

    def __post_init__(self):
        if self.stiffness < 0 or self.damping < 0 or self.rest_length < 0:
            raise ValueError("spring parameters must be non-negative")
        if self.min_distance not in (0.0, 1.0, 2.0):
            raise ValueError(f"min distance must be 0, 1 or 2 m, got {self.min_distance}")

    def to_json_obj(self) -> dict:
        return {
            "stiffness": self.stiffness,
            "damping": self.damping,
            "rest_length": self.rest_length,
            "min_distance": self.min_distance,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SpringParams":
        return cls(obj["stiffness"], obj["damping"], obj["rest_length"], obj["min_distance"])


@dataclass(frozen=True)
class RigParams:
    kind: str
    camera_mass: float    # kg
    camera_drag: float    # 1/s
    target_mass: float
    target_drag: float
    cam_target: SpringParams
    target_prot: SpringParams
    impulse: tuple[float, float, float] = (0.0, 0.0, 0.0)  # N*s, applied to the camera at t=0

    def __post_init__(self):
        if self.kind not in CAMERA_KINDS:
            raise ValueError(f"unknown camera kind {self.kind!r}")
        if self.camera_mass <= 0 or self.target_mass <= 0:
            raise ValueError("masses must be positive")
        if self.camera_drag < 0 or self.target_drag < 0:
            raise ValueError("drags must be non-negative")

    def params_vector(self) -> np.ndarray:
        s1, s2 = self.cam_target, self.target_prot
        return np.array([
            self.camera_mass, self.camera_drag, self.target_mass, self.target_drag,
            s1.stiffness, s1.damping, s1.rest_length, s1.min_distance,
            s2.stiffness, s2.damping, s2.rest_length, s2.min_distance,
        ])

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "camera_mass": self.camera_mass,
            "camera_drag": self.camera_drag,
            "target_mass": self.target_mass,
            "target_drag": self.target_drag,
            "cam_target": self.cam_target.to_json_obj(),
            "target_prot": self.target_prot.to_json_obj(),
            "impulse": list(self.impulse),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RigParams":
        return cls(
            kind=obj["kind"],
            camera_mass=obj["camera_mass"],
            camera_drag=obj["camera_drag"],
            target_mass=obj["target_mass"],
            target_drag=obj["target_drag"],
            cam_target=SpringParams.from_json_obj(obj["cam_target"]),
            target_prot=SpringParams.from_json_obj(obj["target_prot"]),
            impulse=tuple(obj["impulse"]),
        )


def default_rig() -> RigParams:
    """Fixed reference rig; rest lengths align with the tolerance zones."""
    return RigParams(
        kind="kite",
        camera_mass=1.0,
        camera_drag=0.5,
        target_mass=0.8,
        target_drag=0.5,
        cam_target=SpringParams(stiffness=20.0, damping=3.0, rest_length=2.0, min_distance=2.0),
        target_prot=SpringParams(stiffness=30.0, damping=4.0, rest_length=1.0, min_distance=1.0),
    )


# Per-kind sampling ranges: (stiffness, damping, mass, drag, cam-target rest,
# target-prot rest, max impulse magnitude). Values are documented defaults.
RIG_RANGES: Mapping[str, dict] = {
    "kite": dict(stiffness=(5.0, 60.0), damping=(0.5, 8.0), mass=(0.5, 4.0),
                 drag=(0.1, 2.0), ct_rest=(1.5, 4.0), tp_rest=(0.8, 2.5), impulse=8.0),
    "closeup": dict(stiffness=(20.0, 60.0), damping=(1.0, 8.0), mass=(0.5, 2.0),
                    drag=(0.3, 2.0), ct_rest=(0.6, 1.5), tp_rest=(0.3, 1.0), impulse=2.0),
    "indoors": dict(stiffness=(10.0, 50.0), damping=(1.0, 8.0), mass=(0.5, 3.0),
                    drag=(0.2, 2.0), ct_rest=(1.0, 2.5), tp_rest=(0.5, 1.5), impulse=3.0),
}


def sample_rig(kind: str, rng: RngStream) -> RigParams:
    """Random rig of the given behavior kind; min distances uniform over {0, 1, 2} m."""
    if kind not in CAMERA_KINDS:
        raise ValueError(f"unknown camera kind {kind!r}")
    if kind == "static":
        # Degenerate configuration: no spring forces, very high drag, camera holds pose.
        d1 = float(rng.integers(3))
        d2 = float(rng.integers(3))
        return RigParams(
            kind="static",
            camera_mass=1.0, camera_drag=50.0,
            target_mass=1.0, target_drag=50.0,
            cam_target=SpringParams(0.0, 0.0, 2.0, d1),
            target_prot=SpringParams(0.0, 0.0, 1.0, d2),
        )
    r = RIG_RANGES[kind]
    camera_mass = rng.uniform(*r["mass"])
    camera_drag = rng.uniform(*r["drag"])
    target_mass = rng.uniform(*r["mass"])
    target_drag = rng.uniform(*r["drag"])
    s1 = SpringParams(
        stiffness=rng.uniform(*r["stiffness"]),
        damping=rng.uniform(*r["damping"]),
        rest_length=rng.uniform(*r["ct_rest"]),
        min_distance=float(rng.integers(3)),
    )
    s2 = SpringParams(
        stiffness=rng.uniform(*r["stiffness"]),
        damping=rng.uniform(*r["damping"]),
        rest_length=rng.uniform(*r["tp_rest"]),
        min_distance=float(rng.integers(3)),
    )
    magnitude = rng.uniform(0.0, r["impulse"])
    z = rng.uniform(-1.0, 1.0)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    s = math.sqrt(max(0.0, 1.0 - z * z))
    impulse = (magnitude * s * math.cos(theta), magnitude * s * math.sin(theta), magnitude * z)
    return RigParams(kind, camera_mass, camera_drag, target_mass, target_drag, s1, s2, impulse)


@dataclass(frozen=True)
class CameraState:
    cam_pos: tuple[float, float, float]
    cam_vel: tuple[float, float, float]
    tgt_pos: tuple[float, float, float]
    tgt_vel: tuple[float, float, float]

    def vector(self) -> np.ndarray:
        return np.array(self.cam_pos + self.cam_vel + self.tgt_pos + self.tgt_vel)

    @classmethod
    def from_vector(cls, v) -> "CameraState":
        v = [float(x) for x in v]
        return cls(tuple(v[0:3]), tuple(v[3:6]), tuple(v[6:9]), tuple(v[9:12]))

    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.vector())))


def initial_state(rig: RigParams, prot_pos) -> CameraState:
    """Deterministic start: bodies placed just outside their tolerance zones, at rest.

    The rig's impulse (N*s) is converted to an initial camera velocity.
    """
    prot = np.asarray(prot_pos, dtype=np.float64)
    s1, s2 = rig.cam_target, rig.target_prot
    tgt = prot + _TARGET_DIR * (s2.rest_length + s2.min_distance + 0.5)
    cam = tgt + _CAMERA_DIR * (s1.rest_length + s1.min_distance + 0.5)
    cam_vel = tuple(np.asarray(rig.impulse) / rig.camera_mass)
    return CameraState(tuple(cam), cam_vel, tuple(tgt), (0.0, 0.0, 0.0))


def _equilibrium_separation(s: SpringParams) -> float:
    # Zero-force separation: the rest length, or strictly inside the zone when
    # the rest length lies within it.
    return s.rest_length if s.rest_length >= s.min_distance else 0.99 * s.min_distance


def equilibrium_state(rig: RigParams, prot_pos) -> CameraState:
    """Force-free start (no transient); the impulse still sets the camera velocity."""
    prot = np.asarray(prot_pos, dtype=np.float64)
    tgt = prot + _TARGET_DIR * _equilibrium_separation(rig.target_prot)
    cam = tgt + _CAMERA_DIR * _equilibrium_separation(rig.cam_target)
    cam_vel = tuple(np.asarray(rig.impulse) / rig.camera_mass)
    return CameraState(tuple(cam), cam_vel, tuple(tgt), (0.0, 0.0, 0.0))


def step(state: CameraState, rig: RigParams, prot_pos, dt: float) -> CameraState:
    """One semi-implicit Euler step; errors on non-finite state."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not state.finite():
        raise ValueError("camera state has non-finite components")
    prot = tuple(float(x) for x in prot_pos)
    new = step_once(tuple(state.vector()), tuple(rig.params_vector()), prot, dt)
    return CameraState.from_vector(new)


def _spring_potential(distance: float, s: SpringParams) -> float:
    # Constant inside the tolerance zone (zero force), Hookean outside.
    d_eff = max(distance, s.min_distance)
    return 0.5 * s.stiffness * (d_eff - s.rest_length) ** 2


def mechanical_energy(state: CameraState, rig: RigParams, prot_pos) -> float:
    """Kinetic plus spring potential energy (J) of the two-body rig."""
    cam = np.asarray(state.cam_pos)
    tgt = np.asarray(state.tgt_pos)
    prot = np.asarray(prot_pos, dtype=np.float64)
    kinetic = 0.5 * rig.camera_mass * float(np.dot(state.cam_vel, state.cam_vel))
    kinetic += 0.5 * rig.target_mass * float(np.dot(state.tgt_vel, state.tgt_vel))
    potential = _spring_potential(float(np.linalg.norm(cam - tgt)), rig.cam_target)
    potential += _spring_potential(float(np.linalg.norm(tgt - prot)), rig.target_prot)
    return kinetic + potential


@dataclass(frozen=True)
class CameraTrajectory:
    positions: np.ndarray   # (frames, 3)
    look_dirs: np.ndarray   # (frames, 3), unit forward vectors
    states: np.ndarray      # (frames, 12) full integrator state at each frame
    fps: float

    @property
    def frame_count(self) -> int:
        return self.positions.shape[0]


def simulate(rig: RigParams, prot_positions, fps: float, duration: float,
             internal_dt: float = 1.0 / 120.0,
             initial: CameraState | None = None) -> CameraTrajectory:
    """Integrate the rig against a per-frame protagonist trajectory.

    The internal step divides the frame interval exactly (substep count is
    rounded from internal_dt); protagonist positions are interpolated
    linearly between frames. Orientation is look-at toward the protagonist.
    """
    prot = np.asarray(prot_positions, dtype=np.float64)
    n_frames = int(round(duration * fps))
    if prot.ndim != 2 or prot.shape[1] != 3:
        raise ValueError("protagonist trajectory must be (frames, 3)")
    if prot.shape[0] < n_frames:
        raise ValueError(
            f"protagonist trajectory covers {prot.shape[0]} frames, need {n_frames}"
        )
    substeps = max(1, int(round((1.0 / fps) / internal_dt)))
    dt = 1.0 / (fps * substeps)
    state0 = initial if initial is not None else initial_state(rig, prot[0])
    if not state0.finite():
        raise ValueError("initial camera state has non-finite components")

    n_steps = max(0, (n_frames - 1) * substeps)
    if n_steps:
        step_times = np.arange(n_steps) * dt * fps  # in frame units
        frame_idx = np.clip(step_times.astype(np.int64), 0, n_frames - 2)
        frac = (step_times - frame_idx)[:, None]
        prot_steps = prot[frame_idx] * (1.0 - frac) + prot[frame_idx + 1] * frac
    else:
        prot_steps = np.zeros((0, 3))

    states = kernels.camera_run(state0.vector(), rig.params_vector(),
                                prot_steps, substeps, dt, max(n_frames, 1))
    positions = states[:, 0:3]
    look = prot[:n_frames] - positions
    norms = np.linalg.norm(look, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    look_dirs = look / norms
    return CameraTrajectory(positions=positions, look_dirs=look_dirs, states=states, fps=fps)


def camera_basis(look_dir) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right/up/forward unit vectors for a roll-free camera looking along look_dir."""
    fwd = np.asarray(look_dir, dtype=np.float64)
    n = np.linalg.norm(fwd)
    if n < 1e-12:
        raise ValueError("look direction is zero")
    fwd = fwd / n
    right = np.cross(fwd, WORLD_UP)
    rn = np.linalg.norm(right)
    if rn < 1e-9:  # looking straight up/down: pick any horizontal right
        right = np.array([1.0, 0.0, 0.0])
        rn = 1.0
    right = right / rn
    up = np.cross(right, fwd)
    return right, up, fwd


def _focal(vfov_deg: float, height: float) -> float:
    if not 0.0 < vfov_deg < 180.0:
        raise ValueError(f"vertical fov must be in (0, 180), got {vfov_deg}")
    return (height / 2.0) / math.tan(math.radians(vfov_deg) / 2.0)


def project(cam_pos, look_dir, vfov_deg: float, resolution: tuple[int, int],
            point) -> tuple[float, float, bool]:
    """Project one world point; returns (px, py, visible). Pixels are NaN when behind."""
    w, h = resolution
    right, up, fwd = camera_basis(look_dir)
    out = kernels.project_points(
        np.asarray(point, dtype=np.float64)[None, :],
        np.asarray(cam_pos, dtype=np.float64),
        right, up, fwd, _focal(vfov_deg, h), w / 2.0, h / 2.0,
    )[0]
    return float(out[0]), float(out[1]), bool(out[2])


def pixel_ray(cam_pos, look_dir, vfov_deg: float, resolution: tuple[int, int],
              px: float, py: float) -> np.ndarray:
    """Unit world direction through a pixel (inverse of project up to depth)."""
    w, h = resolution
    right, up, fwd = camera_basis(look_dir)
    f = _focal(vfov_deg, h)
    d = (px - w / 2.0) / f * right - (py - h / 2.0) / f * up + fwd
    return d / np.linalg.norm(d)


def bbox_of(points, cam_pos, look_dir, vfov_deg: float,
            resolution: tuple[int, int]) -> tuple[float, float, float, float] | None:
    """Min/max pixel box over the visible points, clamped to the image; None if none visible."""
    w, h = resolution
    right, up, fwd = camera_basis(look_dir)
    out = kernels.project_points(
        np.asarray(points, dtype=np.float64),
        np.asarray(cam_pos, dtype=np.float64),
        right, up, fwd, _focal(vfov_deg, h), w / 2.0, h / 2.0,
    )
    vis = out[:, 2] > 0.5
    if not vis.any():
        return None
    xs, ys = out[vis, 0], out[vis, 1]
    return (
        float(np.clip(xs.min(), 0.0, w)),
        float(np.clip(ys.min(), 0.0, h)),
        float(np.clip(xs.max(), 0.0, w)),
        float(np.clip(ys.max(), 0.0, h)),
    )
