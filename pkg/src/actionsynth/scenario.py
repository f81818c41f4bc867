"""Ancestral sampling of complete action-video scenarios.

A scenario is drawn in three stages: world time and weather, the human model,
then the scene (action, environment, camera, base motion, duration, variation
and placements), each conditioned exactly as the factorization prescribes:
day phase and weather are free, clock time depends on the phase, environment
depends on the action, camera depends on action and environment, base motion
depends on the action (filtered by minimum duration), duration depends on the
chosen motion's length, and variation parameters depend on the variation mode.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .actions import ACTION_NAMES
from .camera import RigParams, sample_rig
from .distributions import (
    CategoricalWeights,
    RngStream,
    TriangularParams,
    bernoulli_sample,
    categorical_sample,
    triangular_sample,
)
from .motions import MotionLibrary, admissible_motions
from .ragdoll import VariationPlan, VariationRanges, plan_variation

__all__ = [
    "WEATHERS",
    "DAY_PHASES",
    "ENVIRONMENT_NAMES",
    "ScenarioError",
    "EnvironmentLayout",
    "GeneratorParams",
    "WeatherFlags",
    "SunState",
    "WorldState",
    "ScenePlacement",
    "ScenarioDescriptor",
    "default_params",
    "load_params",
    "save_params",
    "sample_world",
    "sample_scene",
    "sample_scenario",
    "validate_params",
]

WEATHERS = ("clear", "overcast", "rain", "fog")
DAY_PHASES = ("dawn", "day", "dusk", "night")
CAMERA_KIND_ORDER = ("kite", "closeup", "indoors", "static")
ENVIRONMENT_NAMES = ("urban", "stadium", "middle", "green", "house", "lake", "simple")
VARIATION_ORDER = ("none", "perturbation", "weakening", "objects", "blending")

_CLOCK_TIMES = {
    "dawn": TriangularParams(7.0, 10.0, 9.0),
    "day": TriangularParams(10.0, 16.0, 13.0),
    "dusk": TriangularParams(17.0, 20.0, 18.0),
    # Not part of the published configuration (night weight is 0); hours past
    # 24 represent the wrap past midnight.
    "night": TriangularParams(21.0, 27.0, 24.0),
}

_SUN_BRIGHTNESS = {"dawn": (0.25, 0.55), "day": (0.7, 1.0), "dusk": (0.25, 0.55), "night": (0.0, 0.08)}
_SUN_ELEVATION = {"dawn": (2.0, 18.0), "day": (30.0, 70.0), "dusk": (2.0, 18.0), "night": (-30.0, -5.0)}


class ScenarioError(RuntimeError):
    """A single scenario draw failed (e.g. no admissible motion for the action)."""


@dataclass(frozen=True)
class EnvironmentLayout:
    """Waypoint graphs for one world region: protagonist nodes plus an optional
    background-actor graph (absent for indoor regions)."""

    name: str
    indoor: bool
    protagonist_waypoints: tuple[tuple[float, float, float], ...]
    adjacency: tuple[tuple[int, int], ...]
    background_waypoints: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        n = len(self.protagonist_waypoints)
        if n == 0:
            raise ValueError(f"environment {self.name!r}: needs at least one waypoint")
        for i, j in self.adjacency:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"environment {self.name!r}: adjacency index out of range")
        if self.indoor and self.background_waypoints:
            raise ValueError(f"environment {self.name!r}: indoor regions carry no background graph")

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "indoor": self.indoor,
            "protagonist_waypoints": [list(p) for p in self.protagonist_waypoints],
            "adjacency": [list(e) for e in self.adjacency],
            "background_waypoints": [list(p) for p in self.background_waypoints],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EnvironmentLayout":
        return cls(
            name=obj["name"],
            indoor=bool(obj["indoor"]),
            protagonist_waypoints=tuple(tuple(float(v) for v in p) for p in obj["protagonist_waypoints"]),
            adjacency=tuple(tuple(int(v) for v in e) for e in obj["adjacency"]),
            background_waypoints=tuple(tuple(float(v) for v in p) for p in obj.get("background_waypoints", [])),
        )


def _ring(n: int, radius: float) -> tuple[tuple[float, float, float], ...]:
    pts = []
    for i in range(n):
        a = 2.0 * math.pi * i / n
        pts.append((round(radius * math.cos(a), 3), round(radius * math.sin(a), 3), 0.0))
    return tuple(pts)


def _ring_edges(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, (i + 1) % n) for i in range(n))


def _grid(nx: int, ny: int, spacing: float) -> tuple[tuple[float, float, float], ...]:
    return tuple(
        (x * spacing, y * spacing, 0.0) for y in range(ny) for x in range(nx)
    )


def _grid_edges(nx: int, ny: int) -> tuple[tuple[int, int], ...]:
    edges = []
    for y in range(ny):
        for x in range(nx):
            i = y * nx + x
            if x + 1 < nx:
                edges.append((i, i + 1))
            if y + 1 < ny:
                edges.append((i, i + nx))
    return tuple(edges)


def default_environments() -> tuple[EnvironmentLayout, ...]:
    return (
        EnvironmentLayout("urban", False, _grid(4, 3, 8.0), _grid_edges(4, 3), _ring(10, 20.0)),
        EnvironmentLayout("stadium", False, _ring(8, 15.0), _ring_edges(8), _ring(8, 24.0)),
        EnvironmentLayout("middle", False, _grid(3, 3, 6.0), _grid_edges(3, 3), _ring(6, 16.0)),
        EnvironmentLayout("green", False, _ring(8, 12.0), _ring_edges(8), _ring(8, 18.0)),
        EnvironmentLayout("house", True, _ring(5, 2.5), _ring_edges(5)),
        EnvironmentLayout("lake", False, _ring(6, 10.0), _ring_edges(6), _ring(6, 15.0)),
        EnvironmentLayout("simple", False, _grid(2, 2, 5.0), _grid_edges(2, 2), _ring(4, 10.0)),
    )


@dataclass(frozen=True)
class GeneratorParams:
    """The full parameter set driving scenario sampling.

    Weight tables follow the listed domain orders; conditional tables are
    (action x environment) weights, (action x camera) and (camera x
    environment) binary availabilities.
    """

    actions: tuple[str, ...]
    action_weights: tuple[float, ...]
    human_models: tuple[str, ...]
    human_weights: tuple[float, ...]
    weathers: tuple[str, ...]
    weather_weights: tuple[float, ...]
    day_phases: tuple[str, ...]
    day_phase_weights: tuple[float, ...]
    variation_modes: tuple[str, ...]
    variation_weights: tuple[float, ...]
    camera_kinds: tuple[str, ...]
    camera_weights: tuple[float, ...]
    action_environment_weights: tuple[tuple[float, ...], ...]
    action_camera_allowed: tuple[tuple[int, ...], ...]
    camera_environment_allowed: tuple[tuple[int, ...], ...]
    environments: tuple[EnvironmentLayout, ...]
    clock_time_by_phase: Mapping[str, TriangularParams] = field(
        default_factory=lambda: dict(_CLOCK_TIMES)
    )
    min_duration: float = 1.0
    max_duration: float = 10.0
    mode_duration: float = 5.0
    fps: float = 30.0
    resolution: tuple[int, int] = (340, 256)
    camera_vfov_deg: float = 60.0
    variation_ranges: VariationRanges = field(default_factory=VariationRanges)

    @property
    def environment_names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.environments)

    def environment(self, name: str) -> EnvironmentLayout:
        for layout in self.environments:
            if layout.name == name:
                return layout
        raise KeyError(f"unknown environment {name!r}")

    def to_json_obj(self) -> dict:
        return {
            "actions": list(self.actions),
            "action_weights": list(self.action_weights),
            "human_models": list(self.human_models),
            "human_weights": list(self.human_weights),
            "weathers": list(self.weathers),
            "weather_weights": list(self.weather_weights),
            "day_phases": list(self.day_phases),
            "day_phase_weights": list(self.day_phase_weights),
            "variation_modes": list(self.variation_modes),
            "variation_weights": list(self.variation_weights),
            "camera_kinds": list(self.camera_kinds),
            "camera_weights": list(self.camera_weights),
            "action_environment_weights": [list(r) for r in self.action_environment_weights],
            "action_camera_allowed": [list(r) for r in self.action_camera_allowed],
            "camera_environment_allowed": [list(r) for r in self.camera_environment_allowed],
            "environments": [e.to_json_obj() for e in self.environments],
            "clock_time_by_phase": {
                p: [t.lower, t.upper, t.mode] for p, t in self.clock_time_by_phase.items()
            },
            "min_duration": self.min_duration,
            "max_duration": self.max_duration,
            "mode_duration": self.mode_duration,
            "fps": self.fps,
            "resolution": list(self.resolution),
            "camera_vfov_deg": self.camera_vfov_deg,
            "variation_ranges": self.variation_ranges.to_json_obj(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GeneratorParams":
        return cls(
            actions=tuple(obj["actions"]),
            action_weights=tuple(float(w) for w in obj["action_weights"]),
            human_models=tuple(obj["human_models"]),
            human_weights=tuple(float(w) for w in obj["human_weights"]),
            weathers=tuple(obj["weathers"]),
            weather_weights=tuple(float(w) for w in obj["weather_weights"]),
            day_phases=tuple(obj["day_phases"]),
            day_phase_weights=tuple(float(w) for w in obj["day_phase_weights"]),
            variation_modes=tuple(obj["variation_modes"]),
            variation_weights=tuple(float(w) for w in obj["variation_weights"]),
            camera_kinds=tuple(obj["camera_kinds"]),
            camera_weights=tuple(float(w) for w in obj["camera_weights"]),
            action_environment_weights=tuple(
                tuple(float(w) for w in row) for row in obj["action_environment_weights"]
            ),
            action_camera_allowed=tuple(
                tuple(int(v) for v in row) for row in obj["action_camera_allowed"]
            ),
            camera_environment_allowed=tuple(
                tuple(int(v) for v in row) for row in obj["camera_environment_allowed"]
            ),
            environments=tuple(EnvironmentLayout.from_json_obj(e) for e in obj["environments"]),
            clock_time_by_phase={
                p: TriangularParams(v[0], v[1], v[2])
                for p, v in obj["clock_time_by_phase"].items()
            },
            min_duration=float(obj["min_duration"]),
            max_duration=float(obj["max_duration"]),
            mode_duration=float(obj["mode_duration"]),
            fps=float(obj["fps"]),
            resolution=tuple(int(v) for v in obj["resolution"]),
            camera_vfov_deg=float(obj.get("camera_vfov_deg", 60.0)),
            variation_ranges=VariationRanges.from_json_obj(obj["variation_ranges"]),
        )


def default_params() -> GeneratorParams:
    """Published configuration: uniform tables subject to the hard constraints.

    Night and the "static" camera stay in their domains with weight 0; the
    "simple" environment ships disabled (weight 0 in every action row).
    """
    n_actions = len(ACTION_NAMES)
    env_row = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0)  # simple disabled
    camera_rows = []
    for name in ACTION_NAMES:
        if name == "brush hair":
            camera_rows.append((1, 1, 0, 1))  # kite + closeup only
        else:
            camera_rows.append((1, 0, 1, 1))  # closeup reserved for brush hair
    camera_env = (
        tuple(1 for _ in ENVIRONMENT_NAMES),                      # kite
        tuple(1 for _ in ENVIRONMENT_NAMES),                      # closeup
        tuple(1 if e == "house" else 0 for e in ENVIRONMENT_NAMES),  # indoors
        tuple(1 for _ in ENVIRONMENT_NAMES),                      # static
    )
    return GeneratorParams(
        actions=ACTION_NAMES,
        action_weights=(1.0,) * n_actions,
        human_models=tuple(f"model_{i:02d}" for i in range(1, 21)),
        human_weights=(1.0,) * 20,
        weathers=WEATHERS,
        weather_weights=(0.25, 0.25, 0.25, 0.25),
        day_phases=DAY_PHASES,
        day_phase_weights=(1.0, 1.0, 1.0, 0.0),
        variation_modes=VARIATION_ORDER,
        variation_weights=(1.0,) * 5,
        camera_kinds=CAMERA_KIND_ORDER,
        camera_weights=(1.0, 1.0, 1.0, 0.0),
        action_environment_weights=tuple(env_row for _ in range(n_actions)),
        action_camera_allowed=tuple(camera_rows),
        camera_environment_allowed=camera_env,
        environments=default_environments(),
    )


def load_params(path: str | Path) -> GeneratorParams:
    return GeneratorParams.from_json_obj(json.loads(Path(path).read_text()))


def save_params(params: GeneratorParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params.to_json_obj(), indent=1))


@dataclass(frozen=True)
class WeatherFlags:
    fog_visible: bool
    clouds: bool
    rain_particles: bool
    wet_ground: bool


@dataclass(frozen=True)
class SunState:
    brightness: float
    heading_deg: float
    elevation_deg: float


@dataclass(frozen=True)
class WorldState:
    day_phase: str
    clock_time: float
    weather: str
    flags: WeatherFlags
    sun: SunState


def sample_world(params: GeneratorParams, rng: RngStream) -> WorldState:
    """Draw day phase, phase-conditioned clock time, weather and weather elements.

    Weather flags cascade parent-first: fog visibility and rain particles
    follow directly from the weather, then clouds and wet ground are forced
    where the weather implies them and drawn Bernoulli(0.5) otherwise.
    """
    phase = params.day_phases[categorical_sample(CategoricalWeights(params.day_phase_weights), rng)]
    clock = triangular_sample(params.clock_time_by_phase[phase], rng)
    weather = params.weathers[categorical_sample(CategoricalWeights(params.weather_weights), rng)]

    fog_visible = weather == "fog"
    rain_particles = weather == "rain"
    if weather in ("overcast", "rain"):
        clouds = True
    else:
        clouds = bernoulli_sample(0.5, rng)
    if rain_particles:
        wet_ground = True
    elif fog_visible:
        wet_ground = bernoulli_sample(0.5, rng)
    else:
        wet_ground = False

    sun = SunState(
        brightness=rng.uniform(*_SUN_BRIGHTNESS[phase]),
        heading_deg=rng.uniform(0.0, 360.0),
        elevation_deg=rng.uniform(*_SUN_ELEVATION[phase]),
    )
    return WorldState(phase, clock, weather, WeatherFlags(fog_visible, clouds, rain_particles, wet_ground), sun)


@dataclass(frozen=True)
class ScenePlacement:
    waypoint_index: int
    position: tuple[float, float, float]
    heading_deg: float
    supporting_positions: tuple[tuple[float, float, float], ...]
    background_routes: tuple[tuple[int, int], ...]  # (start, destination) node indices


@dataclass(frozen=True)
class SceneSample:
    action: str
    environment: str
    camera_kind: str
    motion_id: str
    motion_duration: float
    duration: float
    variation_mode: str
    plan: VariationPlan
    placement: ScenePlacement
    rig: RigParams
    supporting_actors: int


def _sample_duration(params: GeneratorParams, motion_duration: float, rng: RngStream) -> float:
    upper = min(motion_duration, params.max_duration)
    mode = min(params.mode_duration, motion_duration)
    if upper - params.min_duration < 1e-9:
        return params.min_duration  # point-mass support; see TriangularParams
    return triangular_sample(TriangularParams(params.min_duration, upper, mode), rng)


def sample_scene(params: GeneratorParams, world: WorldState, library: MotionLibrary,
                 rng: RngStream, action: str | None = None) -> SceneSample:
    """Draw the scene fragment conditioned on the world: action, environment,
    camera, motion, duration, variation and placements."""
    if action is None:
        a_idx = categorical_sample(CategoricalWeights(params.action_weights), rng)
    else:
        try:
            a_idx = params.actions.index(action)
        except ValueError:
            raise ScenarioError(f"unknown action {action!r}") from None
    name = params.actions[a_idx]
    try:
        spec = library.action(name)
    except KeyError:
        raise ScenarioError(f"library has no action spec for {name!r}") from None

    e_idx = categorical_sample(CategoricalWeights(params.action_environment_weights[a_idx]), rng)
    env = params.environment_names[e_idx]
    layout = params.environments[e_idx]

    cam_weights = [
        params.camera_weights[c]
        * params.action_camera_allowed[a_idx][c]
        * params.camera_environment_allowed[c][e_idx]
        for c in range(len(params.camera_kinds))
    ]
    try:
        c_idx = categorical_sample(CategoricalWeights(cam_weights), rng)
    except ValueError:
        raise ScenarioError(
            f"no camera available for action {name!r} in environment {env!r}"
        ) from None
    camera_kind = params.camera_kinds[c_idx]

    admissible = admissible_motions(spec, library, params.min_duration)
    if not admissible:
        raise ScenarioError(
            f"action {name!r} has no admissible motion of at least {params.min_duration}s"
        )
    clip_ids = [c.clip_id for c in library.clips if c.clip_id in admissible]
    motion_id = clip_ids[rng.integers(len(clip_ids))]
    motion_duration = library.clip(motion_id).duration

    duration = _sample_duration(params, motion_duration, rng)

    variation_weights = list(params.variation_weights)
    if spec.object_protocol is None:
        # Objects variation is undefined for actions without an object protocol.
        variation_weights[params.variation_modes.index("objects")] = 0.0
    try:
        v_idx = categorical_sample(CategoricalWeights(variation_weights), rng)
    except ValueError:
        raise ScenarioError(f"no variation mode available for action {name!r}") from None
    mode = params.variation_modes[v_idx]
    plan = plan_variation(spec, mode, library, rng, params.variation_ranges)

    wp_idx = rng.integers(len(layout.protagonist_waypoints))
    position = layout.protagonist_waypoints[wp_idx]
    heading = rng.uniform(0.0, 360.0)
    supporting = []
    for _ in range(spec.supporting_actors):
        radius = rng.uniform(0.8, 1.6)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        supporting.append((
            position[0] + radius * math.cos(angle),
            position[1] + radius * math.sin(angle),
            position[2],
        ))
    routes = []
    if layout.background_waypoints:
        n_bg = len(layout.background_waypoints)
        for _ in range(rng.integers(5)):  # 0..4 background actors
            start = rng.integers(n_bg)
            others = [i for i in range(n_bg) if i != start]
            routes.append((start, others[rng.integers(len(others))]))

    rig = sample_rig(camera_kind, rng)

    return SceneSample(
        action=name,
        environment=env,
        camera_kind=camera_kind,
        motion_id=motion_id,
        motion_duration=motion_duration,
        duration=duration,
        variation_mode=mode,
        plan=plan,
        placement=ScenePlacement(
            waypoint_index=wp_idx,
            position=position,
            heading_deg=heading,
            supporting_positions=tuple(supporting),
            background_routes=tuple(routes),
        ),
        rig=rig,
        supporting_actors=spec.supporting_actors,
    )


@dataclass(frozen=True)
class ScenarioDescriptor:
    seed: int
    world: WorldState
    human_model: str
    scene: SceneSample

    # Convenience accessors for the frequently audited fields.
    @property
    def action(self) -> str:
        return self.scene.action

    @property
    def duration(self) -> float:
        return self.scene.duration


def sample_scenario(params: GeneratorParams, library: MotionLibrary, seed: int,
                    action: str | None = None) -> ScenarioDescriptor:
    """Fully deterministic scenario draw for (params, library, seed)."""
    rng = RngStream(seed)
    world = sample_world(params, rng)
    human = params.human_models[categorical_sample(CategoricalWeights(params.human_weights), rng)]
    scene = sample_scene(params, world, library, rng, action=action)
    return ScenarioDescriptor(seed=int(seed), world=world, human_model=human, scene=scene)


def _degenerate(name: str, weights) -> bool:
    return not any(w > 0.0 for w in weights)


def validate_params(params: GeneratorParams, library: MotionLibrary | None = None) -> list[str]:
    """Return human-readable findings; an empty list means the config is usable."""
    findings: list[str] = []

    def check_lengths(label, names, weights):
        if len(names) != len(weights):
            findings.append(f"{label}: {len(weights)} weights for {len(names)} values")

    check_lengths("actions", params.actions, params.action_weights)
    check_lengths("human models", params.human_models, params.human_weights)
    check_lengths("weathers", params.weathers, params.weather_weights)
    check_lengths("day phases", params.day_phases, params.day_phase_weights)
    check_lengths("variation modes", params.variation_modes, params.variation_weights)
    check_lengths("camera kinds", params.camera_kinds, params.camera_weights)

    for label, weights in (
        ("action weights", params.action_weights),
        ("human model weights", params.human_weights),
        ("weather weights", params.weather_weights),
        ("day phase weights", params.day_phase_weights),
        ("variation weights", params.variation_weights),
        ("camera weights", params.camera_weights),
    ):
        if any(w < 0 or not math.isfinite(w) for w in weights):
            findings.append(f"{label} contain negative or non-finite entries")
        elif _degenerate(label, weights):
            findings.append(f"{label} degenerate (all zero)")

    if not 0 < params.min_duration < params.max_duration:
        findings.append("durations: need 0 < min < max")
    if not params.min_duration <= params.mode_duration <= params.max_duration:
        findings.append("durations: mode must lie in [min, max]")
    if params.fps <= 0:
        findings.append("fps must be positive")
    if any(v <= 0 for v in params.resolution):
        findings.append("resolution must be positive")

    n_env = len(params.environments)
    names = params.environment_names
    if len(set(names)) != n_env:
        findings.append("duplicate environment names")
    if len(params.action_environment_weights) != len(params.actions):
        findings.append("action-environment table: row count mismatch")
    if len(params.action_camera_allowed) != len(params.actions):
        findings.append("action-camera table: row count mismatch")
    if len(params.camera_environment_allowed) != len(params.camera_kinds):
        findings.append("camera-environment table: row count mismatch")

    for phase, weight in zip(params.day_phases, params.day_phase_weights):
        if weight > 0 and phase not in params.clock_time_by_phase:
            findings.append(f"day phase {phase!r} has no clock-time distribution")

    if findings:
        return findings  # shape problems make the per-action checks unreliable

    lib_actions = set(library.action_names()) if library is not None else None
    for a_idx, (name, weight) in enumerate(zip(params.actions, params.action_weights)):
        if weight <= 0:
            continue
        env_row = params.action_environment_weights[a_idx]
        if len(env_row) != n_env or not any(w > 0 for w in env_row):
            findings.append(f"action {name!r}: no environment available")
            continue
        reachable = False
        for e_idx, env_w in enumerate(env_row):
            if env_w <= 0:
                continue
            for c_idx, cam_w in enumerate(params.camera_weights):
                if (cam_w > 0
                        and params.action_camera_allowed[a_idx][c_idx]
                        and params.camera_environment_allowed[c_idx][e_idx]):
                    reachable = True
                    break
            if reachable:
                break
        if not reachable:
            findings.append(f"action {name!r}: no compatible camera/environment pair")
        if lib_actions is not None:
            if name not in lib_actions:
                findings.append(f"action {name!r}: missing from the motion library")
            else:
                spec = library.action(name)
                if not admissible_motions(spec, library, params.min_duration):
                    findings.append(
                        f"action {name!r}: no admissible motion of at least {params.min_duration}s"
                    )
    return findings
