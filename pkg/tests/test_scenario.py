import dataclasses
import hashlib
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from actionsynth.distributions import RngStream, TriangularParams, triangular_cdf
from actionsynth.motions import ActionSpec, MotionLibrary
from actionsynth.scenario import (
    ScenarioError,
    load_params,
    sample_scenario,
    sample_scene,
    sample_world,
    save_params,
    validate_params,
)

# Digest of one full descriptor under the shipped defaults; replaying the same
# seed must reproduce it exactly, including across process restarts.
FROZEN_DESCRIPTOR_SHA = "3fee228c95aa46cd1d17fcb231dfb2bea1e33eff7b67b9c41a4ba9d83a1a44f9"
FROZEN_SEED = 20240817


class TestSampleWorld:
    def test_dawn_times_inside_support(self, params):
        rng = RngStream(31)
        forced = dataclasses.replace(params, day_phase_weights=(1.0, 0.0, 0.0, 0.0))
        for _ in range(500):
            world = sample_world(forced, rng)
            assert world.day_phase == "dawn"
            assert 7.0 <= world.clock_time <= 10.0

    def test_all_phase_times_inside_their_support(self, params):
        rng = RngStream(32)
        for _ in range(3000):
            world = sample_world(params, rng)
            tri = params.clock_time_by_phase[world.day_phase]
            assert tri.lower <= world.clock_time <= tri.upper

    def test_day_phase_frequencies(self, params):
        rng = RngStream(33)
        counts = Counter(sample_world(params, rng).day_phase for _ in range(10000))
        assert counts["night"] == 0
        for phase in ("dawn", "day", "dusk"):
            assert counts[phase] / 10000 == pytest.approx(1 / 3, abs=0.02)

    def test_weather_frequencies(self, params):
        rng = RngStream(34)
        counts = Counter(sample_world(params, rng).weather for _ in range(10000))
        for weather in params.weathers:
            assert counts[weather] / 10000 == pytest.approx(0.25, abs=0.02)

    def test_clear_weather_never_rains(self, params):
        rng = RngStream(35)
        for _ in range(2000):
            world = sample_world(params, rng)
            if world.weather == "clear":
                assert not world.flags.rain_particles
            if world.weather == "rain":
                assert world.flags.rain_particles and world.flags.clouds
            if world.weather == "fog":
                assert world.flags.fog_visible

    def test_dawn_histogram_mode_near_nine(self, params):
        rng = RngStream(36)
        times = [
            w.clock_time for w in (sample_world(params, rng) for _ in range(10000))
            if w.day_phase == "dawn"
        ]
        hist, edges = np.histogram(times, bins=12, range=(7.0, 10.0))
        center = edges[np.argmax(hist)] + (edges[1] - edges[0]) / 2
        assert 8.5 <= center <= 9.5

    def test_dawn_kolmogorov_smirnov(self, params):
        rng = RngStream(37)
        times = [
            w.clock_time for w in (sample_world(params, rng) for _ in range(10000))
            if w.day_phase == "dawn"
        ]
        tri = TriangularParams(7.0, 10.0, 9.0)
        cdf = lambda v: np.array([triangular_cdf(tri, x) for x in np.atleast_1d(v)])
        assert stats.kstest(times, cdf).pvalue > 0.01


class TestSampleScene:
    def test_brush_hair_cameras(self, params, library):
        rng = RngStream(41)
        world = sample_world(params, rng)
        seen = set()
        for i in range(400):
            scene = sample_scene(params, world, library, RngStream(42, i), action="brush hair")
            seen.add(scene.camera_kind)
            assert scene.camera_kind in ("kite", "closeup")
        assert seen == {"kite", "closeup"}

    def test_indoors_camera_only_in_house(self, params, library):
        rng = RngStream(43)
        world = sample_world(params, rng)
        hit = 0
        for i in range(600):
            scene = sample_scene(params, world, library, RngStream(44, i))
            if scene.camera_kind == "indoors":
                hit += 1
                assert scene.environment == "house"
        assert hit > 0

    def test_duration_capped_by_motion_length(self, params, library):
        # A 3 s walk clip under (min, max, mode) = (1, 10, 5): the duration law
        # becomes a triangular on [1, 3] with its peak at 3, so every draw <= 3.
        from actionsynth.motions import Channel, MotionClip
        from actionsynth.skeleton import default_ragdoll

        skel = default_ragdoll()
        channel = Channel((0.0, 3.0), ((0.0, 0.0, 0.0), (10.0, 0.0, 0.0)))
        clip3 = MotionClip("walk3s", "programmed", "walk forward test", 30.0, 3.0,
                           skel, {m: channel for m in skel.muscles}, channel)
        stub = MotionLibrary([clip3], library.actions)
        world = sample_world(params, RngStream(45))
        draws = []
        for i in range(300):
            scene = sample_scene(params, world, stub, RngStream(46, i), action="walk")
            assert scene.motion_duration == 3.0
            assert scene.duration <= 3.0 + 1e-9
            draws.append(scene.duration)
        assert max(draws) > 2.0  # the peak of Tr(1, 3, 3) sits at the cap

    def test_no_admissible_motion_names_action(self, params, library):
        long_min = dataclasses.replace(params, min_duration=50.0, mode_duration=50.0,
                                       max_duration=60.0)
        world = sample_world(long_min, RngStream(47))
        with pytest.raises(ScenarioError, match="golf"):
            sample_scene(long_min, world, library, RngStream(48), action="golf")

    def test_objects_mode_never_drawn_without_protocol(self, params, library):
        world = sample_world(params, RngStream(49))
        for i in range(300):
            scene = sample_scene(params, world, library, RngStream(50, i), action="clap")
            assert scene.variation_mode != "objects"

    def test_background_routes_absent_indoors(self, params, library):
        world = sample_world(params, RngStream(51))
        for i in range(400):
            scene = sample_scene(params, world, library, RngStream(52, i))
            layout = params.environment(scene.environment)
            if layout.indoor:
                assert scene.placement.background_routes == ()
            for start, dest in scene.placement.background_routes:
                assert start != dest
                assert 0 <= start < len(layout.background_waypoints)
                assert 0 <= dest < len(layout.background_waypoints)

    def test_protagonist_position_is_a_waypoint(self, params, library):
        world = sample_world(params, RngStream(53))
        for i in range(200):
            scene = sample_scene(params, world, library, RngStream(54, i))
            layout = params.environment(scene.environment)
            assert scene.placement.position == layout.protagonist_waypoints[scene.placement.waypoint_index]


class TestSampleScenario:
    def test_same_seed_identical_descriptor(self, params, library):
        a = sample_scenario(params, library, 12345)
        b = sample_scenario(params, library, 12345)
        assert a == b

    def test_frozen_digest_replays_across_restarts(self, params, library):
        descriptor = sample_scenario(params, library, FROZEN_SEED)
        digest = hashlib.sha256(repr(descriptor).encode()).hexdigest()
        assert digest == FROZEN_DESCRIPTOR_SHA

    def test_two_people_action_places_one_supporting_actor(self, params, library):
        for i in range(50):
            d = sample_scenario(params, library, 1000 + i, action="walking hug")
            assert len(d.scene.placement.supporting_positions) == 1
            d2 = sample_scenario(params, library, 2000 + i, action="walk")
            assert d2.scene.placement.supporting_positions == ()

    def test_duration_bounds_universal(self, params, library):
        for i in range(300):
            d = sample_scenario(params, library, 3000 + i)
            limit = min(d.scene.motion_duration, params.max_duration)
            assert params.min_duration - 1e-9 <= d.duration <= limit + 1e-9

    def test_uniform_actions_chi_square(self, params, library):
        counts = Counter(
            sample_scenario(params, library, 50000 + i).action for i in range(3500)
        )
        assert len(counts) == 35
        observed = [counts[a] for a in params.actions]
        assert stats.chisquare(observed).pvalue > 0.01

    def test_unknown_action_rejected(self, params, library):
        with pytest.raises(ScenarioError, match="cartwheel"):
            sample_scenario(params, library, 1, action="cartwheel")


class TestValidateParams:
    def test_default_config_is_clean(self, params, library):
        assert validate_params(params, library) == []

    def test_all_zero_action_weights_flagged(self, params):
        broken = dataclasses.replace(params, action_weights=(0.0,) * 35)
        findings = validate_params(broken)
        assert any("action weights degenerate" in f for f in findings)

    def test_motionless_action_flagged_by_name(self, params, library):
        golf = library.action("golf")
        neutered = ActionSpec("golf", golf.kind, ("pattern-that-matches-nothing-xyzzy",),
                              golf.critical, golf.complementary, golf.object_protocol)
        actions = tuple(neutered if a.name == "golf" else a for a in library.actions)
        broken_lib = MotionLibrary(library.clips, actions)
        findings = validate_params(params, broken_lib)
        assert any("golf" in f for f in findings)

    def test_unreachable_camera_flagged(self, params):
        rows = tuple((0, 0, 0, 0) for _ in params.actions)
        broken = dataclasses.replace(params, action_camera_allowed=rows)
        findings = validate_params(broken)
        assert any("camera" in f for f in findings)

    def test_bad_durations_flagged(self, params):
        broken = dataclasses.replace(params, min_duration=5.0, max_duration=2.0)
        assert any("duration" in f for f in validate_params(broken))


class TestParamsIO:
    def test_json_round_trip(self, params, tmp_path):
        path = tmp_path / "params.json"
        save_params(params, path)
        assert load_params(path) == params

    def test_round_tripped_params_sample_identically(self, params, library, tmp_path):
        path = tmp_path / "params.json"
        save_params(params, path)
        loaded = load_params(path)
        assert sample_scenario(loaded, library, 777) == sample_scenario(params, library, 777)
