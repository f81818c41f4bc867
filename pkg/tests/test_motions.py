import numpy as np
import pytest

from actionsynth.actions import DEFAULT_ACTIONS
from actionsynth.motions import (
    ActionSpec,
    Channel,
    LibraryError,
    MotionClip,
    MotionLibrary,
    admissible_motions,
    build_motion_matrix,
    load_library,
    save_library,
)
from actionsynth.skeleton import MUSCLES, default_ragdoll


def _simple_clip(clip_id, description, duration=2.0):
    skel = default_ragdoll()
    ch = Channel((0.0, duration), ((0.0, 0.0, 0.0), (5.0, 0.0, 0.0)))
    return MotionClip(
        clip_id=clip_id,
        source="programmed",
        description=description,
        fps=30.0,
        duration=duration,
        skeleton=skel,
        tracks={m: ch for m in skel.muscles},
        root_track=Channel((0.0, duration), ((0.0, 0.0, 0.95), (0.0, 1.0, 0.95))),
    )


def _action(name="walk", patterns=("walk",)):
    return ActionSpec(name, "sub_hmdb", patterns,
                      ("pelvis", "left_thigh", "left_calf", "left_foot",
                       "right_thigh", "right_calf", "right_foot"))


class TestMotionMatrix:
    def test_direct_match(self):
        m = build_motion_matrix([_action()], [_simple_clip("c0", "walk forward slowly")])
        assert m[0, 0] == 1

    def test_no_match(self):
        clap = ActionSpec("clap", "sub_hmdb", ("clap",), ("left_hand", "right_hand"))
        m = build_motion_matrix([clap], [_simple_clip("c0", "golf swing")])
        assert m[0, 0] == 0

    def test_case_insensitive(self):
        m = build_motion_matrix([_action()], [_simple_clip("c0", "Brisk WALK outside")])
        assert m[0, 0] == 1

    def test_bundled_library_rows_all_positive(self, library):
        assert (library.matrix.sum(axis=1) > 0).all()

    def test_matrix_is_binary(self, library):
        assert set(np.unique(library.matrix)) <= {0, 1}

    def test_malformed_regex_names_action_and_pattern(self):
        bad = ActionSpec("golf", "sub_hmdb", ("go(lf",), ("right_hand",))
        with pytest.raises(LibraryError, match=r"golf.*go\(lf"):
            build_motion_matrix([bad], [_simple_clip("c0", "golf swing")])

    def test_column_permutation_follows_clip_order(self):
        clips = [_simple_clip("a", "walk one"), _simple_clip("b", "golf swing"),
                 _simple_clip("c", "walk two")]
        actions = [_action()]
        m1 = build_motion_matrix(actions, clips)
        m2 = build_motion_matrix(actions, clips[::-1])
        assert (m1[:, ::-1] == m2).all()

    def test_empty_inputs_rejected(self):
        with pytest.raises(LibraryError):
            build_motion_matrix([], [_simple_clip("c0", "walk")])


class TestAdmissibleMotions:
    def test_short_clip_excluded(self):
        lib = MotionLibrary(
            [_simple_clip("short", "walk shuffle", 0.5), _simple_clip("long", "walk far", 2.0)],
            [_action()],
        )
        weights = admissible_motions(lib.actions[0], lib, min_duration=1.0)
        assert "short" not in weights
        assert weights == {"long": 1.0}

    def test_uniform_weights(self):
        lib = MotionLibrary(
            [_simple_clip("a", "walk one", 2.0), _simple_clip("b", "walk two", 3.0)],
            [_action()],
        )
        weights = admissible_motions(lib.actions[0], lib, min_duration=1.0)
        assert weights == {"a": 0.5, "b": 0.5}

    def test_all_too_short_gives_empty_set(self):
        lib = MotionLibrary([_simple_clip("a", "walk one", 0.5)], [_action()])
        assert admissible_motions(lib.actions[0], lib, min_duration=1.0) == {}

    def test_boundary_duration_included(self):
        lib = MotionLibrary([_simple_clip("a", "walk one", 1.0)], [_action()])
        assert admissible_motions(lib.actions[0], lib, min_duration=1.0) == {"a": 1.0}


class TestLibraryIO:
    def test_round_trip_identity(self, library, tmp_path):
        path = tmp_path / "lib.json"
        save_library(library, path)
        assert load_library(path) == library

    def test_empty_file_is_a_parse_error(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        with pytest.raises(LibraryError):
            load_library(path)

    def test_missing_file_is_a_library_error(self, tmp_path):
        with pytest.raises(LibraryError):
            load_library(tmp_path / "nope.json")

    def test_missing_muscle_channel_names_it(self):
        skel = default_ragdoll()
        ch = Channel((0.0,), ((0.0, 0.0, 0.0),))
        tracks = {m: ch for m in skel.muscles if m != "left_hand"}
        with pytest.raises(LibraryError, match="left_hand"):
            MotionClip("c0", "programmed", "walk", 30.0, 1.0, skel, tracks, ch)

    def test_unknown_muscle_rejected(self):
        skel = default_ragdoll()
        ch = Channel((0.0,), ((0.0, 0.0, 0.0),))
        tracks = {m: ch for m in skel.muscles}
        tracks["tail"] = ch
        with pytest.raises(LibraryError, match="tail"):
            MotionClip("c0", "programmed", "walk", 30.0, 1.0, skel, tracks, ch)

    def test_non_monotone_keyframes_rejected(self):
        with pytest.raises(LibraryError, match="increasing"):
            Channel((0.0, 0.5, 0.5), ((0.0,) * 3,) * 3)

    def test_zero_duration_rejected(self):
        skel = default_ragdoll()
        ch = Channel((0.0,), ((0.0, 0.0, 0.0),))
        with pytest.raises(LibraryError, match="duration"):
            MotionClip("c0", "programmed", "walk", 30.0, 0.0, skel,
                       {m: ch for m in skel.muscles}, ch)

    def test_duplicate_clip_ids_rejected(self):
        clip = _simple_clip("dup", "walk")
        with pytest.raises(LibraryError, match="duplicate"):
            MotionLibrary([clip, clip], [_action()])


class TestActionSpec:
    def test_partition_covers_all_muscles(self):
        for spec in DEFAULT_ACTIONS:
            assert set(spec.critical) | set(spec.complementary) == set(MUSCLES)
            assert not set(spec.critical) & set(spec.complementary)

    def test_two_people_actions_have_one_supporting_actor(self):
        for spec in DEFAULT_ACTIONS:
            expected = 1 if spec.kind == "two_people" else 0
            assert spec.supporting_actors == expected

    def test_action_count(self):
        assert len(DEFAULT_ACTIONS) == 35
        kinds = [s.kind for s in DEFAULT_ACTIONS]
        assert kinds.count("sub_hmdb") == 21
        assert kinds.count("one_person") == 10
        assert kinds.count("two_people") == 4

    def test_overlapping_partition_rejected(self):
        with pytest.raises(ValueError, match="partition|overlap"):
            ActionSpec("bad", "sub_hmdb", ("x",), ("pelvis",), complementary=MUSCLES)

    def test_channel_interpolation_is_linear(self):
        ch = Channel((0.0, 1.0), ((0.0, 0.0, 0.0), (10.0, -4.0, 2.0)))
        mid = ch.sample(0.5)
        assert mid == pytest.approx([5.0, -2.0, 1.0])

    def test_channel_clamps_outside_keys(self):
        ch = Channel((0.0, 1.0), ((1.0, 1.0, 1.0), (2.0, 2.0, 2.0)))
        assert ch.sample(5.0) == pytest.approx([2.0, 2.0, 2.0])
