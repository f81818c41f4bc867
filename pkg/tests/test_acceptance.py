"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
"""

import dataclasses
import math
import time
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from actionsynth.camera import (
    bbox_of,
    default_rig,
    initial_state,
    mechanical_energy,
    project,
    simulate,
    step,
)
from actionsynth.cli import main
from actionsynth.distributions import RngStream, TriangularParams, triangular_cdf
from actionsynth.generate import audit_records, compute_stats, make_splits, read_manifest
from actionsynth.motions import MotionClip
from actionsynth.multitask import (
    LossWeights,
    MultiTaskLabel,
    build_minibatch,
    loss_gradient,
    multitask_loss,
    segmental_consensus,
)
from actionsynth.ragdoll import (
    RootPlacement,
    VariationPlan,
    apply_variation,
    enforce_limits,
    forward_kinematics,
    plan_variation,
)
from actionsynth.scenario import sample_world


def _report(number: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] criterion {number}: {description}{suffix}")
    assert ok, f"criterion {number} failed: {description}{suffix}"


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    """Criterion 2 dataset: two CLI runs of `generate --per-category 10 --seed 42`."""
    first = tmp_path_factory.mktemp("accept_a")
    second = tmp_path_factory.mktemp("accept_b")
    start = time.perf_counter()
    code = main(["generate", "--per-category", "10", "--seed", "42", "--out", str(first)])
    elapsed = time.perf_counter() - start
    assert code == 0
    assert main(["generate", "--per-category", "10", "--seed", "42", "--out", str(second)]) == 0
    identical = (first / "manifest.jsonl").read_bytes() == (second / "manifest.jsonl").read_bytes()
    if identical:
        for track in sorted((first / "tracks").iterdir()):
            if (second / "tracks" / track.name).read_bytes() != track.read_bytes():
                identical = False
                break
    records = read_manifest(first / "manifest.jsonl")
    return records, elapsed, identical


def test_criterion_1_distribution_fidelity(params):
    start = time.perf_counter()
    rng = RngStream(314159)
    worlds = [sample_world(params, rng) for _ in range(10000)]
    elapsed = time.perf_counter() - start

    phases = Counter(w.day_phase for w in worlds)
    weathers = Counter(w.weather for w in worlds)
    phase_ok = phases["night"] == 0 and all(
        abs(phases[p] / 10000 - 1 / 3) <= 0.02 for p in ("dawn", "day", "dusk")
    )
    weather_ok = all(abs(weathers[w] / 10000 - 0.25) <= 0.02 for w in params.weathers)

    dawn = [w.clock_time for w in worlds if w.day_phase == "dawn"]
    tri = TriangularParams(7.0, 10.0, 9.0)
    cdf = lambda v: np.array([triangular_cdf(tri, x) for x in np.atleast_1d(v)])
    ks_ok = stats.kstest(dawn, cdf).pvalue > 0.01

    ok = phase_ok and weather_ok and ks_ok and elapsed < 5.0
    _report(1, "distribution fidelity over 10,000 worlds", ok,
            f"phases ok={phase_ok}, weather ok={weather_ok}, KS ok={ks_ok}, {elapsed:.2f}s")


def test_criterion_2_dataset_shape(dataset, params):
    records, elapsed, identical = dataset
    per = Counter(r.action for r in records)
    counts_ok = len(records) == 350 and all(per[a] == 10 for a in params.actions)
    durations_ok = all(1.0 - 1e-9 <= r.duration <= 10.0 + 1e-9 for r in records)
    frames_ok = all(r.frame_count == round(r.duration * 30.0) for r in records)
    mean = compute_stats(records).mean_duration
    mean_ok = 4.0 <= mean <= 6.0
    ok = counts_ok and durations_ok and frames_ok and mean_ok and identical and elapsed < 60.0
    _report(2, "dataset shape at 1/100 scale", ok,
            f"350x10 ok={counts_ok}, durations ok={durations_ok}, frames ok={frames_ok}, "
            f"mean={mean:.2f}s, byte-identical={identical}, {elapsed:.1f}s")


def test_criterion_3_conditional_constraints(dataset, params, library):
    records, _, _ = dataset
    problems = audit_records(records, params, library)
    # direct re-statements of the audited constraints
    for rec in records:
        if rec.camera_kind == "indoors" and rec.environment != "house":
            problems.append(f"{rec.video_id}: indoors outside house")
        if rec.camera_kind == "closeup" and rec.action != "brush hair":
            problems.append(f"{rec.video_id}: closeup on disallowed action")
        spec = library.action(rec.action)
        want = 1 if spec.kind == "two_people" else 0
        if rec.supporting_actors != want:
            problems.append(f"{rec.video_id}: supporting actor count")
        if rec.duration > min(rec.motion_duration, 10.0) + 1e-9:
            problems.append(f"{rec.video_id}: duration exceeds min(motion, max)")
    _report(3, "conditional-constraint audit over 350 records", not problems,
            f"{len(problems)} violations")


def test_criterion_4_kite_camera():
    rig = default_rig()
    prot = np.array([0.0, 0.0, 1.0])
    prot_traj = np.tile(prot, (301, 1))

    traj = simulate(rig, prot_traj, 30.0, 10.0)
    separation = float(np.linalg.norm(traj.positions[-1] - traj.states[-1, 6:9]))
    bound = rig.cam_target.min_distance + 0.05 * rig.cam_target.rest_length
    converges = separation <= bound

    state = initial_state(rig, prot)
    energy = mechanical_energy(state, rig, prot)
    monotone = True
    for _ in range(1200):
        state = step(state, rig, prot, 1.0 / 120.0)
        new_energy = mechanical_energy(state, rig, prot)
        if new_energy > energy + 1e-9:
            monotone = False
            break
        energy = new_energy

    kicked = dataclasses.replace(rig, impulse=(3.0, -1.0, 2.0))
    coarse = simulate(kicked, prot_traj, 30.0, 10.0, internal_dt=1.0 / 120.0)
    fine = simulate(kicked, prot_traj, 30.0, 10.0, internal_dt=1.0 / 240.0)
    diff = float(np.linalg.norm(coarse.positions[-1] - fine.positions[-1]))
    scale = max(1.0, float(np.linalg.norm(coarse.positions[-1] - prot)))
    stable = diff / scale < 0.01

    ok = converges and monotone and stable
    _report(4, "kite camera convergence, energy audit, dt stability", ok,
            f"separation={separation:.3f}<= {bound:.2f}, monotone={monotone}, "
            f"dt change={100 * diff / scale:.3f}%")


def test_criterion_5_ragdoll_variation_suite(library):
    modes = ("perturbation", "weakening", "blending")
    overlap_free = True
    donors_ok = True
    pre_clamp_violating = 0
    applications = 0
    frames_within = True

    for i in range(1000):
        rng = RngStream(271828, i)
        spec = library.actions[rng.integers(len(library.actions))]
        mode = modes[rng.integers(3)]
        plan = plan_variation(spec, mode, library, rng)
        if set(plan.affected) & set(spec.critical):
            overlap_free = False
        if len(plan.donors) > 2:
            donors_ok = False
        clip = library.clips[rng.integers(len(library.clips))]
        varied = apply_variation(clip, plan, clip.skeleton, library)
        applications += 1
        clamped, report = enforce_limits(varied, clip.skeleton)
        if report:
            pre_clamp_violating += 1
        if i % 50 == 0:  # spot-check interpolated frames, not just keyframes
            limits = clip.skeleton.limits_array()
            times = np.linspace(0.0, clip.duration, 40)
            for j, muscle in enumerate(clip.skeleton.muscles):
                vals = clamped.tracks[muscle].sample_many(times)
                if (vals < limits[j, :, 0] - 1e-9).any() or (vals > limits[j, :, 1] + 1e-9).any():
                    frames_within = False

    clip = library.clips[0]
    identity = apply_variation(clip, VariationPlan(mode="none"), clip.skeleton, library) is clip
    rate = pre_clamp_violating / applications
    ok = overlap_free and donors_ok and identity and frames_within and rate <= 0.10
    _report(5, "ragdoll variation suite over 1,000 plans", ok,
            f"overlap-free={overlap_free}, donors<=2={donors_ok}, none-identity={identity}, "
            f"post-clamp in-limits={frames_within}, pre-clamp rate={100 * rate:.1f}%")


def test_criterion_6_multitask_math():
    rng = RngStream(161803)
    consensus_ok = True
    for _ in range(100):
        k = 1 + rng.integers(6)
        c = 2 + rng.integers(12)
        scores = np.array([[rng.uniform(-10, 10) for _ in range(c)] for _ in range(k)])
        brute = np.array([sum(scores[s][j] for s in range(k)) / k for j in range(c)])
        if not np.array_equal(segmental_consensus(scores), brute):
            # mean() and the running sum may differ in the last ulp; require 1e-15
            if not np.allclose(segmental_consensus(scores), brute, rtol=0, atol=1e-12):
                consensus_ok = False

    worst_fd = 0.0
    for _ in range(100):
        heads = {
            "real": np.array([rng.uniform(-5, 5) for _ in range(2 + rng.integers(8))]),
            "virtual": np.array([rng.uniform(-5, 5) for _ in range(2 + rng.integers(8))]),
        }
        source = ("real", "virtual")[rng.integers(2)]
        label = MultiTaskLabel(source, rng.integers(len(heads[source])))
        weights = LossWeights(0.6875, 0.3125)
        analytic = loss_gradient(heads, label, weights)
        h = 1e-5
        for s in ("real", "virtual"):
            for j in range(len(heads[s])):
                hp = {q: heads[q].copy() for q in heads}
                hm = {q: heads[q].copy() for q in heads}
                hp[s][j] += h
                hm[s][j] -= h
                fd = (multitask_loss(hp, label, weights) - multitask_loss(hm, label, weights)) / (2 * h)
                denom = max(abs(fd), abs(analytic[s][j]), 1e-8)
                worst_fd = max(worst_fd, abs(fd - analytic[s][j]) / denom)
    gradient_ok = worst_fd < 1e-5

    ln2_loss = multitask_loss({"real": np.zeros(2), "virtual": np.zeros(2)},
                              MultiTaskLabel("real", 0), LossWeights(1.0, 1.0))
    ln2_ok = abs(ln2_loss - math.log(2.0)) <= 1e-12

    plan = build_minibatch([f"r{i}" for i in range(400)], [f"v{i}" for i in range(400)],
                           RngStream(42))
    plan_ok = (
        len(plan.blocks) == 8
        and all(len(b) == 32 for b in plan.blocks)
        and all(sum(1 for s, _ in b if s == "virtual") == 10 for b in plan.blocks)
        and all(sum(1 for s, _ in b if s == "real") == 22 for b in plan.blocks)
        and plan.weights.real == 0.6875
        and plan.weights.virtual == 0.3125
    )

    ok = consensus_ok and gradient_ok and ln2_ok and plan_ok
    _report(6, "segmental consensus, loss, gradient, minibatch plan", ok,
            f"consensus ok={consensus_ok}, fd err={worst_fd:.2e}, ln2 ok={ln2_ok}, plan ok={plan_ok}")


def test_criterion_7_split_protocol(dataset):
    records, _, _ = dataset
    splits_a = make_splits(records, train_ratio=0.8, split_count=3, seed=99)
    splits_b = make_splits(records, train_ratio=0.8, split_count=3, seed=99)
    reproducible = splits_a == splits_b

    by_action: dict[str, set] = {}
    for rec in records:
        by_action.setdefault(rec.action, set()).add(rec.video_id)

    disjoint = True
    balanced = True
    for train, test in splits_a:
        train_set, test_set = set(train), set(test)
        if train_set & test_set or len(train) + len(test) != 350:
            disjoint = False
        for ids in by_action.values():
            if abs(len(ids & train_set) - 0.8 * len(ids)) > 1.0:
                balanced = False
    distinct = len({tuple(sorted(t)) for t, _ in splits_a}) == 3

    ok = reproducible and disjoint and balanced and distinct
    _report(7, "three stratified 80/20 splits", ok,
            f"reproducible={reproducible}, disjoint={disjoint}, balanced={balanced}, "
            f"distinct={distinct}")


def test_criterion_8_fk_and_projection_oracles(library):
    # Hand-composed two-link case: pelvis and spine rotated 90 deg about z.
    from actionsynth.motions import Channel
    from actionsynth.skeleton import default_ragdoll

    skel = default_ragdoll()
    zero = Channel((0.0,), ((0.0, 0.0, 0.0),))
    tracks = {m: zero for m in skel.muscles}
    tracks["pelvis"] = Channel((0.0,), ((0.0, 0.0, 90.0),))
    tracks["spine"] = Channel((0.0,), ((0.0, 0.0, 90.0),))
    clip = MotionClip("two_link", "programmed", "analytic pose", 30.0, 1.0,
                      skel, tracks, zero)
    pos = forward_kinematics(clip, RootPlacement(), 0)
    fk_ok = (
        np.allclose(pos[1], [0.0, 0.0, 0.22], atol=1e-9)
        and np.allclose(pos[2], [0.0, 0.0, 0.62], atol=1e-9)
        and np.allclose(pos[3], [-0.20, 0.0, 0.54], atol=1e-9)
        and np.allclose(pos[4], [-0.48, 0.0, 0.54], atol=1e-9)
    )

    rng = RngStream(577215)
    bbox_ok = True
    checked = 0
    while checked < 100:
        cam = np.array([rng.uniform(-3, 3) for _ in range(3)])
        look = np.array([rng.uniform(-1, 1) for _ in range(3)])
        if np.linalg.norm(look) < 1e-3:
            continue
        joints = np.array(
            [[rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)] for _ in range(15)]
        )
        box = bbox_of(joints, cam, look, 60.0, (340, 256))
        projected = [project(cam, look, 60.0, (340, 256), p) for p in joints]
        vis = [(x, y) for x, y, v in projected if v]
        checked += 1
        if not vis:
            if box is not None:
                bbox_ok = False
            continue
        xs = [x for x, _ in vis]
        ys = [y for _, y in vis]
        expected = (
            min(max(min(xs), 0.0), 340.0), min(max(min(ys), 0.0), 256.0),
            min(max(max(xs), 0.0), 340.0), min(max(max(ys), 0.0), 256.0),
        )
        if box is None or not np.allclose(box, expected, atol=1e-9):
            bbox_ok = False

    ok = fk_ok and bbox_ok
    _report(8, "FK analytic case and bbox joint-sweep oracle", ok,
            f"fk ok={fk_ok}, bbox ok={bbox_ok}")
