"""Benchmark the compiled kernel core against the pure-Python reference.

Usage: python benchmarks/bench_kernels.py [--frames 300] [--repeats 5]
"""

import argparse
import time

import numpy as np

from actionsynth import kernels
from actionsynth.camera import default_rig, initial_state
from actionsynth.distributions import RngStream


def _fk_inputs(frames):
    rng = RngStream(1)
    rot = np.array([[[rng.uniform(-90, 90) for _ in range(3)] for _ in range(15)]
                    for _ in range(frames)])
    parents = np.array([-1, 0, 1, 1, 3, 4, 1, 6, 7, 0, 9, 10, 0, 12, 13], dtype=np.int64)
    offsets = np.array([[rng.uniform(-0.5, 0.5) for _ in range(3)] for _ in range(15)])
    root = np.array([[rng.uniform(-2, 2) for _ in range(3)] for _ in range(frames)])
    return rot, parents, offsets, root, 37.0


def _camera_inputs(frames):
    rig = default_rig()
    state0 = initial_state(rig, (0.0, 0.0, 1.0)).vector()
    steps = (frames - 1) * 4
    prot = np.array([[0.1 * np.sin(0.05 * i), 0.02 * i, 1.0] for i in range(steps)])
    return state0, rig.params_vector(), prot, 4, 1.0 / 120.0, frames


def _projection_inputs(n):
    rng = RngStream(2)
    pts = np.array([[rng.uniform(-5, 5) for _ in range(3)] for _ in range(n)])
    cam = np.array([0.0, -4.0, 1.5])
    return (pts, cam, np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]),
            np.array([0.0, 1.0, 0.0]), 221.7, 170.0, 128.0)


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled backend unavailable; build the extension to compare")
    cases = [
        ("fk_frames", _fk_inputs(args.frames)),
        ("camera_run", _camera_inputs(args.frames)),
        ("project_points", _projection_inputs(args.frames * 15)),
    ]
    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for case_name, case_args in cases:
        times = {}
        for backend_name, module in backends.items():
            times[backend_name] = _time(getattr(module, case_name), case_args, args.repeats)
        row = f"{case_name:<16}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in backends)
        if "compiled" in times and "python" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
