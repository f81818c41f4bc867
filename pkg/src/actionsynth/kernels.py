"""Kernel backend selection: compiled extension when available, else pure Python.

Set ACTIONSYNTH_PURE_PYTHON=1 to force the reference implementation (used by
the benchmark and by tests that compare backends).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None

if os.environ.get("ACTIONSYNTH_PURE_PYTHON"):
    _impl = _kernels_py
elif _kernels_cy is not None:
    _impl = _kernels_cy
else:
    _impl = _kernels_py

BACKEND = "compiled" if _impl is _kernels_cy else "python"


def available_backends() -> dict:
    """Name -> raw implementation module, for benchmarks and parity tests."""
    found = {"python": _kernels_py}
    if _kernels_cy is not None:
        found["compiled"] = _kernels_cy
    return found


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def fk_frames(rot_deg, parents, offsets, root_pos, heading_deg: float) -> np.ndarray:
    return _impl.fk_frames(
        _f64(rot_deg),
        np.ascontiguousarray(parents, dtype=np.int64),
        _f64(offsets),
        _f64(root_pos),
        float(heading_deg),
    )


def camera_run(state0, params, prot_steps, substeps: int, dt: float, n_frames: int) -> np.ndarray:
    return _impl.camera_run(
        _f64(state0), _f64(params), _f64(prot_steps), int(substeps), float(dt), int(n_frames)
    )


def project_points(pts, cam_pos, right, up, fwd, focal: float, cx: float, cy: float) -> np.ndarray:
    return _impl.project_points(
        _f64(pts), _f64(cam_pos), _f64(right), _f64(up), _f64(fwd),
        float(focal), float(cx), float(cy),
    )
