"""Pure-Python reference implementation of the hot kernels.

Selected by actionsynth.kernels when the compiled extension is unavailable or
disabled; the compiled module implements the same functions with identical
formulas and operation order.
"""

from __future__ import annotations

import math

import numpy as np


def euler_matrices(rot_deg: np.ndarray) -> np.ndarray:
    """XYZ Euler degrees (..., 3) -> rotation matrices (..., 3, 3), R = Rz @ Ry @ Rx."""
    r = np.deg2rad(rot_deg)
    ca, sa = np.cos(r[..., 0]), np.sin(r[..., 0])
    cb, sb = np.cos(r[..., 1]), np.sin(r[..., 1])
    cc, sc = np.cos(r[..., 2]), np.sin(r[..., 2])
    out = np.empty(rot_deg.shape[:-1] + (3, 3))
    out[..., 0, 0] = cc * cb
    out[..., 0, 1] = cc * sb * sa - sc * ca
    out[..., 0, 2] = cc * sb * ca + sc * sa
    out[..., 1, 0] = sc * cb
    out[..., 1, 1] = sc * sb * sa + cc * ca
    out[..., 1, 2] = sc * sb * ca - cc * sa
    out[..., 2, 0] = -sb
    out[..., 2, 1] = cb * sa
    out[..., 2, 2] = cb * ca
    return out


def fk_frames(rot_deg: np.ndarray, parents: np.ndarray, offsets: np.ndarray,
              root_pos: np.ndarray, heading_deg: float) -> np.ndarray:
    """World joint positions for every frame.

    Child world transform = parent world transform o bind offset o joint
    rotation; the root additionally rotates by the placement heading (about z).
    """
    n_frames, n_joints = rot_deg.shape[0], rot_deg.shape[1]
    local = euler_matrices(rot_deg)
    h = math.radians(heading_deg)
    rh = np.array([
        [math.cos(h), -math.sin(h), 0.0],
        [math.sin(h), math.cos(h), 0.0],
        [0.0, 0.0, 1.0],
    ])
    world_r = np.empty_like(local)
    pos = np.empty((n_frames, n_joints, 3))
    world_r[:, 0] = rh @ local[:, 0]
    pos[:, 0] = root_pos
    for j in range(1, n_joints):
        p = parents[j]
        world_r[:, j] = world_r[:, p] @ local[:, j]
        pos[:, j] = pos[:, p] + world_r[:, p] @ offsets[j]
    return pos


def step_once(state, params, prot, dt):
    """One semi-implicit Euler step of the two-spring camera rig.

    state: 12 floats (camera pos/vel, target pos/vel); params: 12 floats
    (camera mass/drag, target mass/drag, then stiffness/damping/rest/min-dist
    for the camera-target and target-protagonist springs). A spring exerts no
    force while its endpoint separation is below its min distance.
    """
    m_c, drag_c, m_t, drag_t, k1, c1, r1, d1, k2, c2, r2, d2 = params
    cx, cy, cz, cvx, cvy, cvz, tx, ty, tz, tvx, tvy, tvz = state
    px, py, pz = prot

    dx, dy, dz = cx - tx, cy - ty, cz - tz
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    f1x = f1y = f1z = 0.0
    if dist >= d1 and dist > 1e-12:
        ux, uy, uz = dx / dist, dy / dist, dz / dist
        rel = (cvx - tvx) * ux + (cvy - tvy) * uy + (cvz - tvz) * uz
        mag = -k1 * (dist - r1) - c1 * rel
        f1x, f1y, f1z = mag * ux, mag * uy, mag * uz

    ex, ey, ez = tx - px, ty - py, tz - pz
    dist2 = math.sqrt(ex * ex + ey * ey + ez * ez)
    f2x = f2y = f2z = 0.0
    if dist2 >= d2 and dist2 > 1e-12:
        ux, uy, uz = ex / dist2, ey / dist2, ez / dist2
        rel = tvx * ux + tvy * uy + tvz * uz  # protagonist treated as kinematic
        mag = -k2 * (dist2 - r2) - c2 * rel
        f2x, f2y, f2z = mag * ux, mag * uy, mag * uz

    cvx += dt * (f1x / m_c - drag_c * cvx)
    cvy += dt * (f1y / m_c - drag_c * cvy)
    cvz += dt * (f1z / m_c - drag_c * cvz)
    tvx += dt * ((f2x - f1x) / m_t - drag_t * tvx)
    tvy += dt * ((f2y - f1y) / m_t - drag_t * tvy)
    tvz += dt * ((f2z - f1z) / m_t - drag_t * tvz)
    cx += dt * cvx
    cy += dt * cvy
    cz += dt * cvz
    tx += dt * tvx
    ty += dt * tvy
    tz += dt * tvz
    return (cx, cy, cz, cvx, cvy, cvz, tx, ty, tz, tvx, tvy, tvz)


def camera_run(state0: np.ndarray, params: np.ndarray, prot_steps: np.ndarray,
               substeps: int, dt: float, n_frames: int) -> np.ndarray:
    """Integrate the rig and return the state at each output frame (frame 0 = state0)."""
    state = tuple(float(v) for v in state0)
    p = tuple(float(v) for v in params)
    prot = np.asarray(prot_steps, dtype=np.float64)
    out = np.empty((n_frames, 12))
    out[0] = state
    idx = 0
    for f in range(1, n_frames):
        for _ in range(substeps):
            state = step_once(state, p, (prot[idx, 0], prot[idx, 1], prot[idx, 2]), dt)
            idx += 1
        out[f] = state
    return out


def project_points(pts: np.ndarray, cam_pos: np.ndarray, right: np.ndarray,
                   up: np.ndarray, fwd: np.ndarray, focal: float,
                   cx: float, cy: float) -> np.ndarray:
    """Pinhole projection; rows are (px, py, visible), NaN pixels when behind the camera."""
    d = pts - cam_pos
    z = d @ fwd
    x = d @ right
    y = d @ up
    out = np.empty((pts.shape[0], 3))
    vis = z > 1e-9
    safe_z = np.where(vis, z, 1.0)
    out[:, 0] = np.where(vis, cx + focal * (x / safe_z), np.nan)
    out[:, 1] = np.where(vis, cy - focal * (y / safe_z), np.nan)
    out[:, 2] = vis
    return out
