# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: FK over frames, camera spring integration, point projection.

Same formulas and operation order as the pure-Python reference in
_kernels_py; keep the two in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

cdef double _DEG = 0.017453292519943295  # pi / 180


cdef inline void _euler(double rx, double ry, double rz, double* r) nogil:
    # R = Rz @ Ry @ Rx for XYZ Euler angles in radians, row-major 3x3.
    cdef double ca = cos(rx), sa = sin(rx)
    cdef double cb = cos(ry), sb = sin(ry)
    cdef double cc = cos(rz), sc = sin(rz)
    r[0] = cc * cb
    r[1] = cc * sb * sa - sc * ca
    r[2] = cc * sb * ca + sc * sa
    r[3] = sc * cb
    r[4] = sc * sb * sa + cc * ca
    r[5] = sc * sb * ca - cc * sa
    r[6] = -sb
    r[7] = cb * sa
    r[8] = cb * ca


cdef inline void _matmul3(double* a, double* b, double* out) nogil:
    cdef int i, j
    for i in range(3):
        for j in range(3):
            out[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j]


def fk_frames(double[:, :, ::1] rot_deg, cnp.int64_t[::1] parents,
              double[:, ::1] offsets, double[:, ::1] root_pos, double heading_deg):
    cdef Py_ssize_t n_frames = rot_deg.shape[0]
    cdef Py_ssize_t n_joints = rot_deg.shape[1]
    out_arr = np.empty((n_frames, n_joints, 3))
    cdef double[:, :, ::1] pos = out_arr
    world_arr = np.empty((n_joints, 9))
    cdef double[:, ::1] world = world_arr
    cdef double local[9]
    cdef double rh[9]
    cdef double h = heading_deg * _DEG
    cdef Py_ssize_t f, j, p
    cdef double ox, oy, oz

    rh[0] = cos(h); rh[1] = -sin(h); rh[2] = 0.0
    rh[3] = sin(h); rh[4] = cos(h); rh[5] = 0.0
    rh[6] = 0.0; rh[7] = 0.0; rh[8] = 1.0

    for f in range(n_frames):
        _euler(rot_deg[f, 0, 0] * _DEG, rot_deg[f, 0, 1] * _DEG, rot_deg[f, 0, 2] * _DEG, local)
        _matmul3(rh, local, &world[0, 0])
        pos[f, 0, 0] = root_pos[f, 0]
        pos[f, 0, 1] = root_pos[f, 1]
        pos[f, 0, 2] = root_pos[f, 2]
        for j in range(1, n_joints):
            p = parents[j]
            _euler(rot_deg[f, j, 0] * _DEG, rot_deg[f, j, 1] * _DEG, rot_deg[f, j, 2] * _DEG, local)
            _matmul3(&world[p, 0], local, &world[j, 0])
            ox = offsets[j, 0]; oy = offsets[j, 1]; oz = offsets[j, 2]
            pos[f, j, 0] = pos[f, p, 0] + world[p, 0] * ox + world[p, 1] * oy + world[p, 2] * oz
            pos[f, j, 1] = pos[f, p, 1] + world[p, 3] * ox + world[p, 4] * oy + world[p, 5] * oz
            pos[f, j, 2] = pos[f, p, 2] + world[p, 6] * ox + world[p, 7] * oy + world[p, 8] * oz
    return out_arr


def camera_run(double[::1] state0, double[::1] params, double[:, ::1] prot,
               Py_ssize_t substeps, double dt, Py_ssize_t n_frames):
    cdef double m_c = params[0], drag_c = params[1], m_t = params[2], drag_t = params[3]
    cdef double k1 = params[4], c1 = params[5], r1 = params[6], d1 = params[7]
    cdef double k2 = params[8], c2 = params[9], r2 = params[10], d2 = params[11]
    cdef double cx = state0[0], cy = state0[1], cz = state0[2]
    cdef double cvx = state0[3], cvy = state0[4], cvz = state0[5]
    cdef double tx = state0[6], ty = state0[7], tz = state0[8]
    cdef double tvx = state0[9], tvy = state0[10], tvz = state0[11]
    out_arr = np.empty((n_frames, 12))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t f, s, idx = 0
    cdef double px, py, pz, dx, dy, dz, ex, ey, ez, dist, dist2
    cdef double ux, uy, uz, rel, mag
    cdef double f1x, f1y, f1z, f2x, f2y, f2z

    out[0, 0] = cx; out[0, 1] = cy; out[0, 2] = cz
    out[0, 3] = cvx; out[0, 4] = cvy; out[0, 5] = cvz
    out[0, 6] = tx; out[0, 7] = ty; out[0, 8] = tz
    out[0, 9] = tvx; out[0, 10] = tvy; out[0, 11] = tvz

    for f in range(1, n_frames):
        for s in range(substeps):
            px = prot[idx, 0]; py = prot[idx, 1]; pz = prot[idx, 2]
            idx += 1

            dx = cx - tx; dy = cy - ty; dz = cz - tz
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            f1x = 0.0; f1y = 0.0; f1z = 0.0
            if dist >= d1 and dist > 1e-12:
                ux = dx / dist; uy = dy / dist; uz = dz / dist
                rel = (cvx - tvx) * ux + (cvy - tvy) * uy + (cvz - tvz) * uz
                mag = -k1 * (dist - r1) - c1 * rel
                f1x = mag * ux; f1y = mag * uy; f1z = mag * uz

            ex = tx - px; ey = ty - py; ez = tz - pz
            dist2 = sqrt(ex * ex + ey * ey + ez * ez)
            f2x = 0.0; f2y = 0.0; f2z = 0.0
            if dist2 >= d2 and dist2 > 1e-12:
                ux = ex / dist2; uy = ey / dist2; uz = ez / dist2
                rel = tvx * ux + tvy * uy + tvz * uz
                mag = -k2 * (dist2 - r2) - c2 * rel
                f2x = mag * ux; f2y = mag * uy; f2z = mag * uz

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
        out[f, 0] = cx; out[f, 1] = cy; out[f, 2] = cz
        out[f, 3] = cvx; out[f, 4] = cvy; out[f, 5] = cvz
        out[f, 6] = tx; out[f, 7] = ty; out[f, 8] = tz
        out[f, 9] = tvx; out[f, 10] = tvy; out[f, 11] = tvz
    return out_arr


def project_points(double[:, ::1] pts, double[::1] cam_pos, double[::1] right,
                   double[::1] up, double[::1] fwd, double focal,
                   double cx, double cy):
    cdef Py_ssize_t n = pts.shape[0]
    out_arr = np.empty((n, 3))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i
    cdef double dx, dy, dz, x, y, z
    cdef double nan = float("nan")
    for i in range(n):
        dx = pts[i, 0] - cam_pos[0]
        dy = pts[i, 1] - cam_pos[1]
        dz = pts[i, 2] - cam_pos[2]
        z = dx * fwd[0] + dy * fwd[1] + dz * fwd[2]
        if z > 1e-9:
            x = dx * right[0] + dy * right[1] + dz * right[2]
            y = dx * up[0] + dy * up[1] + dz * up[2]
            out[i, 0] = cx + focal * (x / z)
            out[i, 1] = cy - focal * (y / z)
            out[i, 2] = 1.0
        else:
            out[i, 0] = nan
            out[i, 1] = nan
            out[i, 2] = 0.0
    return out_arr
