# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: voronoi grid ownership and conv/pool layers.

Kept semantically identical to _purepy.py; the build disables FMA
contraction so voronoi distances match the numpy path bit-for-bit.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def voronoi_owners(double[:, ::1] px, double[:, ::1] py, double[:, ::1] seeds):
    cdef Py_ssize_t h = px.shape[0]
    cdef Py_ssize_t w = px.shape[1]
    cdef Py_ssize_t n = seeds.shape[0]
    owners_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] owners = owners_arr
    cdef Py_ssize_t r, c, k, bk
    cdef double x, y, dx, dy, d, best
    for r in range(h):
        for c in range(w):
            x = px[r, c]
            y = py[r, c]
            dx = x - seeds[0, 0]
            dy = y - seeds[0, 1]
            best = dx * dx + dy * dy
            bk = 0
            for k in range(1, n):
                dx = x - seeds[k, 0]
                dy = y - seeds[k, 1]
                d = dx * dx + dy * dy
                if d < best:
                    best = d
                    bk = k
            owners[r, c] = <cnp.int32_t> bk
    return owners_arr


def conv2d_fwd(double[:, :, :, ::1] x, double[:, :, :, ::1] w, double[::1] b):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t f = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t ph = (kh - 1) // 2, pw = (kw - 1) // 2
    y_arr = np.empty((n, f, h, wd), dtype=np.float64)
    cdef double[:, :, :, ::1] y = y_arr
    cdef Py_ssize_t i, j, r, q, ci, ki, kj, ir, jc
    cdef double acc
    for i in range(n):
        for j in range(f):
            for r in range(h):
                for q in range(wd):
                    acc = b[j]
                    for ci in range(c):
                        for ki in range(kh):
                            ir = r + ki - ph
                            if ir < 0 or ir >= h:
                                continue
                            for kj in range(kw):
                                jc = q + kj - pw
                                if jc < 0 or jc >= wd:
                                    continue
                                acc += x[i, ci, ir, jc] * w[j, ci, ki, kj]
                    y[i, j, r, q] = acc
    return y_arr


def conv2d_bwd(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
               double[:, :, :, ::1] gy):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t f = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t ph = (kh - 1) // 2, pw = (kw - 1) // 2
    gx_arr = np.zeros((n, c, h, wd), dtype=np.float64)
    gw_arr = np.zeros((f, c, kh, kw), dtype=np.float64)
    gb_arr = np.zeros(f, dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef double[:, :, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t i, j, r, q, ci, ki, kj, ir, jc
    cdef double g
    for i in range(n):
        for j in range(f):
            for r in range(h):
                for q in range(wd):
                    g = gy[i, j, r, q]
                    gb[j] += g
                    for ci in range(c):
                        for ki in range(kh):
                            ir = r + ki - ph
                            if ir < 0 or ir >= h:
                                continue
                            for kj in range(kw):
                                jc = q + kj - pw
                                if jc < 0 or jc >= wd:
                                    continue
                                gw[j, ci, ki, kj] += x[i, ci, ir, jc] * g
                                gx[i, ci, ir, jc] += w[j, ci, ki, kj] * g
    return gx_arr, gw_arr, gb_arr


def maxpool2_fwd(double[:, :, :, ::1] x):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3]
    cdef Py_ssize_t ho = h // 2, wo = w // 2
    y_arr = np.empty((n, c, ho, wo), dtype=np.float64)
    idx_arr = np.empty((n, c, ho, wo), dtype=np.int32)
    cdef double[:, :, :, ::1] y = y_arr
    cdef cnp.int32_t[:, :, :, ::1] idx = idx_arr
    cdef Py_ssize_t i, ci, r, q, di, dj, best_k
    cdef double v, best
    for i in range(n):
        for ci in range(c):
            for r in range(ho):
                for q in range(wo):
                    best = x[i, ci, 2 * r, 2 * q]
                    best_k = 0
                    for di in range(2):
                        for dj in range(2):
                            v = x[i, ci, 2 * r + di, 2 * q + dj]
                            if v > best:
                                best = v
                                best_k = 2 * di + dj
                    y[i, ci, r, q] = best
                    idx[i, ci, r, q] = <cnp.int32_t> best_k
    return y_arr, idx_arr


def maxpool2_bwd(double[:, :, :, ::1] gy, cnp.int32_t[:, :, :, ::1] idx):
    cdef Py_ssize_t n = gy.shape[0], c = gy.shape[1], ho = gy.shape[2], wo = gy.shape[3]
    gx_arr = np.zeros((n, c, ho * 2, wo * 2), dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef Py_ssize_t i, ci, r, q, k
    for i in range(n):
        for ci in range(c):
            for r in range(ho):
                for q in range(wo):
                    k = idx[i, ci, r, q]
                    gx[i, ci, 2 * r + k // 2, 2 * q + k % 2] = gy[i, ci, r, q]
    return gx_arr
