# Compiled twins of the kernels in pykernels.py. The two files must stay in
# lockstep: identical expression trees and accumulation order give bit-equal
# results (the build disables FP contraction for this reason).

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def assign_block(const double[::1] cx, const double[::1] cy,
                 const double[::1] px, const double[::1] py,
                 const double[::1] eta,
                 Py_ssize_t start, Py_ssize_t end):
    cdef Py_ssize_t nsensors = px.shape[0]
    owner_arr = np.empty(end - start, dtype=np.int32)
    cdef cnp.int32_t[::1] owner = owner_arr
    cdef Py_ssize_t i, n, win
    cdef double x, y, dx, dy, d, best
    with nogil:
        for i in range(start, end):
            x = cx[i]
            y = cy[i]
            best = INFINITY
            win = 0
            for n in range(nsensors):
                dx = x - px[n]
                dy = y - py[n]
                d = eta[n] * (dx * dx + dy * dy)
                if d < best:
                    best = d
                    win = n
            owner[i - start] = <cnp.int32_t>win
    return owner_arr


def fused_block(const double[::1] cx, const double[::1] cy, const double[::1] f,
                const double[::1] px, const double[::1] py,
                const double[::1] eta,
                Py_ssize_t start, Py_ssize_t end):
    cdef Py_ssize_t nsensors = px.shape[0]
    owner_arr = np.empty(end - start, dtype=np.int32)
    v_arr = np.zeros(nsensors, dtype=np.float64)
    sx_arr = np.zeros(nsensors, dtype=np.float64)
    sy_arr = np.zeros(nsensors, dtype=np.float64)
    cdef cnp.int32_t[::1] owner = owner_arr
    cdef double[::1] v = v_arr
    cdef double[::1] sx = sx_arr
    cdef double[::1] sy = sy_arr
    cdef Py_ssize_t i, n, win
    cdef double x, y, dx, dy, d, best, fi
    with nogil:
        for i in range(start, end):
            x = cx[i]
            y = cy[i]
            best = INFINITY
            win = 0
            for n in range(nsensors):
                dx = x - px[n]
                dy = y - py[n]
                d = eta[n] * (dx * dx + dy * dy)
                if d < best:
                    best = d
                    win = n
            owner[i - start] = <cnp.int32_t>win
            fi = f[i]
            v[win] += fi
            sx[win] += fi * x
            sy[win] += fi * y
    return owner_arr, v_arr, sx_arr, sy_arr


def moments_block(const cnp.int32_t[::1] owner,
                  const double[::1] cx, const double[::1] cy, const double[::1] f,
                  Py_ssize_t start, Py_ssize_t end, Py_ssize_t nsensors):
    v_arr = np.zeros(nsensors, dtype=np.float64)
    sx_arr = np.zeros(nsensors, dtype=np.float64)
    sy_arr = np.zeros(nsensors, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] sx = sx_arr
    cdef double[::1] sy = sy_arr
    cdef Py_ssize_t i, n
    cdef double fi
    with nogil:
        for i in range(start, end):
            n = owner[i]
            fi = f[i]
            v[n] += fi
            sx[n] += fi * cx[i]
            sy[n] += fi * cy[i]
    return v_arr, sx_arr, sy_arr


def sqdist_block(const cnp.int32_t[::1] owner,
                 const double[::1] cx, const double[::1] cy, const double[::1] f,
                 const double[::1] qx, const double[::1] qy,
                 Py_ssize_t start, Py_ssize_t end, Py_ssize_t nsensors):
    out_arr = np.zeros(nsensors, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, n
    cdef double dx, dy
    with nogil:
        for i in range(start, end):
            n = owner[i]
            dx = cx[i] - qx[n]
            dy = cy[i] - qy[n]
            out[n] += f[i] * (dx * dx + dy * dy)
    return out_arr


def coverage_block(const double[::1] cx, const double[::1] cy,
                   const double[::1] px, const double[::1] py,
                   const double[::1] r2,
                   Py_ssize_t start, Py_ssize_t end):
    cdef Py_ssize_t nsensors = px.shape[0]
    cdef Py_ssize_t i, n
    cdef long count = 0
    cdef double x, y, dx, dy
    with nogil:
        for i in range(start, end):
            x = cx[i]
            y = cy[i]
            for n in range(nsensors):
                dx = x - px[n]
                dy = y - py[n]
                if dx * dx + dy * dy <= r2[n]:
                    count += 1
                    break
    return count
