# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SSIM kernel: fused separable windowed statistics.

Mirrors fairage._kernels_py.ssim_mean_map; one row pass produces the five
filtered fields, the column pass folds them straight into the SSIM map sum
without materialising intermediate maps.
"""

import numpy as np


BACKEND = "compiled"


def ssim_mean_map(object x_in, object y_in, object window, double c1, double c2):
    cdef double[:, ::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[:, ::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[::1] g = np.ascontiguousarray(window, dtype=np.float64)
    cdef Py_ssize_t h = x.shape[0]
    cdef Py_ssize_t w = x.shape[1]
    cdef Py_ssize_t k = g.shape[0]
    if y.shape[0] != h or y.shape[1] != w:
        raise ValueError(f"shape mismatch ({h}, {w}) vs ({y.shape[0]}, {y.shape[1]})")
    if h < k or w < k:
        raise ValueError("image smaller than window")

    cdef Py_ssize_t out_h = h - k + 1
    cdef Py_ssize_t out_w = w - k + 1
    cdef double[:, ::1] rx = np.empty((h, out_w), dtype=np.float64)
    cdef double[:, ::1] ry = np.empty((h, out_w), dtype=np.float64)
    cdef double[:, ::1] rxx = np.empty((h, out_w), dtype=np.float64)
    cdef double[:, ::1] ryy = np.empty((h, out_w), dtype=np.float64)
    cdef double[:, ::1] rxy = np.empty((h, out_w), dtype=np.float64)

    cdef Py_ssize_t i, j, t
    cdef double ax, ay, axx, ayy, axy, gv, xv, yv
    for i in range(h):
        for j in range(out_w):
            ax = ay = axx = ayy = axy = 0.0
            for t in range(k):
                gv = g[t]
                xv = x[i, j + t]
                yv = y[i, j + t]
                ax += gv * xv
                ay += gv * yv
                axx += gv * xv * xv
                ayy += gv * yv * yv
                axy += gv * xv * yv
            rx[i, j] = ax
            ry[i, j] = ay
            rxx[i, j] = axx
            ryy[i, j] = ayy
            rxy[i, j] = axy

    cdef double total = 0.0
    cdef double mx, my, mxx, myy, mxy, var_x, var_y, cov, num, den
    for i in range(out_h):
        for j in range(out_w):
            mx = my = mxx = myy = mxy = 0.0
            for t in range(k):
                gv = g[t]
                mx += gv * rx[i + t, j]
                my += gv * ry[i + t, j]
                mxx += gv * rxx[i + t, j]
                myy += gv * ryy[i + t, j]
                mxy += gv * rxy[i + t, j]
            var_x = mxx - mx * mx
            var_y = myy - my * my
            cov = mxy - mx * my
            num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
            den = (mx * mx + my * my + c1) * (var_x + var_y + c2)
            total += num / den
    return total / <double>(out_h * out_w)
