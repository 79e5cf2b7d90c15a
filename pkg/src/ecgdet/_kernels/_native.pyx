# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pure.py``.

Arithmetic (including floor(v + 0.5) rounding and float evaluation order)
mirrors the numpy backend exactly; tests assert bit-identical output.
"""

from libc.math cimport M_PI, cos, floor, sin

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"


def unpack_fmt212(data, Py_ssize_t n_values):
    """See ``_pure.unpack_fmt212``."""
    cdef const unsigned char[::1] buf = data
    out = np.empty(n_values, dtype=np.int16)
    cdef short[::1] o = out
    cdef Py_ssize_t i, b = 0
    cdef Py_ssize_t n_pairs = n_values // 2
    cdef int b0, b1, b2, v0, v1
    for i in range(n_pairs):
        b0 = buf[b]
        b1 = buf[b + 1]
        b2 = buf[b + 2]
        v0 = b0 | ((b1 & 0x0F) << 8)
        v1 = b2 | ((b1 & 0xF0) << 4)
        if v0 >= 2048:
            v0 -= 4096
        if v1 >= 2048:
            v1 -= 4096
        o[2 * i] = <short> v0
        o[2 * i + 1] = <short> v1
        b += 3
    if n_values % 2:
        b0 = buf[b]
        b1 = buf[b + 1]
        v0 = b0 | ((b1 & 0x0F) << 8)
        if v0 >= 2048:
            v0 -= 4096
        o[n_values - 1] = <short> v0
    return out


def pack_fmt212(values):
    """See ``_pure.pack_fmt212``."""
    cdef long long[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0]
    out = np.zeros((n * 3 + 1) // 2, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i, b = 0
    cdef Py_ssize_t n_pairs = n // 2
    cdef long long u0, u1
    for i in range(n_pairs):
        u0 = v[2 * i]
        u1 = v[2 * i + 1]
        if u0 < 0:
            u0 += 4096
        if u1 < 0:
            u1 += 4096
        o[b] = <unsigned char> (u0 & 0xFF)
        o[b + 1] = <unsigned char> (((u0 >> 8) & 0x0F) | (((u1 >> 8) & 0x0F) << 4))
        o[b + 2] = <unsigned char> (u1 & 0xFF)
        b += 3
    if n % 2:
        u0 = v[n - 1]
        if u0 < 0:
            u0 += 4096
        o[b] = <unsigned char> (u0 & 0xFF)
        o[b + 1] = <unsigned char> ((u0 >> 8) & 0x0F)
    return out.tobytes()


def draw_polyline(cnp.ndarray[cnp.uint8_t, ndim=2] img, xs, ys, int line_width, int value=0):
    """See ``_pure.draw_polyline``."""
    cdef long long[::1] x = np.ascontiguousarray(xs, dtype=np.int64)
    cdef long long[::1] y = np.ascontiguousarray(ys, dtype=np.int64)
    cdef unsigned char[:, ::1] im = img
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k, j, steps
    cdef long long x0, y0, ddx, ddy, adx, ady, px, py, qx, qy
    cdef double t
    cdef int ox, oy
    cdef int anchor = (line_width - 1) // 2
    cdef unsigned char val = <unsigned char> value
    if n == 0:
        return
    if n == 1:
        px = x[0]
        py = y[0]
        for oy in range(line_width):
            for ox in range(line_width):
                qx = px + (ox - anchor)
                qy = py + (oy - anchor)
                if 0 <= qx < w and 0 <= qy < h:
                    im[qy, qx] = val
        return
    for k in range(n - 1):
        x0 = x[k]
        y0 = y[k]
        ddx = x[k + 1] - x0
        ddy = y[k + 1] - y0
        adx = ddx if ddx >= 0 else -ddx
        ady = ddy if ddy >= 0 else -ddy
        steps = adx if adx > ady else ady
        if steps < 1:
            steps = 1
        for j in range(steps + 1):
            t = (<double> j) / (<double> steps)
            px = <long long> floor(x0 + ddx * t + 0.5)
            py = <long long> floor(y0 + ddy * t + 0.5)
            for oy in range(line_width):
                for ox in range(line_width):
                    qx = px + (ox - anchor)
                    qy = py + (oy - anchor)
                    if 0 <= qx < w and 0 <= qy < h:
                        im[qy, qx] = val


def rotate_nearest(img, double angle_deg, int fill=255):
    """See ``_pure.rotate_nearest``."""
    arr = np.ascontiguousarray(img)
    cdef bint was_2d = arr.ndim == 2
    if was_2d:
        arr = arr.reshape(arr.shape[0], arr.shape[1], 1)
    out = np.full_like(arr, fill)
    cdef const unsigned char[:, :, ::1] src = arr
    cdef unsigned char[:, :, ::1] dst = out
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t nc = src.shape[2]
    cdef double theta = angle_deg * M_PI / 180.0
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef double cx = (w - 1) / 2.0
    cdef double cy = (h - 1) / 2.0
    cdef Py_ssize_t xd, yd, sx, sy, ch
    cdef double dx, dy
    for yd in range(h):
        dy = yd - cy
        for xd in range(w):
            dx = xd - cx
            sx = <Py_ssize_t> floor(cx + c * dx + s * dy + 0.5)
            sy = <Py_ssize_t> floor(cy - s * dx + c * dy + 0.5)
            if 0 <= sx < w and 0 <= sy < h:
                for ch in range(nc):
                    dst[yd, xd, ch] = src[sy, sx, ch]
    if was_2d:
        return out.reshape(h, w)
    return out
