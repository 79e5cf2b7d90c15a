"""Numpy implementations of the hot kernels.

This is the reference backend; the compiled extension in ``_native.pyx``
must produce bit-identical output for every function here. All rounding is
floor(v + 0.5) so both backends agree regardless of FPU rounding mode.
"""

import math

import numpy as np

BACKEND = "pure"


def unpack_fmt212(data: bytes, n_values: int) -> np.ndarray:
    """Unpack two's-complement 12-bit sample pairs (3 bytes per pair).

    Sample A = byte0 + low nibble of byte1 as high bits; sample B = byte2 +
    high nibble of byte1 as high bits. Caller guarantees the buffer holds at
    least ceil(n_values * 3 / 2) bytes; trailing bytes are ignored.
    """
    buf = np.frombuffer(data, dtype=np.uint8)
    n_pairs = n_values // 2
    out = np.empty(n_values, dtype=np.int16)
    if n_pairs:
        trip = buf[: n_pairs * 3].reshape(n_pairs, 3).astype(np.int32)
        v0 = trip[:, 0] | ((trip[:, 1] & 0x0F) << 8)
        v1 = trip[:, 2] | ((trip[:, 1] & 0xF0) << 4)
        out[0 : 2 * n_pairs : 2] = np.where(v0 >= 2048, v0 - 4096, v0).astype(np.int16)
        out[1 : 2 * n_pairs : 2] = np.where(v1 >= 2048, v1 - 4096, v1).astype(np.int16)
    if n_values % 2:
        b0 = int(buf[n_pairs * 3])
        b1 = int(buf[n_pairs * 3 + 1])
        v = b0 | ((b1 & 0x0F) << 8)
        out[-1] = v - 4096 if v >= 2048 else v
    return out


def pack_fmt212(values: np.ndarray) -> bytes:
    """Inverse of :func:`unpack_fmt212`; values must lie in [-2048, 2047]."""
    v = np.asarray(values, dtype=np.int64)
    u = np.where(v < 0, v + 4096, v)
    n = len(u)
    n_pairs = n // 2
    out = np.zeros((n * 3 + 1) // 2, dtype=np.uint8)
    if n_pairs:
        v0 = u[0 : 2 * n_pairs : 2]
        v1 = u[1 : 2 * n_pairs : 2]
        trip = out[: n_pairs * 3].reshape(n_pairs, 3)
        trip[:, 0] = v0 & 0xFF
        trip[:, 1] = ((v0 >> 8) & 0x0F) | (((v1 >> 8) & 0x0F) << 4)
        trip[:, 2] = v1 & 0xFF
    if n % 2:
        last = int(u[-1])
        out[-2] = last & 0xFF
        out[-1] = (last >> 8) & 0x0F
    return out.tobytes()


def draw_polyline(img: np.ndarray, xs: np.ndarray, ys: np.ndarray, line_width: int, value: int = 0) -> None:
    """Draw a connected polyline into a 2-D uint8 image, in place.

    Each segment is stepped max(|dx|, |dy|) + 1 times with floor(+0.5)
    rounding; every step stamps a line_width x line_width square anchored at
    offset -(line_width-1)//2. Out-of-bounds pixels are dropped.
    """
    h, w = img.shape
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    n = len(xs)
    if n == 0:
        return
    if n == 1:
        px = xs
        py = ys
    else:
        dx = xs[1:] - xs[:-1]
        dy = ys[1:] - ys[:-1]
        steps = np.maximum(np.maximum(np.abs(dx), np.abs(dy)), 1)
        counts = steps + 1
        seg = np.repeat(np.arange(n - 1), counts)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        j = np.arange(int(counts.sum())) - np.repeat(starts, counts)
        t = j / steps[seg]
        px = np.floor(xs[:-1][seg] + dx[seg] * t + 0.5).astype(np.int64)
        py = np.floor(ys[:-1][seg] + dy[seg] * t + 0.5).astype(np.int64)
    anchor = (line_width - 1) // 2
    for oy in range(line_width):
        for ox in range(line_width):
            qx = px + (ox - anchor)
            qy = py + (oy - anchor)
            keep = (qx >= 0) & (qx < w) & (qy >= 0) & (qy < h)
            img[qy[keep], qx[keep]] = value


def rotate_nearest(img: np.ndarray, angle_deg: float, fill: int = 255) -> np.ndarray:
    """Rotate an image about its pixel center, nearest-neighbor, constant fill.

    Positive angles rotate content clockwise on screen (y axis points down).
    Accepts (H, W) or (H, W, C) uint8 arrays and returns a new array.
    """
    h, w = img.shape[:2]
    theta = angle_deg * math.pi / 180.0
    c = math.cos(theta)
    s = math.sin(theta)
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    yd, xd = np.mgrid[0:h, 0:w]
    dx = xd - cx
    dy = yd - cy
    sx = np.floor(cx + c * dx + s * dy + 0.5).astype(np.int64)
    sy = np.floor(cy - s * dx + c * dy + 0.5).astype(np.int64)
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    out = np.full_like(img, fill)
    out[inside] = img[sy[inside], sx[inside]]
    return out
