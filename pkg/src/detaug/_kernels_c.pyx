# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Each function mirrors its twin in ``_kernels_py`` term for term: identical
float64 expression structure, round-half-away-from-zero, clamp before the
uint8 cast. Built without FMA contraction so both backends are byte-identical.
"""

from libc.math cimport ceil, floor

import numpy as np

BACKEND_NAME = "compiled"


cdef inline unsigned char _round_clip_u8(double v) nogil:
    cdef double r
    if v >= 0.0:
        r = floor(v + 0.5)
    else:
        r = ceil(v - 0.5)
    if r <= 0.0:
        return 0
    if r >= 255.0:
        return 255
    return <unsigned char>r


cdef inline double _fill_ch(double f0, double f1, double f2, Py_ssize_t ch) nogil:
    if ch == 0:
        return f0
    if ch == 1:
        return f1
    return f2


cdef inline double _sample(const unsigned char[:, :, ::1] src, double yy, double xx,
                           Py_ssize_t ch, double fill_ch, double hd, double wd) nogil:
    # Bounds-check on the doubles before any integer cast so wild coordinates
    # (huge coefficients) clamp to fill instead of overflowing the cast.
    if xx >= 0.0 and xx < wd and yy >= 0.0 and yy < hd:
        return <double>src[<Py_ssize_t>yy, <Py_ssize_t>xx, ch]
    return fill_ch


def warp_affine(const unsigned char[:, :, ::1] src, coeffs, fill, bint bilinear):
    """Inverse-map affine warp; samples at output pixel centres."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef double a = coeffs[0]
    cdef double b = coeffs[1]
    cdef double c = coeffs[2]
    cdef double d = coeffs[3]
    cdef double e = coeffs[4]
    cdef double f = coeffs[5]
    cdef unsigned char f0 = fill[0]
    cdef unsigned char f1 = fill[1]
    cdef unsigned char f2 = fill[2]
    cdef double fd0 = <double>f0
    cdef double fd1 = <double>f1
    cdef double fd2 = <double>f2

    out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr

    cdef Py_ssize_t x, y, ix, iy
    cdef double px, py, in_x, in_y, gx, gy, x0d, y0d, fx, fy
    cdef double wx0, wx1, wy0, wy1, v00, v01, v10, v11, v
    cdef Py_ssize_t ch
    cdef double hd = <double>h
    cdef double wd = <double>w

    with nogil:
        if not bilinear:
            for y in range(h):
                py = <double>y + 0.5
                for x in range(w):
                    px = <double>x + 0.5
                    in_x = a * px + b * py + c
                    in_y = d * px + e * py + f
                    if in_x >= 0.0 and in_x < wd and in_y >= 0.0 and in_y < hd:
                        ix = <Py_ssize_t>floor(in_x)
                        iy = <Py_ssize_t>floor(in_y)
                        out[y, x, 0] = src[iy, ix, 0]
                        out[y, x, 1] = src[iy, ix, 1]
                        out[y, x, 2] = src[iy, ix, 2]
                    else:
                        out[y, x, 0] = f0
                        out[y, x, 1] = f1
                        out[y, x, 2] = f2
        else:
            for y in range(h):
                py = <double>y + 0.5
                for x in range(w):
                    px = <double>x + 0.5
                    in_x = a * px + b * py + c
                    in_y = d * px + e * py + f
                    gx = in_x - 0.5
                    gy = in_y - 0.5
                    x0d = floor(gx)
                    y0d = floor(gy)
                    fx = gx - x0d
                    fy = gy - y0d
                    wx0 = 1.0 - fx
                    wx1 = fx
                    wy0 = 1.0 - fy
                    wy1 = fy
                    for ch in range(3):
                        v00 = _sample(src, y0d, x0d, ch, _fill_ch(fd0, fd1, fd2, ch), hd, wd)
                        v01 = _sample(src, y0d, x0d + 1.0, ch, _fill_ch(fd0, fd1, fd2, ch), hd, wd)
                        v10 = _sample(src, y0d + 1.0, x0d, ch, _fill_ch(fd0, fd1, fd2, ch), hd, wd)
                        v11 = _sample(src, y0d + 1.0, x0d + 1.0, ch, _fill_ch(fd0, fd1, fd2, ch), hd, wd)
                        v = wy0 * (wx0 * v00 + wx1 * v01) + wy1 * (wx0 * v10 + wx1 * v11)
                        out[y, x, ch] = _round_clip_u8(v)
    return out_arr


def convolve(const unsigned char[:, :, ::1] src, const long long[:, ::1] weights,
             long long scale):
    """Exact integer convolution on the interior; border rows/cols copied."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t k = weights.shape[0]
    cdef Py_ssize_t r = k // 2

    out_arr = np.asarray(src).copy()
    cdef unsigned char[:, :, ::1] out = out_arr
    if h - 2 * r <= 0 or w - 2 * r <= 0:
        return out_arr

    cdef Py_ssize_t x, y, dy, dx, ch
    cdef long long acc, wgt, val
    with nogil:
        for y in range(r, h - r):
            for x in range(r, w - r):
                for ch in range(3):
                    acc = 0
                    for dy in range(k):
                        for dx in range(k):
                            wgt = weights[dy, dx]
                            if wgt != 0:
                                acc += wgt * <long long>src[y - r + dy, x - r + dx, ch]
                    if acc >= 0:
                        val = (2 * acc + scale) // (2 * scale)
                    else:
                        val = -((-2 * acc + scale) // (2 * scale))
                    if val < 0:
                        val = 0
                    elif val > 255:
                        val = 255
                    out[y, x, ch] = <unsigned char>val
    return out_arr


def apply_lut3(const unsigned char[:, :, ::1] src, const unsigned char[:, ::1] lut):
    """Per-channel 256-entry lookup; lut has shape (3, 256) uint8."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y
    with nogil:
        for y in range(h):
            for x in range(w):
                out[y, x, 0] = lut[0, src[y, x, 0]]
                out[y, x, 1] = lut[1, src[y, x, 1]]
                out[y, x, 2] = lut[2, src[y, x, 2]]
    return out_arr


def mix_enhance(const unsigned char[:, :, ::1] src, const unsigned char[:, :, ::1] degen,
                double factor):
    """out = round(degen + factor * (src - degen)), clamped to [0, 255]."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y, ch
    cdef double sf, df, v
    with nogil:
        for y in range(h):
            for x in range(w):
                for ch in range(3):
                    sf = <double>src[y, x, ch]
                    df = <double>degen[y, x, ch]
                    v = df + factor * (sf - df)
                    out[y, x, ch] = _round_clip_u8(v)
    return out_arr


def mix_pair(const unsigned char[:, :, ::1] a, const unsigned char[:, :, ::1] b,
             double weight):
    """out = round((1 - weight) * a + weight * b), clamped to [0, 255]."""
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y, ch
    cdef double omw = 1.0 - weight
    cdef double v
    with nogil:
        for y in range(h):
            for x in range(w):
                for ch in range(3):
                    v = omw * <double>a[y, x, ch] + weight * <double>b[y, x, ch]
                    out[y, x, ch] = _round_clip_u8(v)
    return out_arr


def grayscale(const unsigned char[:, :, ::1] src):
    """Integer luma: (299 R + 587 G + 114 B + 500) // 1000, shape (h, w) uint8."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    out_arr = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t x, y
    cdef long long l
    with nogil:
        for y in range(h):
            for x in range(w):
                l = (299 * <long long>src[y, x, 0] + 587 * <long long>src[y, x, 1]
                     + 114 * <long long>src[y, x, 2] + 500) // 1000
                out[y, x] = <unsigned char>l
    return out_arr
