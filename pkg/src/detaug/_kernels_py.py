"""NumPy kernel backend.

Reference implementations of the per-pixel kernels. The compiled backend in
``_kernels_c.pyx`` mirrors these float expressions term for term (same
operation order, float64 throughout, no FMA contraction) so both backends
produce byte-identical output; the parity test suite asserts that.

All functions take and return plain uint8 ndarrays; wrapping into ImageBuffer
happens one layer up.
"""

import numpy as np

BACKEND_NAME = "python"


def _round_clip_u8(v):
    # v: float64 array -> uint8; halves away from zero, clamped to [0, 255].
    # Rounding and clamping stay in float64 so non-finite intermediates clamp
    # the same way in both backends.
    r = np.where(v >= 0.0, np.floor(v + 0.5), np.ceil(v - 0.5))
    return np.clip(r, 0.0, 255.0).astype(np.uint8)


def warp_affine(src, coeffs, fill, bilinear):
    """Inverse-map affine warp; samples at output pixel centres."""
    h, w = src.shape[:2]
    a, b, c, d, e, f = coeffs
    px = np.arange(w, dtype=np.float64) + 0.5
    py = np.arange(h, dtype=np.float64) + 0.5
    in_x = a * px[None, :] + b * py[:, None] + c
    in_y = d * px[None, :] + e * py[:, None] + f

    if not bilinear:
        ix = np.floor(in_x).astype(np.int64)
        iy = np.floor(in_y).astype(np.int64)
        inside = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
        out = np.empty((h, w, 3), dtype=np.uint8)
        out[:] = np.asarray(fill, dtype=np.uint8)
        out[inside] = src[iy[inside], ix[inside]]
        return out

    gx = in_x - 0.5
    gy = in_y - 0.5
    x0 = np.floor(gx).astype(np.int64)
    y0 = np.floor(gy).astype(np.int64)
    fx = gx - x0
    fy = gy - y0

    fill_f = np.asarray(fill, dtype=np.float64)

    def fetch(yy, xx):
        valid = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
        res = np.empty((h, w, 3), dtype=np.float64)
        res[:] = fill_f
        res[valid] = src[yy[valid], xx[valid]]
        return res

    v00 = fetch(y0, x0)
    v01 = fetch(y0, x0 + 1)
    v10 = fetch(y0 + 1, x0)
    v11 = fetch(y0 + 1, x0 + 1)
    wx0 = (1.0 - fx)[..., None]
    wx1 = fx[..., None]
    wy0 = (1.0 - fy)[..., None]
    wy1 = fy[..., None]
    v = wy0 * (wx0 * v00 + wx1 * v01) + wy1 * (wx0 * v10 + wx1 * v11)
    return _round_clip_u8(v)


def convolve(src, weights, scale):
    """Exact integer convolution on the interior; border rows/cols copied."""
    k = weights.shape[0]
    r = k // 2
    h, w = src.shape[:2]
    out = src.copy()
    ih = h - 2 * r
    iw = w - 2 * r
    if ih <= 0 or iw <= 0:
        return out
    s64 = src.astype(np.int64)
    acc = np.zeros((ih, iw, 3), dtype=np.int64)
    for dy in range(k):
        for dx in range(k):
            wgt = int(weights[dy, dx])
            if wgt:
                acc += wgt * s64[dy:dy + ih, dx:dx + iw]
    # round(acc / scale), halves away from zero, in pure integer arithmetic
    pos = (2 * acc + scale) // (2 * scale)
    neg = -((-2 * acc + scale) // (2 * scale))
    vals = np.where(acc >= 0, pos, neg)
    out[r:h - r, r:w - r] = np.clip(vals, 0, 255).astype(np.uint8)
    return out


def apply_lut3(src, lut):
    """Per-channel 256-entry lookup; lut has shape (3, 256) uint8."""
    out = np.empty_like(src)
    for ch in range(3):
        out[..., ch] = lut[ch][src[..., ch]]
    return out


def mix_enhance(src, degen, factor):
    """out = round(degen + factor * (src - degen)), clamped to [0, 255]."""
    sf = src.astype(np.float64)
    df = degen.astype(np.float64)
    v = df + factor * (sf - df)
    return _round_clip_u8(v)


def mix_pair(a, b, weight):
    """out = round((1 - weight) * a + weight * b), clamped to [0, 255]."""
    v = (1.0 - weight) * a.astype(np.float64) + weight * b.astype(np.float64)
    return _round_clip_u8(v)


def grayscale(src):
    """Integer luma: (299 R + 587 G + 114 B + 500) // 1000, shape (h, w) uint8."""
    s = src.astype(np.int64)
    l = (299 * s[..., 0] + 587 * s[..., 1] + 114 * s[..., 2] + 500) // 1000
    return l.astype(np.uint8)
