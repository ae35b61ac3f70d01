"""Deterministic pixel operations on :class:`ImageBuffer`.

Every function is pure: same inputs, byte-identical output, regardless of
kernel backend, process, or platform. Heavy per-pixel loops run in the
selected kernel backend; LUT construction and geometry bookkeeping happen
here in exact integer (or carefully ordered float64) arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .backend import kernels
from .image import (
    GRAY_FILL,
    AffineParams,
    ImageBuffer,
    Kernel,
    SMOOTH_KERNEL,
    round_half_away,
    _as_rgb,
)

PIXEL_MAP_KINDS = ("invert", "solarize", "posterize")
ENHANCE_KINDS = ("color", "contrast", "brightness", "sharpness")
FLIP_AXES = ("horizontal", "vertical")


# ---------------------------------------------------------------------------
# geometry

def warp_affine(img: ImageBuffer, params: AffineParams) -> ImageBuffer:
    """Resample ``img`` through an inverse-mapping affine transform.

    Output pixel (x, y) samples the source at ``matrix @ (x+0.5, y+0.5, 1)``;
    nearest-neighbour takes ``floor`` of the source coordinate, bilinear
    blends the four neighbours of the half-open grid. Out-of-bounds samples
    take ``params.fill``. The identity matrix reproduces the input exactly
    under both interpolations.
    """
    out = kernels().warp_affine(img.array, params.matrix, params.fill, params.bilinear)
    return ImageBuffer._wrap(out)


def affine_rotation(width: int, height: int, degrees: float, *, fill=GRAY_FILL,
                    bilinear: bool = False) -> AffineParams:
    """Rotation about the image centre (w/2, h/2).

    Positive angles turn the content counterclockwise on screen
    (x right, y down).
    """
    t = math.radians(float(degrees))
    cos_t = math.cos(t)
    sin_t = math.sin(t)
    cx = width / 2.0
    cy = height / 2.0
    return AffineParams(
        (
            cos_t, -sin_t, cx - cos_t * cx + sin_t * cy,
            sin_t, cos_t, cy - sin_t * cx - cos_t * cy,
        ),
        fill=fill,
        bilinear=bilinear,
    )


def affine_shear(axis: str, factor: float, *, fill=GRAY_FILL,
                 bilinear: bool = False) -> AffineParams:
    """Shear along x or y, uncentred (anchored at the origin)."""
    s = float(factor)
    if axis == "x":
        matrix = (1.0, s, 0.0, 0.0, 1.0, 0.0)
    elif axis == "y":
        matrix = (1.0, 0.0, 0.0, s, 1.0, 0.0)
    else:
        raise ValueError(f"shear axis must be 'x' or 'y', got {axis!r}")
    return AffineParams(matrix, fill=fill, bilinear=bilinear)


def affine_translation(axis: str, pixels: int, *, fill=GRAY_FILL,
                       bilinear: bool = False) -> AffineParams:
    """Integer-pixel translation; positive moves content toward +x / +y."""
    t = float(int(pixels))
    if axis == "x":
        matrix = (1.0, 0.0, -t, 0.0, 1.0, 0.0)
    elif axis == "y":
        matrix = (1.0, 0.0, 0.0, 0.0, 1.0, -t)
    else:
        raise ValueError(f"translation axis must be 'x' or 'y', got {axis!r}")
    return AffineParams(matrix, fill=fill, bilinear=bilinear)


# ---------------------------------------------------------------------------
# convolution

def convolve(img: ImageBuffer, kernel: Kernel) -> ImageBuffer:
    """Integer convolution with exact rounding; borders are copied unchanged.

    Only pixels whose full neighbourhood lies inside the image are filtered;
    the outer ``size // 2`` border keeps its source values, so constant
    images are fixed points of any weight-sum == scale kernel.
    """
    w = np.asarray(kernel.weights, dtype=np.int64).reshape(kernel.size, kernel.size)
    out = kernels().convolve(img.array, w, kernel.scale)
    return ImageBuffer._wrap(out)


# ---------------------------------------------------------------------------
# histogram ops

def _identity_lut() -> np.ndarray:
    return np.arange(256, dtype=np.uint8)


def _equalize_lut(hist: np.ndarray) -> np.ndarray:
    # hist: (256,) int64 counts for one channel
    occupied = np.flatnonzero(hist)
    if occupied.size <= 1:
        return _identity_lut()
    total = int(hist.sum())
    step = (total - int(hist[occupied[-1]])) // 255
    if step == 0:
        return _identity_lut()
    cum_below = np.concatenate(([0], np.cumsum(hist[:-1], dtype=np.int64)))
    lut = (step // 2 + cum_below) // step
    return np.clip(lut, 0, 255).astype(np.uint8)


def equalize(img: ImageBuffer) -> ImageBuffer:
    """Histogram equalization, each channel independently.

    Uses the classic integer LUT: ``step = (pixels - count_of_highest_bin) // 255``,
    ``lut[i] = clamp((step//2 + cumulative_below_i) // step)``. Channels that
    are constant, or whose step collapses to zero, pass through unchanged.
    """
    arr = img.array
    lut = np.empty((3, 256), dtype=np.uint8)
    for ch in range(3):
        hist = np.bincount(arr[..., ch].ravel(), minlength=256).astype(np.int64)
        lut[ch] = _equalize_lut(hist)
    return ImageBuffer._wrap(kernels().apply_lut3(arr, lut))


def _autocontrast_lut(lo: int, hi: int) -> np.ndarray:
    if hi <= lo:
        return _identity_lut()
    v = (np.arange(256, dtype=np.float64) - lo) * 255.0 / (hi - lo)
    r = np.where(v >= 0.0, np.floor(v + 0.5), np.ceil(v - 0.5))
    return np.clip(r, 0.0, 255.0).astype(np.uint8)


def autocontrast(img: ImageBuffer) -> ImageBuffer:
    """Stretch each channel's [min, max] linearly to [0, 255].

    Remapped as ``round(255 * (i - lo) / (hi - lo))`` with halves away from
    zero; constant channels pass through unchanged.
    """
    arr = img.array
    lut = np.empty((3, 256), dtype=np.uint8)
    for ch in range(3):
        channel = arr[..., ch]
        lut[ch] = _autocontrast_lut(int(channel.min()), int(channel.max()))
    return ImageBuffer._wrap(kernels().apply_lut3(arr, lut))


# ---------------------------------------------------------------------------
# point ops

def pixel_map(img: ImageBuffer, kind: str, *, threshold: float | None = None,
              bits: int | None = None) -> ImageBuffer:
    """Pointwise intensity remap applied to all channels alike.

    * ``invert``: i -> 255 - i
    * ``solarize``: invert pixels with i >= threshold (real-valued threshold;
      256 inverts nothing, 0 inverts everything)
    * ``posterize``: keep the top ``bits`` bits of each value, 1..8
    """
    idx = np.arange(256, dtype=np.int64)
    if kind == "invert":
        if threshold is not None or bits is not None:
            raise ValueError("invert takes no parameter")
        lut = 255 - idx
    elif kind == "solarize":
        if threshold is None:
            raise ValueError("solarize needs a threshold")
        t = float(threshold)
        if not (0.0 <= t <= 256.0):
            raise ValueError(f"solarize threshold must be in [0, 256], got {t}")
        lut = np.where(idx >= t, 255 - idx, idx)
    elif kind == "posterize":
        if bits is None:
            raise ValueError("posterize needs a bit count")
        b = int(bits)
        if not 1 <= b <= 8:
            raise ValueError(f"posterize bits must be in 1..8, got {bits}")
        mask = (0xFF << (8 - b)) & 0xFF
        lut = idx & mask
    else:
        raise ValueError(f"unknown pixel map {kind!r}; expected one of {PIXEL_MAP_KINDS}")
    lut3 = np.broadcast_to(lut.astype(np.uint8), (3, 256)).copy()
    return ImageBuffer._wrap(kernels().apply_lut3(img.array, lut3))


def invert(img: ImageBuffer) -> ImageBuffer:
    return pixel_map(img, "invert")


def solarize(img: ImageBuffer, threshold: float) -> ImageBuffer:
    return pixel_map(img, "solarize", threshold=threshold)


def posterize(img: ImageBuffer, bits: int) -> ImageBuffer:
    return pixel_map(img, "posterize", bits=bits)


# ---------------------------------------------------------------------------
# enhancement blends

def enhance(img: ImageBuffer, kind: str, factor: float) -> ImageBuffer:
    """Blend toward (factor < 1) or away from (factor > 1) a degenerate image.

    ``out = round(degenerate + factor * (img - degenerate))`` in float64,
    clamped. factor 1 is exact identity for every kind. Degenerates:

    * ``color``: the integer-luma grayscale, replicated to three channels
    * ``contrast``: constant image at the rounded mean of that grayscale
    * ``brightness``: black
    * ``sharpness``: the heavy-centre 3x3 smoothing convolution
    """
    f = float(factor)
    if not (math.isfinite(f) and f >= 0.0):
        raise ValueError(f"enhance factor must be finite and >= 0, got {factor}")
    arr = img.array
    k = kernels()
    if kind == "brightness":
        degen = np.zeros_like(arr)
    elif kind == "color":
        luma = np.asarray(k.grayscale(arr))
        degen = np.ascontiguousarray(np.repeat(luma[..., None], 3, axis=2))
    elif kind == "contrast":
        luma = np.asarray(k.grayscale(arr))
        n = luma.size
        mean = (2 * int(luma.sum(dtype=np.int64)) + n) // (2 * n)
        degen = np.full_like(arr, mean)
    elif kind == "sharpness":
        w = np.asarray(SMOOTH_KERNEL.weights, dtype=np.int64).reshape(3, 3)
        degen = np.asarray(k.convolve(arr, w, SMOOTH_KERNEL.scale))
    else:
        raise ValueError(f"unknown enhance kind {kind!r}; expected one of {ENHANCE_KINDS}")
    return ImageBuffer._wrap(k.mix_enhance(arr, degen, f))


# ---------------------------------------------------------------------------
# occlusion and blending

def cutout(img: ImageBuffer, center: tuple[int, int], *, frac: float | None = None,
           side: int | None = None, fill=GRAY_FILL) -> ImageBuffer:
    """Overwrite a square region with the fill colour.

    Exactly one of ``frac`` (side = round(frac * min(w, h))) or ``side``
    (absolute pixels) selects the size. The square is anchored so that
    ``center`` is its middle: [c - side//2, c - side//2 + side) per axis,
    clipped to the image; a zero side is a no-op.
    """
    if (frac is None) == (side is None):
        raise ValueError("cutout takes exactly one of frac or side")
    w, h = img.width, img.height
    cx, cy = int(center[0]), int(center[1])
    if not (0 <= cx < w and 0 <= cy < h):
        raise ValueError(f"cutout centre {center!r} outside {w}x{h} image")
    if frac is not None:
        f = float(frac)
        if not (0.0 <= f <= 1.0):
            raise ValueError(f"cutout frac must be in [0, 1], got {frac}")
        s = round_half_away(f * min(w, h))
    else:
        s = int(side)
        if s < 0:
            raise ValueError(f"cutout side must be >= 0, got {side}")
    x0 = max(0, cx - s // 2)
    x1 = min(w, cx - s // 2 + s)
    y0 = max(0, cy - s // 2)
    y1 = min(h, cy - s // 2 + s)
    if x1 <= x0 or y1 <= y0:
        return img
    arr = img.array.copy()
    arr[y0:y1, x0:x1] = _as_rgb(fill)
    return ImageBuffer._wrap(arr)


def cutout_region(width: int, height: int, center: tuple[int, int], side: int):
    """The clipped (x0, x1, y0, y1) a cutout of ``side`` would overwrite."""
    cx, cy = int(center[0]), int(center[1])
    s = int(side)
    return (
        max(0, cx - s // 2),
        min(width, cx - s // 2 + s),
        max(0, cy - s // 2),
        min(height, cy - s // 2 + s),
    )


def blend_pair(a: ImageBuffer, b: ImageBuffer, weight: float) -> ImageBuffer:
    """Pixelwise ``round((1 - weight) * a + weight * b)``; dims must match."""
    wgt = float(weight)
    if not (0.0 <= wgt <= 1.0):
        raise ValueError(f"blend weight must be in [0, 1], got {weight}")
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"blend pair dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    return ImageBuffer._wrap(kernels().mix_pair(a.array, b.array, wgt))


# ---------------------------------------------------------------------------
# flips and padding

def flip(img: ImageBuffer, axis: str) -> ImageBuffer:
    """Mirror the image; 'horizontal' swaps left/right, 'vertical' top/bottom."""
    if axis == "horizontal":
        out = img.array[:, ::-1]
    elif axis == "vertical":
        out = img.array[::-1, :]
    else:
        raise ValueError(f"flip axis must be one of {FLIP_AXES}, got {axis!r}")
    return ImageBuffer._wrap(np.ascontiguousarray(out))


def pad_and_crop(img: ImageBuffer, pad: int, crop_origin: tuple[int, int]) -> ImageBuffer:
    """Zero-pad by ``pad`` on every side, then crop back to the original size
    with the crop's top-left at ``crop_origin`` in padded coordinates.

    Origin components must lie in [0, 2*pad]; pad 0 with origin (0, 0) is
    exact identity.
    """
    p = int(pad)
    if p < 0:
        raise ValueError(f"pad must be >= 0, got {pad}")
    ox, oy = int(crop_origin[0]), int(crop_origin[1])
    if not (0 <= ox <= 2 * p and 0 <= oy <= 2 * p):
        raise ValueError(f"crop origin {crop_origin!r} outside [0, {2 * p}]^2")
    if p == 0:
        return img
    h, w = img.height, img.width
    padded = np.zeros((h + 2 * p, w + 2 * p, 3), dtype=np.uint8)
    padded[p:p + h, p:p + w] = img.array
    out = padded[oy:oy + h, ox:ox + w]
    return ImageBuffer._wrap(np.ascontiguousarray(out))
