"""8-bit RGB raster value type and the arithmetic conventions shared by every op.

All image operations in this package consume and produce :class:`ImageBuffer`
values. A buffer is an immutable (height, width, 3) uint8 array in row-major
RGB order; ops never mutate their input, so buffers can be shared freely
between threads, processes, and replay records.

Conventions that every kernel follows:

* Rounding is round-half-away-from-zero everywhere a real value becomes a
  pixel: ``floor(v + 0.5)`` for ``v >= 0``, ``ceil(v - 0.5)`` otherwise.
* Geometry ops sample at output pixel centers ``(x + 0.5, y + 0.5)``;
  nearest-neighbour sampling takes ``floor`` of the source coordinate.
* Out-of-bounds samples and cutout regions use a configurable fill colour,
  mid-gray by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Default fill for affine out-of-bounds samples and cutout regions.
GRAY_FILL = (128, 128, 128)


def round_half_away(value: float) -> int:
    """Round to the nearest integer with halves going away from zero."""
    if value >= 0:
        return int(math.floor(value + 0.5))
    return int(math.ceil(value - 0.5))


def _as_rgb(color) -> tuple[int, int, int]:
    rgb = tuple(int(c) for c in color)
    if len(rgb) != 3 or any(c < 0 or c > 255 for c in rgb):
        raise ValueError(f"fill colour must be three values in [0, 255], got {color!r}")
    return rgb


class ImageBuffer:
    """Immutable 8-bit RGB image with value semantics.

    Wraps a read-only C-contiguous ``(h, w, 3)`` uint8 array. Equality is
    pixel equality. Because instances are immutable, functions that would
    return an unchanged image may return ``self``.
    """

    __slots__ = ("_arr",)

    def __init__(self, array) -> None:
        arr = np.array(array, dtype=np.uint8, copy=True, order="C")
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        arr.setflags(write=False)
        self._arr = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "ImageBuffer":
        # Internal: adopt a freshly allocated C-contiguous uint8 array without copying.
        self = object.__new__(cls)
        arr.setflags(write=False)
        self._arr = arr
        return self

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int) -> "ImageBuffer":
        """Build a buffer from packed RGB bytes, row-major, 3 bytes per pixel."""
        expected = width * height * 3
        if len(data) != expected:
            raise ValueError(f"need {expected} bytes for {width}x{height} RGB, got {len(data)}")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3).copy()
        return cls._wrap(arr)

    @classmethod
    def full(cls, width: int, height: int, color=(0, 0, 0)) -> "ImageBuffer":
        """Solid-colour image."""
        rgb = _as_rgb(color)
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[:] = rgb
        return cls._wrap(arr)

    @property
    def width(self) -> int:
        return self._arr.shape[1]

    @property
    def height(self) -> int:
        return self._arr.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the pixel data."""
        return self._arr

    def tobytes(self) -> bytes:
        return self._arr.tobytes()

    def __reduce__(self):
        # re-enter __init__ on unpickle so the read-only invariant holds
        return (ImageBuffer, (np.asarray(self._arr),))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self._arr.shape == other._arr.shape and bool(
            np.array_equal(self._arr, other._arr)
        )

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self) -> str:
        return f"ImageBuffer({self.width}x{self.height})"


@dataclass(frozen=True)
class AffineParams:
    """Inverse-mapping affine transform plus sampling options.

    ``matrix`` is ``(a, b, c, d, e, f)``; for each output pixel the source
    location is sampled at::

        in_x = a * (x + 0.5) + b * (y + 0.5) + c
        in_y = d * (x + 0.5) + e * (y + 0.5) + f

    ``bilinear`` selects bilinear interpolation instead of the default
    nearest-neighbour. Samples falling outside the source use ``fill``.
    """

    matrix: tuple[float, float, float, float, float, float]
    fill: tuple[int, int, int] = GRAY_FILL
    bilinear: bool = False

    def __post_init__(self):
        m = tuple(float(v) for v in self.matrix)
        if len(m) != 6:
            raise ValueError("affine matrix needs exactly 6 coefficients")
        if not all(math.isfinite(v) for v in m):
            raise ValueError(f"affine coefficients must be finite, got {m}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "fill", _as_rgb(self.fill))


@dataclass(frozen=True)
class Kernel:
    """Integer convolution kernel with an exact divisor.

    ``weights`` is row-major ``size * size`` integers; each interior output
    pixel is ``round(sum(w * px) / scale)`` computed in exact integer
    arithmetic. Border pixels are copied from the source unchanged.
    """

    size: int
    weights: tuple[int, ...]
    scale: int

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be odd and positive, got {self.size}")
        if len(self.weights) != self.size * self.size:
            raise ValueError("kernel weights must be size*size entries")
        if self.scale <= 0:
            raise ValueError("kernel scale must be a positive integer")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))


# 3x3 smoothing kernel: heavy centre, unit ring, divisor 13.
SMOOTH_KERNEL = Kernel(3, (1, 1, 1, 1, 5, 1, 1, 1, 1), 13)

# 5x5 blur kernel: unit outer ring, hollow 3x3 interior, divisor 16.
BLUR_KERNEL = Kernel(
    5,
    (
        1, 1, 1, 1, 1,
        1, 0, 0, 0, 1,
        1, 0, 0, 0, 1,
        1, 0, 0, 0, 1,
        1, 1, 1, 1, 1,
    ),
    16,
)
