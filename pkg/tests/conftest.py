import numpy as np
import pytest

from detaug.image import ImageBuffer


@pytest.fixture
def make_image():
    """Factory for seeded random test images."""

    def _make(seed: int = 0, width: int = 16, height: int = 16) -> ImageBuffer:
        gen = np.random.default_rng(seed)
        return ImageBuffer(gen.integers(0, 256, size=(height, width, 3), dtype=np.uint8))

    return _make


@pytest.fixture
def gradient_image():
    """Deterministic non-random image: distinct values in every channel."""
    h, w = 16, 16
    arr = np.empty((h, w, 3), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            arr[y, x] = ((x * 16 + y) % 256, (y * 16 + x) % 256, (x * y) % 256)
    return ImageBuffer(arr)
