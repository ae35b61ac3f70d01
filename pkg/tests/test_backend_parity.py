"""Byte-identity between the compiled and NumPy kernel backends.

Every kernel is exercised over random images and a sweep of parameters; a
single differing byte anywhere fails. Skipped entirely when the extension is
not built.
"""

import numpy as np
import pytest

from detaug import backend, ops
from detaug.image import BLUR_KERNEL, SMOOTH_KERNEL, ImageBuffer
from detaug.policy import PolicyConfig, policy_transform
from detaug.rng import RngState
from detaug.spaces import build_space

pytestmark = pytest.mark.skipif(
    "compiled" not in backend.available_backends(),
    reason="compiled backend not built",
)


@pytest.fixture
def both_backends():
    """Runs a callable under each backend and asserts identical pixels."""
    prev = backend.get_backend()

    def compare(fn):
        backend.set_backend("python")
        a = fn()
        backend.set_backend("compiled")
        b = fn()
        assert a == b, "backends disagree"
        return a

    yield compare
    backend.set_backend(prev)


def _rand(seed, w=23, h=17):
    gen = np.random.default_rng(seed)
    return ImageBuffer(gen.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


@pytest.mark.parametrize("bilinear", [False, True])
@pytest.mark.parametrize("degrees", [0.0, 13.7, -135.0, 90.0, 44.999])
def test_rotation_parity(both_backends, degrees, bilinear):
    img = _rand(1)
    both_backends(lambda: ops.warp_affine(
        img, ops.affine_rotation(img.width, img.height, degrees, bilinear=bilinear)))


@pytest.mark.parametrize("bilinear", [False, True])
@pytest.mark.parametrize("axis,amount", [("x", 0.31), ("y", -0.99), ("x", -0.005)])
def test_shear_parity(both_backends, axis, amount, bilinear):
    img = _rand(2)
    both_backends(lambda: ops.warp_affine(
        img, ops.affine_shear(axis, amount, bilinear=bilinear)))


@pytest.mark.parametrize("kernel", [SMOOTH_KERNEL, BLUR_KERNEL])
def test_convolve_parity(both_backends, kernel):
    img = _rand(3)
    both_backends(lambda: ops.convolve(img, kernel))


@pytest.mark.parametrize("fn", [
    lambda img: ops.equalize(img),
    lambda img: ops.autocontrast(img),
    lambda img: ops.invert(img),
    lambda img: ops.solarize(img, 93.5),
    lambda img: ops.posterize(img, 2),
], ids=["equalize", "autocontrast", "invert", "solarize", "posterize"])
def test_lut_parity(both_backends, fn):
    img = _rand(4)
    both_backends(lambda: fn(img))


@pytest.mark.parametrize("kind", ["color", "contrast", "brightness", "sharpness"])
@pytest.mark.parametrize("factor", [0.0, 0.1, 0.5, 1.0, 1.9, 2.0])
def test_enhance_parity(both_backends, kind, factor):
    img = _rand(5)
    both_backends(lambda: ops.enhance(img, kind, factor))


@pytest.mark.parametrize("weight", [0.0, 0.25, 0.4, 1.0])
def test_blend_parity(both_backends, weight):
    a, b = _rand(6), _rand(7)
    both_backends(lambda: ops.blend_pair(a, b, weight))


@pytest.mark.parametrize("kind", ["ta", "ua"])
def test_full_policy_parity(both_backends, kind):
    """End to end: 40 seeded transforms must match across backends."""
    img = _rand(8, 32, 32)
    space = build_space("full" if kind == "ta" else "ua")
    cfg = PolicyConfig(kind, space)
    partners = [_rand(9, 32, 32), _rand(10, 32, 32)]

    def run():
        outs = []
        for i in range(40):
            out, _ = policy_transform(img, cfg, RngState(123).derive(i, 0), partners)
            outs.append(out)
        return outs

    both_backends(run)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        backend.set_backend("gpu")
