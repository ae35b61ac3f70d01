"""Pixel-op tests against independent scalar oracles and hand-computed values.

The oracles below re-derive each op's contract with plain Python loops and
integer/float arithmetic, sharing no code with the kernel backends.
"""

import math

import numpy as np
import pytest

from detaug import ops
from detaug.image import (
    BLUR_KERNEL,
    GRAY_FILL,
    SMOOTH_KERNEL,
    AffineParams,
    ImageBuffer,
    Kernel,
    round_half_away,
)


# ---------------------------------------------------------------------------
# scalar oracles

def oracle_round(v):
    return math.floor(v + 0.5) if v >= 0 else math.ceil(v - 0.5)


def oracle_warp(img, params):
    """Per-pixel inverse mapping with plain Python floats."""
    a, b, c, d, e, f = params.matrix
    src = img.array
    h, w = src.shape[:2]
    out = [[None] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            px, py = x + 0.5, y + 0.5
            in_x = a * px + b * py + c
            in_y = d * px + e * py + f
            if not params.bilinear:
                ix, iy = math.floor(in_x), math.floor(in_y)
                if 0 <= ix < w and 0 <= iy < h:
                    out[y][x] = [int(v) for v in src[iy, ix]]
                else:
                    out[y][x] = list(params.fill)
            else:
                gx, gy = in_x - 0.5, in_y - 0.5
                x0, y0 = math.floor(gx), math.floor(gy)
                fx, fy = gx - x0, gy - y0
                px_out = []
                for ch in range(3):
                    def at(yy, xx):
                        if 0 <= xx < w and 0 <= yy < h:
                            return float(src[yy, xx, ch])
                        return float(params.fill[ch])

                    v = (1.0 - fy) * ((1.0 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) \
                        + fy * ((1.0 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1))
                    px_out.append(min(255, max(0, oracle_round(v))))
                out[y][x] = px_out
    return np.asarray(out, dtype=np.uint8)


def oracle_convolve(img, kernel):
    """Plain-loop integer convolution, border copied."""
    src = img.array
    h, w = src.shape[:2]
    k, r = kernel.size, kernel.size // 2
    out = np.array(src, copy=True)
    for y in range(r, h - r):
        for x in range(r, w - r):
            for ch in range(3):
                acc = 0
                for dy in range(k):
                    for dx in range(k):
                        acc += kernel.weights[dy * k + dx] * int(src[y - r + dy, x - r + dx, ch])
                val = oracle_round(acc / kernel.scale)
                out[y, x, ch] = min(255, max(0, val))
    return out


def oracle_equalize_lut(counts):
    """Histogram-equalization LUT from a 256-entry count list."""
    occupied = [i for i, c in enumerate(counts) if c]
    if len(occupied) <= 1:
        return list(range(256))
    step = (sum(counts) - counts[occupied[-1]]) // 255
    if step == 0:
        return list(range(256))
    lut = []
    cum = 0
    for i in range(256):
        lut.append(min(255, max(0, (step // 2 + cum) // step)))
        cum += counts[i]
    return lut


def oracle_autocontrast_lut(lo, hi):
    if hi <= lo:
        return list(range(256))
    return [min(255, max(0, oracle_round((i - lo) * 255 / (hi - lo)))) for i in range(256)]


def oracle_grayscale(r, g, b):
    return (299 * r + 587 * g + 114 * b + 500) // 1000


# ---------------------------------------------------------------------------
# rounding convention

@pytest.mark.parametrize("value,expected", [
    (0.0, 0), (0.4, 0), (0.5, 1), (1.5, 2), (2.5, 3),
    (-0.4, 0), (-0.5, -1), (-1.5, -2), (6.4, 6), (127.5, 128),
])
def test_round_half_away(value, expected):
    assert round_half_away(value) == expected


# ---------------------------------------------------------------------------
# warp_affine

@pytest.mark.parametrize("bilinear", [False, True])
def test_warp_identity_is_exact(make_image, bilinear):
    img = make_image(3, 13, 9)
    params = AffineParams((1.0, 0.0, 0.0, 0.0, 1.0, 0.0), bilinear=bilinear)
    assert ops.warp_affine(img, params) == img


@pytest.mark.parametrize("bilinear", [False, True])
def test_warp_translate_by_width_is_all_fill(make_image, bilinear):
    img = make_image(4, 12, 10)
    params = ops.affine_translation("x", img.width, bilinear=bilinear)
    out = ops.warp_affine(img, params)
    assert np.all(out.array == np.asarray(GRAY_FILL, dtype=np.uint8))


def test_warp_integer_translation_shifts_pixels(make_image):
    img = make_image(5, 10, 8)
    out = ops.warp_affine(img, ops.affine_translation("x", 3))
    # content moved right by 3; left 3 columns are fill
    assert np.array_equal(out.array[:, 3:], img.array[:, :-3])
    assert np.all(out.array[:, :3] == np.asarray(GRAY_FILL, dtype=np.uint8))


@pytest.mark.parametrize("degrees", [30.0, -135.0, 90.0, 7.3])
@pytest.mark.parametrize("bilinear", [False, True])
def test_warp_rotation_matches_oracle(make_image, degrees, bilinear):
    img = make_image(6, 32, 32)
    params = ops.affine_rotation(img.width, img.height, degrees, bilinear=bilinear)
    assert np.array_equal(ops.warp_affine(img, params).array, oracle_warp(img, params))


@pytest.mark.parametrize("axis,factor", [("x", 0.3), ("y", -0.99), ("x", -0.15)])
def test_warp_shear_matches_oracle(make_image, axis, factor):
    img = make_image(7, 20, 14)
    params = ops.affine_shear(axis, factor)
    assert np.array_equal(ops.warp_affine(img, params).array, oracle_warp(img, params))


def test_warp_rotation_90_moves_bottom_to_right():
    # positive angle turns content counterclockwise on screen (y down)
    arr = np.zeros((9, 9, 3), dtype=np.uint8)
    arr[8, 4] = (250, 0, 0)  # bottom-centre marker
    img = ImageBuffer(arr)
    out = ops.warp_affine(img, ops.affine_rotation(9, 9, 90.0, fill=(0, 0, 0)))
    assert tuple(out.array[4, 8]) == (250, 0, 0)


def test_warp_rejects_non_finite_matrix():
    with pytest.raises(ValueError):
        AffineParams((1.0, 0.0, float("nan"), 0.0, 1.0, 0.0))


# ---------------------------------------------------------------------------
# convolve

def test_convolve_identity_kernel(make_image):
    img = make_image(9, 9, 7)
    assert ops.convolve(img, Kernel(1, (1,), 1)) == img


@pytest.mark.parametrize("kernel", [SMOOTH_KERNEL, BLUR_KERNEL])
def test_convolve_constant_fixed_point(kernel):
    img = ImageBuffer.full(11, 9, (77, 77, 77))
    assert ops.convolve(img, kernel) == img


@pytest.mark.parametrize("kernel", [SMOOTH_KERNEL, BLUR_KERNEL])
def test_convolve_matches_oracle(make_image, kernel):
    img = make_image(10, 12, 11)
    assert np.array_equal(ops.convolve(img, kernel).array, oracle_convolve(img, kernel))


def test_convolve_checkerboard_smooth_hand_value():
    # 5x5 checkerboard of 0/255; centre pixel of a 0-cell under the smooth
    # kernel: (4 corners * 255 * 1 + 4 edges * 0 + centre 0 * 5) / 13
    arr = np.zeros((5, 5, 3), dtype=np.uint8)
    for y in range(5):
        for x in range(5):
            if (x + y) % 2:
                arr[y, x] = 255
    out = ops.convolve(ImageBuffer(arr), SMOOTH_KERNEL)
    assert tuple(out.array[2, 2]) == (round_half_away(4 * 255 / 13),) * 3
    # border untouched
    assert np.array_equal(out.array[0], arr[0])


def test_convolve_small_image_is_border_only():
    img = ImageBuffer(np.arange(2 * 2 * 3, dtype=np.uint8).reshape(2, 2, 3))
    assert ops.convolve(img, BLUR_KERNEL) == img  # no 5x5 interior: all border


# ---------------------------------------------------------------------------
# equalize

def test_equalize_constant_unchanged():
    img = ImageBuffer.full(8, 8, (42, 200, 0))
    assert ops.equalize(img) == img


def test_equalize_two_value_histogram_hand_case():
    # 16x16 channel, half 0 and half 255:
    # step = (256 - 128) // 255 = 0 -> channel passes through unchanged
    arr = np.zeros((16, 16, 3), dtype=np.uint8)
    arr[:8] = 255
    img = ImageBuffer(arr)
    assert ops.equalize(img) == img


def test_equalize_matches_oracle(make_image):
    img = make_image(11, 16, 16)
    expected = np.empty_like(img.array)
    for ch in range(3):
        counts = [0] * 256
        for v in img.array[..., ch].ravel():
            counts[int(v)] += 1
        lut = oracle_equalize_lut(counts)
        for y in range(img.height):
            for x in range(img.width):
                expected[y, x, ch] = lut[img.array[y, x, ch]]
    assert np.array_equal(ops.equalize(img).array, expected)


def test_equalize_channels_independent(make_image):
    img = make_image(12, 10, 10)
    rolled = ImageBuffer(np.roll(img.array, 1, axis=2))
    # permuting channels commutes with per-channel equalization
    assert np.array_equal(
        ops.equalize(rolled).array, np.roll(ops.equalize(img).array, 1, axis=2)
    )


# ---------------------------------------------------------------------------
# autocontrast

def test_autocontrast_constant_unchanged():
    img = ImageBuffer.full(6, 6, (9, 9, 9))
    assert ops.autocontrast(img) == img


def test_autocontrast_full_range_identity(make_image):
    arr = np.array(make_image(13, 16, 16).array, copy=True)
    arr[0, 0] = (0, 0, 0)
    arr[0, 1] = (255, 255, 255)
    img = ImageBuffer(arr)
    assert ops.autocontrast(img) == img


def test_autocontrast_midpoint_rounds_half_up():
    # channel range [10, 20]: 15 -> round(255 * 5 / 10) = round(127.5) = 128
    arr = np.full((4, 4, 3), 15, dtype=np.uint8)
    arr[0, 0] = 10
    arr[0, 1] = 20
    out = ops.autocontrast(ImageBuffer(arr))
    assert tuple(out.array[1, 1]) == (128, 128, 128)
    assert tuple(out.array[0, 0]) == (0, 0, 0)
    assert tuple(out.array[0, 1]) == (255, 255, 255)


def test_autocontrast_matches_oracle(make_image):
    img = make_image(14, 16, 16)
    expected = np.empty_like(img.array)
    for ch in range(3):
        channel = img.array[..., ch]
        lut = oracle_autocontrast_lut(int(channel.min()), int(channel.max()))
        for y in range(img.height):
            for x in range(img.width):
                expected[y, x, ch] = lut[channel[y, x]]
    assert np.array_equal(ops.autocontrast(img).array, expected)


# ---------------------------------------------------------------------------
# pixel_map

def test_invert_values(gradient_image):
    out = ops.invert(gradient_image)
    assert np.array_equal(out.array, 255 - gradient_image.array)
    assert ops.invert(out) == gradient_image


def test_solarize_threshold_256_is_identity(make_image):
    img = make_image(15)
    assert ops.solarize(img, 256.0) == img


def test_solarize_threshold_zero_equals_invert(make_image):
    img = make_image(16)
    assert ops.solarize(img, 0.0) == ops.invert(img)


def test_solarize_threshold_boundary_inclusive():
    img = ImageBuffer.full(2, 2, (100, 99, 101))
    out = ops.solarize(img, 100.0)
    # i >= threshold inverts: 100 -> 155, 99 stays, 101 -> 154
    assert tuple(out.array[0, 0]) == (155, 99, 154)


def test_posterize_8_bits_identity(make_image):
    img = make_image(17)
    assert ops.posterize(img, 8) == img


def test_posterize_masks_low_bits():
    img = ImageBuffer.full(2, 2, (130, 255, 1))
    assert tuple(ops.posterize(img, 1).array[0, 0]) == (128, 128, 0)
    assert tuple(ops.posterize(img, 4).array[0, 0]) == (128, 240, 0)


def test_pixel_map_rejects_bad_args(make_image):
    img = make_image(18)
    with pytest.raises(ValueError):
        ops.pixel_map(img, "solarize")
    with pytest.raises(ValueError):
        ops.pixel_map(img, "posterize", bits=0)
    with pytest.raises(ValueError):
        ops.pixel_map(img, "posterize", bits=9)
    with pytest.raises(ValueError):
        ops.pixel_map(img, "gamma")
    with pytest.raises(ValueError):
        ops.solarize(img, 300.0)


# ---------------------------------------------------------------------------
# enhance

@pytest.mark.parametrize("kind", ["color", "contrast", "brightness", "sharpness"])
def test_enhance_factor_one_identity(make_image, kind):
    img = make_image(19)
    assert ops.enhance(img, kind, 1.0) == img


def test_enhance_brightness_zero_is_black(make_image):
    img = make_image(20)
    assert ops.enhance(img, "brightness", 0.0) == ImageBuffer.full(img.width, img.height)


def test_enhance_brightness_scales(make_image):
    img = ImageBuffer.full(3, 3, (100, 101, 0))
    out = ops.enhance(img, "brightness", 0.5)
    # round(0.5 * v) with halves away from zero: 50, 50.5 -> 51, 0
    assert tuple(out.array[0, 0]) == (50, 51, 0)


def test_enhance_contrast_zero_is_mean_gray(make_image):
    img = make_image(21, 8, 8)
    luma = [oracle_grayscale(*px) for row in img.array.tolist() for px in row]
    mean = oracle_round(sum(luma) / len(luma))
    assert ops.enhance(img, "contrast", 0.0) == ImageBuffer.full(8, 8, (mean,) * 3)


def test_enhance_color_zero_is_replicated_grayscale(make_image):
    img = make_image(22, 6, 6)
    out = ops.enhance(img, "color", 0.0)
    for y in range(6):
        for x in range(6):
            r, g, b = (int(v) for v in img.array[y, x])
            assert tuple(out.array[y, x]) == (oracle_grayscale(r, g, b),) * 3


def test_enhance_sharpness_zero_is_smooth(make_image):
    img = make_image(23, 9, 9)
    assert ops.enhance(img, "sharpness", 0.0) == ops.convolve(img, SMOOTH_KERNEL)


def test_enhance_overshoot_clamps():
    img = ImageBuffer.full(3, 3, (250, 3, 128))
    out = ops.enhance(img, "brightness", 1.9)
    assert tuple(out.array[0, 0]) == (255, 6, 243)


def test_enhance_rejects_bad_factor(make_image):
    img = make_image(24)
    with pytest.raises(ValueError):
        ops.enhance(img, "brightness", -0.1)
    with pytest.raises(ValueError):
        ops.enhance(img, "brightness", float("inf"))
    with pytest.raises(ValueError):
        ops.enhance(img, "gamma", 1.0)


# ---------------------------------------------------------------------------
# cutout

def test_cutout_frac_pixel_count():
    img = ImageBuffer.full(32, 32, (1, 2, 3))
    out = ops.cutout(img, (16, 16), frac=0.2)
    # side = round(0.2 * 32) = 6 -> exactly 36 pixels overwritten
    changed = np.any(out.array != img.array, axis=2)
    assert int(changed.sum()) == 36
    assert np.all(out.array[changed] == np.asarray(GRAY_FILL, dtype=np.uint8))


def test_cutout_absolute_side_clips_at_corner():
    img = ImageBuffer.full(32, 32, (9, 9, 9))
    out = ops.cutout(img, (0, 0), side=16)
    changed = np.any(out.array != img.array, axis=2)
    assert int(changed.sum()) == 64  # 8x8 survives clipping
    assert changed[:8, :8].all()


def test_cutout_zero_side_is_identity(make_image):
    img = make_image(25)
    assert ops.cutout(img, (4, 4), frac=0.0) == img
    assert ops.cutout(img, (4, 4), side=0) == img


def test_cutout_custom_fill():
    img = ImageBuffer.full(8, 8, (0, 0, 0))
    out = ops.cutout(img, (4, 4), side=2, fill=(1, 2, 3))
    assert tuple(out.array[4, 4]) == (1, 2, 3)


def test_cutout_region_anchoring():
    img = ImageBuffer.full(10, 10, (0, 0, 0))
    out = ops.cutout(img, (5, 5), side=3, fill=(255, 0, 0))
    changed = np.any(out.array != img.array, axis=2)
    ys, xs = np.nonzero(changed)
    # [c - side//2, c - side//2 + side) = [4, 7)
    assert (ys.min(), ys.max(), xs.min(), xs.max()) == (4, 6, 4, 6)


def test_cutout_rejects_bad_args(make_image):
    img = make_image(26)
    with pytest.raises(ValueError):
        ops.cutout(img, (4, 4))
    with pytest.raises(ValueError):
        ops.cutout(img, (4, 4), frac=0.5, side=2)
    with pytest.raises(ValueError):
        ops.cutout(img, (99, 4), frac=0.5)
    with pytest.raises(ValueError):
        ops.cutout(img, (4, 4), frac=1.5)
    with pytest.raises(ValueError):
        ops.cutout(img, (4, 4), side=-1)


# ---------------------------------------------------------------------------
# blend_pair

def test_blend_endpoints(make_image):
    a, b = make_image(27), make_image(28)
    assert ops.blend_pair(a, b, 0.0) == a
    assert ops.blend_pair(a, b, 1.0) == b
    assert ops.blend_pair(a, a, 0.37) == a


def test_blend_hand_value():
    a = ImageBuffer.full(2, 2, (100, 0, 255))
    b = ImageBuffer.full(2, 2, (200, 10, 0))
    out = ops.blend_pair(a, b, 0.4)
    # 0.6*100 + 0.4*200 = 140; 0.6*0 + 0.4*10 = 4; 0.6*255 + 0.4*0 = 153
    assert tuple(out.array[0, 0]) == (140, 4, 153)


def test_blend_rejects_mismatch_and_bad_weight(make_image):
    a = make_image(29, 8, 8)
    b = make_image(30, 9, 8)
    with pytest.raises(ValueError):
        ops.blend_pair(a, b, 0.5)
    with pytest.raises(ValueError):
        ops.blend_pair(a, a, 1.5)


# ---------------------------------------------------------------------------
# flips, pad_and_crop

def test_flips_are_involutions(make_image):
    img = make_image(31, 11, 7)
    for axis in ("horizontal", "vertical"):
        assert ops.flip(ops.flip(img, axis), axis) == img


def test_flip_values():
    arr = np.zeros((1, 2, 3), dtype=np.uint8)
    arr[0, 0] = (1, 1, 1)
    arr[0, 1] = (2, 2, 2)
    out = ops.flip(ImageBuffer(arr), "horizontal")
    assert tuple(out.array[0, 0]) == (2, 2, 2)
    assert tuple(out.array[0, 1]) == (1, 1, 1)


def test_flip_both_axes_is_full_reversal(make_image):
    img = make_image(32, 9, 5)
    out = ops.flip(ops.flip(img, "horizontal"), "vertical")
    assert np.array_equal(out.array, img.array[::-1, ::-1])


def test_pad_and_crop_centre_identity(make_image):
    img = make_image(33, 12, 12)
    assert ops.pad_and_crop(img, 4, (4, 4)) == img
    assert ops.pad_and_crop(img, 0, (0, 0)) == img


def test_pad_and_crop_corner_brings_zeros(make_image):
    img = make_image(34, 8, 8)
    out = ops.pad_and_crop(img, 4, (0, 0))
    assert np.all(out.array[:4] == 0)
    assert np.all(out.array[:, :4] == 0)
    assert np.array_equal(out.array[4:, 4:], img.array[:4, :4])


def test_pad_and_crop_rejects_bad_origin(make_image):
    img = make_image(35)
    with pytest.raises(ValueError):
        ops.pad_and_crop(img, 4, (9, 0))
    with pytest.raises(ValueError):
        ops.pad_and_crop(img, 0, (1, 0))
    with pytest.raises(ValueError):
        ops.pad_and_crop(img, -1, (0, 0))


# ---------------------------------------------------------------------------
# shared invariants

_ALL_OPS = [
    lambda img: ops.warp_affine(img, ops.affine_rotation(img.width, img.height, 33.0)),
    lambda img: ops.warp_affine(img, ops.affine_shear("x", 0.3)),
    lambda img: ops.warp_affine(img, ops.affine_translation("y", 5)),
    lambda img: ops.convolve(img, SMOOTH_KERNEL),
    lambda img: ops.convolve(img, BLUR_KERNEL),
    lambda img: ops.equalize(img),
    lambda img: ops.autocontrast(img),
    lambda img: ops.invert(img),
    lambda img: ops.solarize(img, 77.0),
    lambda img: ops.posterize(img, 3),
    lambda img: ops.enhance(img, "color", 1.7),
    lambda img: ops.enhance(img, "contrast", 0.2),
    lambda img: ops.enhance(img, "brightness", 1.4),
    lambda img: ops.enhance(img, "sharpness", 0.5),
    lambda img: ops.cutout(img, (3, 3), frac=0.4),
    lambda img: ops.flip(img, "horizontal"),
    lambda img: ops.flip(img, "vertical"),
    lambda img: ops.pad_and_crop(img, 2, (1, 3)),
]


@pytest.mark.parametrize("op", _ALL_OPS)
def test_ops_preserve_shape_and_leave_input_alone(make_image, op):
    img = make_image(36, 15, 11)
    before = img.array.copy()
    out = op(img)
    assert (out.width, out.height) == (img.width, img.height)
    assert out.array.dtype == np.uint8
    assert np.array_equal(img.array, before)
