"""Augmentation op catalogue, the seven published op spaces, and strength maps.

An op space is an ordered list of (op, strength range) rows plus the set of
legal integer strength levels. Strength ``m`` runs over {0..30} (one space
uses {0, 15, 30}); ``m = 0`` is always the weakest setting and every
strength-carrying op degenerates to identity there. The monotone map from
``m`` to each op's concrete parameter lives in :func:`map_strength`.

Ops are applied in two phases so that every random decision is recorded and
replayable: :func:`sample_op_draw` consumes randomness and returns an
:class:`OpDraw`; :func:`apply_drawn` is a pure function of image + draw.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import ops
from .image import GRAY_FILL, BLUR_KERNEL, SMOOTH_KERNEL, ImageBuffer, round_half_away


class ConfigError(ValueError):
    """Invalid space, policy, or chain configuration."""


# Canonical op enumeration. Every space lists its ops in this order.
OP_NAMES = (
    "identity",
    "auto_contrast",
    "equalize",
    "rotate",
    "solarize",
    "color",
    "posterize",
    "contrast",
    "brightness",
    "sharpness",
    "shear_x",
    "shear_y",
    "translate_x",
    "translate_y",
    "cutout",
    "invert",
    "flip_lr",
    "flip_ud",
    "sample_pairing",
    "blur",
    "smooth",
)

# Ops whose parameter direction is chosen by a fair sign draw.
SIGNED_OPS = frozenset(
    {"rotate", "shear_x", "shear_y", "translate_x", "translate_y",
     "color", "contrast", "brightness", "sharpness"}
)

# Ops that take no strength parameter and ignore m entirely.
PARAMETERLESS_OPS = frozenset(
    {"identity", "auto_contrast", "equalize", "invert",
     "flip_lr", "flip_ud", "blur", "smooth"}
)


@dataclass(frozen=True)
class StrengthRange:
    """Printed parameter range for one op in one space."""

    low: float
    high: float

    def __post_init__(self):
        if not self.high >= self.low:
            raise ConfigError(f"strength range high < low: {self}")


# Parameter ranges shared by the standard spaces.
_BASE_RANGES = {
    "rotate": StrengthRange(-30.0, 30.0),
    "solarize": StrengthRange(0.0, 256.0),
    "color": StrengthRange(0.1, 1.9),
    "posterize": StrengthRange(4.0, 8.0),
    "contrast": StrengthRange(0.1, 1.9),
    "brightness": StrengthRange(0.1, 1.9),
    "sharpness": StrengthRange(0.1, 1.9),
    "shear_x": StrengthRange(0.0, 0.3),
    "shear_y": StrengthRange(0.0, 0.3),
    "translate_x": StrengthRange(0.0, 10.0),
    "translate_y": StrengthRange(0.0, 10.0),
    "cutout": StrengthRange(0.0, 0.2),
    "sample_pairing": StrengthRange(0.0, 0.4),
}

# The wide space keeps the same ops but stretches most ranges.
_WIDE_RANGES = {
    "rotate": StrengthRange(-135.0, 135.0),
    "solarize": StrengthRange(0.0, 256.0),
    "color": StrengthRange(0.01, 2.0),
    "posterize": StrengthRange(2.0, 8.0),
    "contrast": StrengthRange(0.01, 2.0),
    "brightness": StrengthRange(0.01, 2.0),
    "sharpness": StrengthRange(0.01, 2.0),
    "shear_x": StrengthRange(0.0, 0.99),
    "shear_y": StrengthRange(0.0, 0.99),
    "translate_x": StrengthRange(0.0, 32.0),
    "translate_y": StrengthRange(0.0, 32.0),
}

_RA_OPS = OP_NAMES[:14]
_FULL_LEVELS = tuple(range(31))


@dataclass(frozen=True)
class AugmentationSpace:
    """Ordered op rows plus the legal strength levels."""

    name: str
    ops: tuple[tuple[str, StrengthRange | None], ...]
    levels: tuple[int, ...] = _FULL_LEVELS

    def __post_init__(self):
        seen = set()
        for op, _ in self.ops:
            if op not in OP_NAMES:
                raise ConfigError(f"unknown op {op!r}")
            if op in seen:
                raise ConfigError(f"duplicate op {op!r} in space {self.name!r}")
            seen.add(op)
        if not self.ops:
            raise ConfigError("a space needs at least one op")
        levels = tuple(sorted({int(m) for m in self.levels}))
        if not levels or levels[0] < 0 or levels[-1] > 30:
            raise ConfigError(f"levels must be a non-empty subset of 0..30, got {self.levels}")
        object.__setattr__(self, "levels", levels)

    @property
    def op_names(self) -> tuple[str, ...]:
        return tuple(op for op, _ in self.ops)

    def __contains__(self, op: str) -> bool:
        return op in set(self.op_names)

    def range_for(self, op: str) -> StrengthRange | None:
        for name, rng in self.ops:
            if name == op:
                return rng
        raise ConfigError(f"op {op!r} is not in space {self.name!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "levels": list(self.levels),
            "ops": [
                {
                    "name": op,
                    "low": None if rng is None else rng.low,
                    "high": None if rng is None else rng.high,
                    "signed": op in SIGNED_OPS,
                    "parameterless": op in PARAMETERLESS_OPS,
                }
                for op, rng in self.ops
            ],
        }


def _rows(op_set, ranges):
    # canonical order; parameterless ops carry no range row
    rows = []
    for op in OP_NAMES:
        if op in op_set:
            rows.append((op, None if op in PARAMETERLESS_OPS else ranges[op]))
    return tuple(rows)


def _make_space(name, op_set, ranges=None, levels=_FULL_LEVELS):
    return AugmentationSpace(name, _rows(op_set, ranges or _BASE_RANGES), levels)


_UA_RANGES = dict(_BASE_RANGES)
_UA_RANGES["translate_x"] = StrengthRange(0.0, 14.0)
_UA_RANGES["translate_y"] = StrengthRange(0.0, 14.0)

_AA_OPS = _RA_OPS + ("cutout", "invert", "sample_pairing")

_SPACES = {
    "ra": _make_space("ra", _RA_OPS),
    "aa": _make_space("aa", _AA_OPS),
    "aa_minus_invert": _make_space(
        "aa_minus_invert", tuple(op for op in _AA_OPS if op != "invert")
    ),
    "ua": _make_space("ua", _RA_OPS + ("cutout", "invert"), _UA_RANGES),
    "ohl": _make_space("ohl", _RA_OPS + ("invert",), levels=(0, 15, 30)),
    "wide": _make_space("wide", _RA_OPS, _WIDE_RANGES),
    "full": _make_space("full", OP_NAMES),
}

SPACE_NAMES = tuple(_SPACES)


def build_space(name: str) -> AugmentationSpace:
    """Look up one of the seven published spaces by name (case-insensitive)."""
    key = str(name).strip().lower().replace("-", "_")
    try:
        return _SPACES[key]
    except KeyError:
        raise ConfigError(
            f"unknown space {name!r}; expected one of: {', '.join(SPACE_NAMES)}"
        ) from None


def map_strength(op: str, m: int, space: AugmentationSpace, sign: int = 1):
    """Map integer strength m to the op's concrete parameter.

    Monotone in m with m=0 the weakest setting. Parameterless ops return
    None. ``sign`` picks the direction for signed ops and is ignored
    elsewhere.
    """
    if m not in space.levels:
        raise ConfigError(f"strength {m} not in levels of space {space.name!r}")
    if sign not in (-1, 1):
        raise ConfigError(f"sign must be -1 or +1, got {sign}")
    if op in PARAMETERLESS_OPS:
        return None
    rng = space.range_for(op)
    frac = m / 30.0
    if op == "rotate":
        return sign * (rng.high * frac)
    if op in ("shear_x", "shear_y"):
        return sign * (rng.high * frac)
    if op in ("translate_x", "translate_y"):
        return sign * round_half_away(rng.high * frac)
    if op == "solarize":
        # real-valued threshold; m=0 -> 256, above any 8-bit pixel, so identity
        return rng.high * (1.0 - frac)
    if op == "posterize":
        return round_half_away(rng.high - (rng.high - rng.low) * frac)
    if op in ("color", "contrast", "brightness", "sharpness"):
        deviation = (rng.high - 1.0) if sign > 0 else (1.0 - rng.low)
        return 1.0 + sign * deviation * frac
    if op == "cutout":
        return rng.high * frac
    if op == "sample_pairing":
        return rng.high * frac
    raise ConfigError(f"unknown op {op!r}")


@dataclass(frozen=True)
class OpDraw:
    """One applied op with every random decision it consumed.

    ``m``/``sign`` feed :func:`map_strength` at apply time; auxiliary draws
    (cutout ``center``, ``partner`` index, crop ``origin``) are stored as
    drawn. A replay therefore recomputes parameters from m, so edits to a
    record change the replayed pixels.

    ``stage`` is "policy" for sampled ops, "pre"/"post" for dataset-chain
    entries. Chain entries reuse the op vocabulary plus "pad_and_crop"
    (with ``pad`` and ``origin``) and fixed-side "cutout" (with ``side``).
    """

    name: str
    m: int | None = None
    sign: int = 1
    center: tuple[int, int] | None = None
    partner: int | None = None
    origin: tuple[int, int] | None = None
    pad: int | None = None
    side: int | None = None
    stage: str = "policy"

    def to_dict(self) -> dict:
        d = {"name": self.name, "stage": self.stage}
        if self.m is not None:
            d["m"] = self.m
        if self.name in SIGNED_OPS:
            d["sign"] = self.sign
        for key in ("center", "partner", "origin", "pad", "side"):
            val = getattr(self, key)
            if val is not None:
                d[key] = list(val) if isinstance(val, tuple) else val
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OpDraw":
        def pair(v):
            return None if v is None else (int(v[0]), int(v[1]))

        return cls(
            name=str(d["name"]),
            m=None if d.get("m") is None else int(d["m"]),
            sign=int(d.get("sign", 1)),
            center=pair(d.get("center")),
            partner=None if d.get("partner") is None else int(d["partner"]),
            origin=pair(d.get("origin")),
            pad=None if d.get("pad") is None else int(d["pad"]),
            side=None if d.get("side") is None else int(d["side"]),
            stage=str(d.get("stage", "policy")),
        )


def sample_op_draw(op: str, m: int, img: ImageBuffer, rng, partner_count: int = 0) -> OpDraw:
    """Consume the randomness one op application needs; draw order is fixed:
    sign, then cutout centre, then partner index."""
    sign = rng.sign() if op in SIGNED_OPS else 1
    center = None
    partner = None
    if op == "cutout":
        center = (rng.integers(img.width), rng.integers(img.height))
    if op == "sample_pairing":
        # no partner available: the op degenerates to identity, recorded as such
        partner = rng.integers(partner_count) if partner_count > 0 else None
    # m is recorded even for parameterless ops (they ignore it at apply time)
    return OpDraw(name=op, m=int(m), sign=sign, center=center, partner=partner)


def apply_drawn(img: ImageBuffer, draw: OpDraw, space: AugmentationSpace | None,
                partner: ImageBuffer | None = None, *, fill=GRAY_FILL,
                bilinear: bool = False) -> ImageBuffer:
    """Apply a recorded draw; pure function of its inputs.

    ``space`` supplies strength ranges and may be None for entries that need
    none (parameterless ops, fixed-side cutout, pad_and_crop).
    """
    name = draw.name
    if name == "identity":
        return img
    if name == "auto_contrast":
        return ops.autocontrast(img)
    if name == "equalize":
        return ops.equalize(img)
    if name == "invert":
        return ops.pixel_map(img, "invert")
    if name == "flip_lr":
        return ops.flip(img, "horizontal")
    if name == "flip_ud":
        return ops.flip(img, "vertical")
    if name == "blur":
        return ops.convolve(img, BLUR_KERNEL)
    if name == "smooth":
        return ops.convolve(img, SMOOTH_KERNEL)
    if name == "pad_and_crop":
        if draw.pad is None or draw.origin is None:
            raise ConfigError("pad_and_crop entry needs pad and origin")
        return ops.pad_and_crop(img, draw.pad, draw.origin)
    if name == "cutout" and draw.side is not None:
        if draw.center is None:
            raise ConfigError("fixed cutout entry needs a centre")
        return ops.cutout(img, draw.center, side=draw.side, fill=fill)

    if space is None:
        raise ConfigError(f"op {name!r} needs a space to resolve its strength")
    if draw.m is None:
        raise ConfigError(f"op {name!r} carries a strength and the record has none")
    param = map_strength(name, draw.m, space, draw.sign)

    if name == "rotate":
        return ops.warp_affine(
            img, ops.affine_rotation(img.width, img.height, param, fill=fill, bilinear=bilinear)
        )
    if name in ("shear_x", "shear_y"):
        return ops.warp_affine(
            img, ops.affine_shear(name[-1], param, fill=fill, bilinear=bilinear)
        )
    if name in ("translate_x", "translate_y"):
        return ops.warp_affine(
            img, ops.affine_translation(name[-1], param, fill=fill, bilinear=bilinear)
        )
    if name == "solarize":
        return ops.pixel_map(img, "solarize", threshold=param)
    if name == "posterize":
        return ops.pixel_map(img, "posterize", bits=param)
    if name in ("color", "contrast", "brightness", "sharpness"):
        return ops.enhance(img, name, param)
    if name == "cutout":
        if draw.center is None:
            raise ConfigError("cutout entry needs a centre")
        return ops.cutout(img, draw.center, frac=param, fill=fill)
    if name == "sample_pairing":
        if draw.partner is None:
            return img  # degenerate: no partner was available at draw time
        if partner is None:
            raise ConfigError("sample_pairing replay needs the partner image")
        return ops.blend_pair(img, partner, param)
    raise ConfigError(f"unknown op {name!r}")


def apply_op(img: ImageBuffer, op: str, m: int, space: AugmentationSpace, rng,
             partner: ImageBuffer | None = None, *, fill=GRAY_FILL,
             bilinear: bool = False) -> ImageBuffer:
    """Draw the op's remaining randomness from ``rng`` and apply it.

    ``partner`` is required exactly when ``op == "sample_pairing"``.
    """
    if op not in space:
        raise ConfigError(f"op {op!r} is not in space {space.name!r}")
    if op == "sample_pairing" and partner is None:
        raise ConfigError("sample_pairing requires a partner image")
    draw = sample_op_draw(op, m, img, rng, partner_count=1 if partner is not None else 0)
    return apply_drawn(img, draw, space, partner, fill=fill, bilinear=bilinear)
