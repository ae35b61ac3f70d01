"""Dataset ingest and the per-image augmentation chain.

Ingest yields indexed items from either a folder of images or a binary
label+planes record file (1 label byte, then 1024 bytes per colour plane,
32x32). Decode problems are reported per item; the stream keeps going.

:func:`run_chain` is the full training-style recipe around a policy:
pre ops (mirror flip, pad-and-crop), the policy itself, then an optional
trailing fixed cutout. When a normalization is configured the float tensor
is computed from the image *before* the trailing cutout, and the cutout then
zeroes the tensor region while the uint8 image gets the fill colour.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import ops
from .image import GRAY_FILL, ImageBuffer
from .policy import AugRecord, PolicyConfig, policy_transform
from .spaces import ConfigError, OpDraw

_RECORD_BYTES = 1 + 3 * 1024  # label byte + three 32x32 planes
_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class IngestItem:
    """One dataset element; ``error`` is set instead of ``image`` on failure."""

    index: int
    image: ImageBuffer | None = None
    label: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class DatasetSource:
    """Where images come from: kind 'folder' or 'cifar_binary' plus a path."""

    kind: str
    path: Path

    def __post_init__(self):
        if self.kind not in ("folder", "cifar_binary"):
            raise ConfigError(
                f"unknown source kind {self.kind!r}; expected 'folder' or 'cifar_binary'"
            )
        object.__setattr__(self, "path", Path(self.path))


def _ingest_folder(path: Path) -> Iterator[IngestItem]:
    from PIL import Image, UnidentifiedImageError

    files = sorted(
        p for p in path.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )
    for index, file in enumerate(files):
        try:
            with Image.open(file) as im:
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
        except (OSError, UnidentifiedImageError, ValueError) as exc:
            yield IngestItem(index, error=f"{file.name}: {exc}")
            continue
        yield IngestItem(index, image=ImageBuffer(arr))


def _ingest_cifar(path: Path) -> Iterator[IngestItem]:
    data = path.read_bytes()
    if len(data) % _RECORD_BYTES != 0:
        raise ValueError(
            f"{path.name}: size {len(data)} is not a multiple of {_RECORD_BYTES}"
        )
    count = len(data) // _RECORD_BYTES
    for index in range(count):
        rec = data[index * _RECORD_BYTES:(index + 1) * _RECORD_BYTES]
        label = rec[0]
        planes = np.frombuffer(rec, dtype=np.uint8, offset=1).reshape(3, 32, 32)
        arr = np.ascontiguousarray(planes.transpose(1, 2, 0))
        yield IngestItem(index, image=ImageBuffer._wrap(arr), label=int(label))


def ingest(source: DatasetSource) -> Iterator[IngestItem]:
    """Stream dataset items in index order; per-item failures carry an error
    message and do not stop the stream."""
    if source.kind == "folder":
        if not source.path.is_dir():
            raise FileNotFoundError(f"not a directory: {source.path}")
        yield from _ingest_folder(source.path)
    else:
        if not source.path.is_file():
            raise FileNotFoundError(f"not a file: {source.path}")
        yield from _ingest_cifar(source.path)


def emit_png(img: ImageBuffer, path: Path) -> None:
    """Write a buffer as PNG (lossless; re-ingest is byte-identical)."""
    from PIL import Image

    Image.fromarray(np.asarray(img.array)).save(str(path), format="PNG")


# ---------------------------------------------------------------------------
# chain

@dataclass(frozen=True)
class MirrorFlip:
    """Pre op: mirror with probability 1/2 along the configured axis."""

    axis: str = "horizontal"

    def __post_init__(self):
        if self.axis not in ops.FLIP_AXES:
            raise ConfigError(f"flip axis must be one of {ops.FLIP_AXES}, got {self.axis!r}")


@dataclass(frozen=True)
class PadCrop:
    """Pre op: zero-pad by ``pad`` and crop back at a drawn (or fixed) origin."""

    pad: int
    origin: tuple[int, int] | None = None

    def __post_init__(self):
        if int(self.pad) < 0:
            raise ConfigError(f"pad must be >= 0, got {self.pad}")
        object.__setattr__(self, "pad", int(self.pad))
        if self.origin is not None:
            ox, oy = (int(v) for v in self.origin)
            if not (0 <= ox <= 2 * self.pad and 0 <= oy <= 2 * self.pad):
                raise ConfigError(f"origin {self.origin!r} outside [0, {2 * self.pad}]^2")
            object.__setattr__(self, "origin", (ox, oy))


@dataclass(frozen=True)
class FixedCutout:
    """Post op: square cutout of an absolute side at a drawn centre."""

    side: int

    def __post_init__(self):
        if int(self.side) < 0:
            raise ConfigError(f"cutout side must be >= 0, got {self.side}")
        object.__setattr__(self, "side", int(self.side))


@dataclass(frozen=True)
class Normalization:
    """Per-channel (pixel/255 - mean) / std for the float tensor output."""

    mean: tuple[float, float, float]
    std: tuple[float, float, float]

    def __post_init__(self):
        mean = tuple(float(v) for v in self.mean)
        std = tuple(float(v) for v in self.std)
        if len(mean) != 3 or len(std) != 3:
            raise ConfigError("normalization needs 3 means and 3 stds")
        if any(s <= 0 for s in std):
            raise ConfigError(f"normalization stds must be positive, got {std}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)


@dataclass(frozen=True)
class ChainConfig:
    """Pre ops, a policy, post ops, and raster options for one recipe."""

    policy: PolicyConfig | None = None
    pre_ops: tuple = ()
    post_ops: tuple = ()
    normalization: Normalization | None = None
    fill: tuple[int, int, int] = GRAY_FILL
    bilinear: bool = False

    def __post_init__(self):
        for op in self.pre_ops:
            if not isinstance(op, (MirrorFlip, PadCrop)):
                raise ConfigError(f"pre_ops accept MirrorFlip/PadCrop, got {op!r}")
        cutouts = [op for op in self.post_ops if isinstance(op, FixedCutout)]
        if len(cutouts) != len(self.post_ops):
            raise ConfigError("post_ops accept FixedCutout only")
        if len(cutouts) > 1:
            raise ConfigError("at most one trailing fixed cutout is supported")
        object.__setattr__(self, "pre_ops", tuple(self.pre_ops))
        object.__setattr__(self, "post_ops", tuple(self.post_ops))

    def to_dict(self) -> dict:
        pre = []
        for op in self.pre_ops:
            if isinstance(op, MirrorFlip):
                pre.append({"flip": op.axis})
            else:
                pre.append({"pad_crop": {"pad": op.pad, "origin":
                                         None if op.origin is None else list(op.origin)}})
        post = [{"cutout": op.side} for op in self.post_ops]
        return {
            "policy": None if self.policy is None else self.policy.to_dict(),
            "pre": pre,
            "post": post,
            "normalization": None if self.normalization is None else {
                "mean": list(self.normalization.mean),
                "std": list(self.normalization.std),
            },
            "fill": list(self.fill),
            "bilinear": self.bilinear,
        }


@dataclass(frozen=True)
class ChainResult:
    """uint8 output, optional float tensor, and the full draw record."""

    image: ImageBuffer
    record: AugRecord
    tensor: np.ndarray | None = None


def _normalize(img: ImageBuffer, norm: Normalization) -> np.ndarray:
    mean = np.asarray(norm.mean, dtype=np.float64)
    std = np.asarray(norm.std, dtype=np.float64)
    t = (img.array.astype(np.float64) / 255.0 - mean) / std
    return t.astype(np.float32)


def run_chain(img: ImageBuffer, chain: ChainConfig, rng, partners=()) -> ChainResult:
    """Run the full recipe under one rng stream.

    Draw order: pre ops in configured order (flip gate; crop origin x then
    y), policy draws, then the trailing cutout centre x, y. The tensor, when
    a normalization is configured, reflects every op except the trailing
    cutout, which zeroes its region in the tensor afterwards.
    """
    cur = img
    entries = []
    for op in chain.pre_ops:
        if isinstance(op, MirrorFlip):
            if rng.bit():
                axis_op = "flip_lr" if op.axis == "horizontal" else "flip_ud"
                cur = ops.flip(cur, op.axis)
                entries.append(OpDraw(name=axis_op, stage="pre"))
        else:
            if op.origin is None:
                span = 2 * op.pad + 1
                origin = (rng.integers(span), rng.integers(span))
            else:
                origin = op.origin
            cur = ops.pad_and_crop(cur, op.pad, origin)
            entries.append(OpDraw(name="pad_and_crop", pad=op.pad, origin=origin, stage="pre"))

    if chain.policy is not None:
        cur, rec = policy_transform(cur, chain.policy, rng, partners,
                                    fill=chain.fill, bilinear=chain.bilinear)
        entries.extend(rec.entries)

    tensor = None
    if chain.post_ops:
        cutout_cfg = chain.post_ops[0]
        center = (rng.integers(cur.width), rng.integers(cur.height))
        if chain.normalization is not None:
            tensor = _normalize(cur, chain.normalization)
            x0, x1, y0, y1 = ops.cutout_region(cur.width, cur.height, center, cutout_cfg.side)
            tensor[y0:y1, x0:x1, :] = 0.0
        cur = ops.cutout(cur, center, side=cutout_cfg.side, fill=chain.fill)
        entries.append(OpDraw(name="cutout", side=cutout_cfg.side, center=center, stage="post"))
    elif chain.normalization is not None:
        tensor = _normalize(cur, chain.normalization)

    return ChainResult(image=cur, record=AugRecord(tuple(entries)), tensor=tensor)


def chain_preset(name: str, policy: PolicyConfig | None, *,
                 mirror_axis: str = "horizontal") -> ChainConfig:
    """Standard recipes: 'none' (policy only), 'cifar' (flip + pad4-crop pre,
    cutout 16 post), 'svhn' (cutout 16 post, no pre ops)."""
    key = str(name).strip().lower()
    if key == "none":
        return ChainConfig(policy=policy)
    if key == "cifar":
        return ChainConfig(
            policy=policy,
            pre_ops=(MirrorFlip(mirror_axis), PadCrop(4)),
            post_ops=(FixedCutout(16),),
        )
    if key == "svhn":
        return ChainConfig(policy=policy, post_ops=(FixedCutout(16),))
    raise ConfigError(f"unknown chain preset {name!r}; expected none, cifar, or svhn")
