"""Construct-then-call augmenter handles for data-loader integration.

The boundary is raw contiguous 8-bit RGB bytes plus explicit dimensions; no
image-library objects cross it, and the adapter adds no arithmetic of its
own. A handle built from (policy, space, seed) produces byte-identical
output to the engine's command line for the same seed and call index.

    handle = make_augmenter("ta", "ra", seed=7)
    out_bytes, record = handle(raw_rgb, width, height)

Sequential calls advance through derived rng streams deterministically;
concurrent callers pass an explicit ``index`` instead and may share the
handle freely.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import NamedTuple

from detaug import (
    AugRecord,
    ConfigError,
    ImageBuffer,
    PolicyConfig,
    RngState,
    build_space,
    policy_transform,
)

__all__ = ["AugmenterHandle", "BoundaryError", "CallResult", "call_augmenter", "make_augmenter"]
__version__ = "0.1.0"


class BoundaryError(ValueError):
    """Raised when a buffer does not match the declared dimensions."""


class CallResult(NamedTuple):
    data: bytes
    record: AugRecord


class _Counter:
    """Thread-safe call counter so shared handles never reuse a stream."""

    __slots__ = ("_lock", "_value")

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0

    def next(self) -> int:
        with self._lock:
            value = self._value
            self._value += 1
            return value


@dataclass(frozen=True)
class AugmenterHandle:
    """Immutable augmenter: policy kind, space name, optional (n, m), seed.

    Calling the handle augments one image per call. Each call without an
    explicit ``index`` consumes the next internal index; each index maps to
    an independent derived rng stream, so results depend only on
    (construction arguments, index, image).
    """

    policy: str
    space: str
    n: int | None = None
    m: int | None = None
    seed: int = 0
    ops: tuple[str, ...] | None = None
    strengths: tuple[int, ...] | None = None
    _config: PolicyConfig = field(init=False, repr=False, compare=False)
    _calls: _Counter = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kwargs = {}
        if self.policy == "ra":
            kwargs["ra_n"] = self.n if self.n is not None else 1
            kwargs["ra_m"] = self.m if self.m is not None else 15
        elif self.n is not None or self.m is not None:
            raise ConfigError("n and m only apply to the ra policy")
        config = PolicyConfig(self.policy, build_space(self.space),
                              op_subset=self.ops, strength_subset=self.strengths,
                              **kwargs)
        object.__setattr__(self, "_config", config)
        object.__setattr__(self, "_calls", _Counter())

    def __call__(self, data, width: int, height: int, *,
                 index: int | None = None) -> CallResult:
        return call_augmenter(self, data, width, height, index=index)


def make_augmenter(policy: str, space: str, n: int | None = None,
                   m: int | None = None, seed: int = 0, *,
                   ops=None, strengths=None) -> AugmenterHandle:
    """Build a callable handle backed by the engine.

    Invalid policy or space names raise the engine's configuration error,
    mirroring the command line's usage-error exit. ``ops``/``strengths``
    optionally restrict the space exactly as the command line flags do.
    """
    return AugmenterHandle(
        policy=policy,
        space=space,
        n=n,
        m=m,
        seed=seed,
        ops=None if ops is None else tuple(ops),
        strengths=None if strengths is None else tuple(strengths),
    )


def call_augmenter(handle: AugmenterHandle, data, width: int, height: int, *,
                   index: int | None = None) -> CallResult:
    """Augment one raw RGB image and return (bytes, record).

    ``data`` must be exactly width * height * 3 bytes of row-major 8-bit
    RGB. The rng stream is derived from (handle.seed, index); omitting
    ``index`` uses the handle's own call count, which matches the engine
    command line processing the same image as item ``index``.
    """
    if width <= 0 or height <= 0:
        raise BoundaryError(f"dimensions must be positive, got {width}x{height}")
    raw = bytes(data)
    expected = width * height * 3
    if len(raw) != expected:
        raise BoundaryError(
            f"buffer holds {len(raw)} bytes, expected {expected} "
            f"for {width}x{height} RGB"
        )
    if index is None:
        index = handle._calls.next()
    img = ImageBuffer.from_bytes(raw, width, height)
    stream = RngState(handle.seed).derive(index, 0)
    out, record = policy_transform(img, handle._config, stream)
    return CallResult(data=out.tobytes(), record=record)
