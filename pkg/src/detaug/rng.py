"""Splittable counter-based random source.

Every random decision in the package flows through :class:`RngState`, a tiny
value type of three integers: seed, stream, counter. The k-th word of a
stream is a pure function of (seed, stream, k), computed with the splitmix64
finalizer, so:

* replaying a draw sequence needs only the three integers;
* per-item streams derived as (image_index, replica) make results independent
  of scheduling, worker count, and evaluation order;
* there is no hidden global state anywhere.

Bounded draws use modulo rejection, so each outcome of ``integers(n)`` is
exactly equally likely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_TAG = 0xD6E8FEB86659FD93


def _mix(z: int) -> int:
    # splitmix64 finalizer
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_id(image_index: int, replica: int = 0) -> int:
    """Canonical stream id for (image, replica); also used by callers that
    key streams on a call counter (pass it as image_index)."""
    if image_index < 0 or replica < 0:
        raise ValueError("stream components must be non-negative")
    if image_index >= 1 << 32 or replica >= 1 << 32:
        raise ValueError("stream components must fit in 32 bits")
    return (image_index << 32) | replica


@dataclass
class RngState:
    """Deterministic random source; value type, cheap to create and copy."""

    seed: int
    stream: int = 0
    counter: int = 0
    _base: int = field(default=-1, repr=False, compare=False)

    def __post_init__(self):
        self.seed = int(self.seed) & _MASK64
        self.stream = int(self.stream) & _MASK64
        if self.counter < 0:
            raise ValueError("counter must be non-negative")

    def derive(self, image_index: int, replica: int = 0) -> "RngState":
        """Fresh stream for (image_index, replica) under the same seed."""
        return RngState(self.seed, stream_id(image_index, replica))

    def clone(self) -> "RngState":
        return RngState(self.seed, self.stream, self.counter)

    def _word(self) -> int:
        if self._base < 0:
            self._base = _mix(
                (_mix((self.seed + _GOLDEN) & _MASK64)
                 ^ _mix((self.stream + _SEED_TAG) & _MASK64)) & _MASK64
            )
        self.counter += 1
        return _mix((self._base + self.counter * _GOLDEN) & _MASK64)

    def integers(self, n: int) -> int:
        """Uniform integer in [0, n); exact via modulo rejection."""
        if n <= 0:
            raise ValueError(f"draw bound must be positive, got {n}")
        if n == 1:
            self._word()  # still consumes one word: draw count stays shape-stable
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self._word()
            if v < limit:
                return v % n

    def choice(self, seq):
        """Uniform element of a non-empty sequence."""
        if not seq:
            raise ValueError("cannot draw from an empty sequence")
        return seq[self.integers(len(seq))]

    def sign(self) -> int:
        """Uniform draw from {-1, +1}."""
        return 1 if self.integers(2) else -1

    def bit(self) -> int:
        """Uniform draw from {0, 1}."""
        return self.integers(2)
