"""Augmentation policies: uniform single-op, fixed-strength multi-op, and
gated two-op chains, all producing replayable records.

Draw-order canon (what makes records reproducible):

* ta: op index, strength index, then per-op sign/aux draws.
* ra: the n op indices first, then sign/aux per op in application order.
* ua: per slot op index, apply gate, strength index if gated on; after both
  slots are drawn, sign/aux per applied slot in order.

Per-op sign/aux order is fixed in :func:`detaug.spaces.sample_op_draw`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .image import GRAY_FILL, ImageBuffer
from .spaces import (
    AugmentationSpace,
    ConfigError,
    OpDraw,
    apply_drawn,
    sample_op_draw,
)

POLICY_KINDS = ("ta", "ra", "ua")

_UA_SLOTS = 2  # each drawn slot fires on a fair gate bit


@dataclass(frozen=True)
class PolicyConfig:
    """A policy kind bound to a space, with optional op/strength restriction.

    ``op_subset``/``strength_subset`` restrict the uniform draws to a subset
    of the space (used standalone and by the subset-search workflow). RA
    additionally needs ``ra_n`` (ops per image, 1..3) and ``ra_m`` (the fixed
    strength every op is applied at).
    """

    kind: str
    space: AugmentationSpace
    ra_n: int | None = None
    ra_m: int | None = None
    op_subset: tuple[str, ...] | None = None
    strength_subset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}")
        if self.kind == "ra":
            if self.ra_n is None or not 1 <= int(self.ra_n) <= 3:
                raise ConfigError(f"ra needs ra_n in 1..3, got {self.ra_n}")
            if self.ra_m is None or int(self.ra_m) not in self.space.levels:
                raise ConfigError(
                    f"ra needs ra_m in the space levels {self.space.levels}, got {self.ra_m}"
                )
            if self.strength_subset is not None:
                raise ConfigError("strength_subset does not apply to ra; use ra_m")
            object.__setattr__(self, "ra_n", int(self.ra_n))
            object.__setattr__(self, "ra_m", int(self.ra_m))
        else:
            if self.ra_n is not None or self.ra_m is not None:
                raise ConfigError(f"ra_n/ra_m only apply to the ra policy, not {self.kind!r}")
        if self.op_subset is not None:
            subset = tuple(dict.fromkeys(str(op) for op in self.op_subset))
            if not subset:
                raise ConfigError("op_subset must not be empty")
            space_ops = self.space.op_names
            unknown = [op for op in subset if op not in space_ops]
            if unknown:
                raise ConfigError(
                    f"op_subset entries not in space {self.space.name!r}: {unknown}"
                )
            ordered = tuple(op for op in space_ops if op in subset)
            object.__setattr__(self, "op_subset", ordered)
        if self.strength_subset is not None:
            levels = tuple(sorted({int(m) for m in self.strength_subset}))
            if not levels:
                raise ConfigError("strength_subset must not be empty")
            bad = [m for m in levels if m not in self.space.levels]
            if bad:
                raise ConfigError(
                    f"strength_subset entries not in space levels {self.space.levels}: {bad}"
                )
            object.__setattr__(self, "strength_subset", levels)

    @property
    def effective_ops(self) -> tuple[str, ...]:
        return self.op_subset if self.op_subset is not None else self.space.op_names

    @property
    def effective_levels(self) -> tuple[int, ...]:
        if self.kind == "ra":
            return (self.ra_m,)
        return self.strength_subset if self.strength_subset is not None else self.space.levels

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "space": self.space.name}
        if self.kind == "ra":
            d["ra_n"] = self.ra_n
            d["ra_m"] = self.ra_m
        if self.op_subset is not None:
            d["op_subset"] = list(self.op_subset)
        if self.strength_subset is not None:
            d["strength_subset"] = list(self.strength_subset)
        return d


@dataclass(frozen=True)
class AugRecord:
    """The ordered op draws one image actually received."""

    entries: tuple[OpDraw, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_list(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    @classmethod
    def from_list(cls, items) -> "AugRecord":
        return cls(tuple(OpDraw.from_dict(d) for d in items))


# ---------------------------------------------------------------------------
# draw-only samplers (no pixels touched); the transforms build on these

def ta_draw(cfg: PolicyConfig, rng) -> tuple[str, int]:
    """One uniform (op, strength) draw from the effective sets."""
    op = cfg.effective_ops[rng.integers(len(cfg.effective_ops))]
    m = cfg.effective_levels[rng.integers(len(cfg.effective_levels))]
    return op, m


def ra_draw(cfg: PolicyConfig, rng) -> tuple[str, ...]:
    """The n op names, drawn uniformly with replacement."""
    ops_eff = cfg.effective_ops
    return tuple(ops_eff[rng.integers(len(ops_eff))] for _ in range(cfg.ra_n))


def ua_draw(cfg: PolicyConfig, rng) -> tuple[tuple[str, bool, int | None], ...]:
    """Two slots of (op, applied, strength); strength only drawn when applied."""
    slots = []
    for _ in range(_UA_SLOTS):
        op = cfg.effective_ops[rng.integers(len(cfg.effective_ops))]
        applied = bool(rng.bit())
        m = cfg.effective_levels[rng.integers(len(cfg.effective_levels))] if applied else None
        slots.append((op, applied, m))
    return tuple(slots)


# ---------------------------------------------------------------------------
# transforms

def _resolve_partner(draw: OpDraw, partners) -> ImageBuffer | None:
    if draw.partner is None:
        return None
    return partners[draw.partner]


def ta_transform(img: ImageBuffer, cfg: PolicyConfig, rng, partners=(), *,
                 fill=GRAY_FILL, bilinear: bool = False):
    """Apply one uniformly drawn op at one uniformly drawn strength."""
    if cfg.kind != "ta":
        raise ConfigError(f"ta_transform needs a ta config, got {cfg.kind!r}")
    op, m = ta_draw(cfg, rng)
    draw = sample_op_draw(op, m, img, rng, partner_count=len(partners))
    out = apply_drawn(img, draw, cfg.space, _resolve_partner(draw, partners),
                      fill=fill, bilinear=bilinear)
    return out, AugRecord((draw,))


def ra_transform(img: ImageBuffer, cfg: PolicyConfig, rng, partners=(), *,
                 fill=GRAY_FILL, bilinear: bool = False):
    """Apply ra_n uniformly drawn ops, all at the fixed strength ra_m."""
    if cfg.kind != "ra":
        raise ConfigError(f"ra_transform needs an ra config, got {cfg.kind!r}")
    chain = ra_draw(cfg, rng)
    cur = img
    entries = []
    for op in chain:
        draw = sample_op_draw(op, cfg.ra_m, cur, rng, partner_count=len(partners))
        cur = apply_drawn(cur, draw, cfg.space, _resolve_partner(draw, partners),
                          fill=fill, bilinear=bilinear)
        entries.append(draw)
    return cur, AugRecord(tuple(entries))


def ua_transform(img: ImageBuffer, cfg: PolicyConfig, rng, partners=(), *,
                 fill=GRAY_FILL, bilinear: bool = False):
    """Two-slot chain; each drawn op fires independently with probability 0.5,
    each fired slot at its own uniformly drawn strength."""
    if cfg.kind != "ua":
        raise ConfigError(f"ua_transform needs a ua config, got {cfg.kind!r}")
    slots = ua_draw(cfg, rng)
    cur = img
    entries = []
    for op, applied, m in slots:
        if not applied:
            continue
        draw = sample_op_draw(op, m, cur, rng, partner_count=len(partners))
        cur = apply_drawn(cur, draw, cfg.space, _resolve_partner(draw, partners),
                          fill=fill, bilinear=bilinear)
        entries.append(draw)
    return cur, AugRecord(tuple(entries))


_TRANSFORMS = {"ta": ta_transform, "ra": ra_transform, "ua": ua_transform}


def policy_transform(img: ImageBuffer, cfg: PolicyConfig, rng, partners=(), *,
                     fill=GRAY_FILL, bilinear: bool = False):
    """Dispatch to the transform for ``cfg.kind``; returns (image, record)."""
    return _TRANSFORMS[cfg.kind](img, cfg, rng, partners, fill=fill, bilinear=bilinear)


def batch_augment(img: ImageBuffer, cfg: PolicyConfig, rng, replicas: int = 8,
                  image_index: int = 0, partners=(), *, fill=GRAY_FILL,
                  bilinear: bool = False):
    """Independent replicas of one image under per-(image, replica) streams.

    Replica r uses ``rng.derive(image_index, r)``, so results do not depend
    on evaluation order or on how replicas are spread across workers.
    """
    if replicas < 1:
        raise ConfigError(f"replicas must be >= 1, got {replicas}")
    out = []
    for r in range(replicas):
        sub = rng.derive(image_index, r)
        out.append(policy_transform(img, cfg, sub, partners, fill=fill, bilinear=bilinear))
    return out


def sample_op_subset(space: AugmentationSpace, k: int, rng) -> tuple[str, ...]:
    """Uniform k-subset of the space's ops (partial Fisher-Yates), returned
    in the space's canonical op order."""
    n = len(space.op_names)
    if not 1 <= k <= n:
        raise ConfigError(f"subset size must be in 1..{n}, got {k}")
    idx = list(range(n))
    for i in range(k):
        j = i + rng.integers(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    picked = sorted(idx[:k])
    return tuple(space.op_names[i] for i in picked)


def replay_record(img: ImageBuffer, record: AugRecord, space: AugmentationSpace | None,
                  partners=None, *, fill=GRAY_FILL, bilinear: bool = False) -> ImageBuffer:
    """Re-apply a record; byte-identical to the original application.

    ``partners`` must present the same list the original run drew partner
    indices from (the batch excluding the image itself, in dataset order).
    """
    cur = img
    for draw in record:
        partner = None
        if draw.partner is not None:
            if partners is None:
                raise ConfigError("record contains a partner draw but no partners were given")
            partner = partners[draw.partner]
        cur = apply_drawn(cur, draw, space, partner, fill=fill, bilinear=bilinear)
    return cur
