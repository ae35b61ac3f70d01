"""Built-in verification battery behind ``detaug selfcheck``.

Five checks, in order:

* pixel-oracles: closed-form pixel identities (invert involution, flip
  involution, zero-weight blend, identity warp, constant-image fixed points).
* identity-at-zero: every strength-carrying op in every space is exact
  identity at m = 0.
* strength-monotonicity: mapped parameter magnitude never decreases in m.
* record-replay: ta/ra/ua transforms replay byte-identically from records.
* ta-uniformity: chi-square over all (op, strength) cells of the ta sampler.

``inject_fault="strength-map"`` corrupts the strength map non-monotonically
(identity at m = 0 is preserved) to prove the battery can fail and names the
check that catches it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops, spaces
from .image import SMOOTH_KERNEL, ImageBuffer
from .policy import PolicyConfig, policy_transform, replay_record
from .rng import RngState
from .spaces import OP_NAMES, PARAMETERLESS_OPS, SPACE_NAMES, build_space, map_strength
from .stats import uniformity_test

MIN_DRAWS = 100_000
FAULTS = ("strength-map",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def _test_image(seed: int = 7, size: int = 24) -> ImageBuffer:
    gen = np.random.default_rng(seed)
    return ImageBuffer(gen.integers(0, 256, size=(size, size, 3), dtype=np.uint8))


def _fault_strength_map(op, m, space, sign=1):
    # non-monotone hump: unchanged at m=0, collapses back to weak at m=30
    warped = (m * (30 - m)) // 15
    usable = max((lv for lv in space.levels if lv <= warped), default=space.levels[0])
    return map_strength(op, usable, space, sign)


def _check_pixel_oracles() -> CheckResult:
    img = _test_image()
    w, h = img.width, img.height
    failures = []
    if ops.pixel_map(ops.pixel_map(img, "invert"), "invert") != img:
        failures.append("invert twice is not identity")
    if ops.flip(ops.flip(img, "horizontal"), "horizontal") != img:
        failures.append("horizontal flip twice is not identity")
    if ops.blend_pair(img, _test_image(8), 0.0) != img:
        failures.append("blend weight 0 changed the image")
    ident = ops.warp_affine(img, ops.affine_translation("x", 0))
    if ident != img:
        failures.append("zero translation is not identity")
    const = ImageBuffer.full(w, h, (77, 77, 77))
    if ops.convolve(const, SMOOTH_KERNEL) != const:
        failures.append("smooth kernel moved a constant image")
    if ops.autocontrast(const) != const:
        failures.append("autocontrast changed a constant image")
    if ops.equalize(const) != const:
        failures.append("equalize changed a constant image")
    detail = "; ".join(failures) if failures else "pixel identities hold"
    return CheckResult("pixel-oracles", not failures, detail)


def _check_identity_at_zero(mapper) -> CheckResult:
    img = _test_image()
    failures = []
    for space_name in SPACE_NAMES:
        space = build_space(space_name)
        if 0 not in space.levels:
            continue
        for op in space.op_names:
            if op in PARAMETERLESS_OPS:
                continue
            for sign in (-1, 1) if op in spaces.SIGNED_OPS else (1,):
                draw = spaces.OpDraw(name=op, m=0, sign=sign,
                                     center=(img.width // 2, img.height // 2),
                                     partner=None)
                if _apply_with_mapper(img, draw, space, mapper) != img:
                    failures.append(f"{space_name}/{op} not identity at m=0")
    detail = "; ".join(failures[:4]) if failures else "all strength ops are identity at m=0"
    return CheckResult("identity-at-zero", not failures, detail)


def _apply_with_mapper(img, draw, space, mapper):
    # mirror of spaces.apply_drawn for the strength-carrying ops, with the
    # strength map injectable so the fault hook can corrupt it
    name = draw.name
    param = mapper(name, draw.m, space, draw.sign)
    if name == "rotate":
        return ops.warp_affine(img, ops.affine_rotation(img.width, img.height, param))
    if name in ("shear_x", "shear_y"):
        return ops.warp_affine(img, ops.affine_shear(name[-1], param))
    if name in ("translate_x", "translate_y"):
        return ops.warp_affine(img, ops.affine_translation(name[-1], param))
    if name == "solarize":
        return ops.pixel_map(img, "solarize", threshold=param)
    if name == "posterize":
        return ops.pixel_map(img, "posterize", bits=param)
    if name in ("color", "contrast", "brightness", "sharpness"):
        return ops.enhance(img, name, param)
    if name == "cutout":
        return ops.cutout(img, draw.center, frac=param)
    if name == "sample_pairing":
        return ops.blend_pair(img, img, param) if param else img
    raise AssertionError(f"unhandled op {name!r}")


def _check_monotonicity(mapper) -> CheckResult:
    failures = []
    for space_name in SPACE_NAMES:
        space = build_space(space_name)
        for op in space.op_names:
            if op in PARAMETERLESS_OPS:
                continue
            for sign in (-1, 1) if op in spaces.SIGNED_OPS else (1,):
                prev = None
                for m in space.levels:
                    param = mapper(op, m, space, sign)
                    eff = _effect_size(op, param, space)
                    if prev is not None and eff < prev - 1e-12:
                        failures.append(f"{space_name}/{op} sign {sign} drops at m={m}")
                        break
                    prev = eff
    detail = "; ".join(failures[:4]) if failures else "mapped strength is monotone in m"
    return CheckResult("strength-monotonicity", not failures, detail)


def _effect_size(op, param, space) -> float:
    # distance from the op's neutral setting, so larger means stronger
    if op == "solarize":
        return space.range_for(op).high - float(param)
    if op == "posterize":
        return space.range_for(op).high - float(param)
    if op in ("color", "contrast", "brightness", "sharpness"):
        return abs(float(param) - 1.0)
    return abs(float(param))


def _check_record_replay() -> CheckResult:
    img = _test_image(11, 32)
    partners = [_test_image(12, 32), _test_image(13, 32)]
    failures = []
    configs = [
        PolicyConfig("ta", build_space("full")),
        PolicyConfig("ra", build_space("ra"), ra_n=2, ra_m=17),
        PolicyConfig("ua", build_space("ua")),
    ]
    for cfg in configs:
        for trial in range(25):
            rng = RngState(99).derive(trial, 0)
            out, record = policy_transform(img, cfg, rng, partners)
            back = replay_record(img, record, cfg.space, partners)
            if back != out:
                failures.append(f"{cfg.kind} trial {trial} replay diverged")
                break
    detail = "; ".join(failures) if failures else "75 transforms replayed byte-identically"
    return CheckResult("record-replay", not failures, detail)


def _check_ta_uniformity(draws: int, seed: int) -> CheckResult:
    from .policy import ta_draw

    cfg = PolicyConfig("ta", build_space("ra"))
    ops_eff = cfg.effective_ops
    levels_eff = cfg.effective_levels
    cells = {(op, m): 0 for op in ops_eff for m in levels_eff}
    master = RngState(seed)
    for i in range(draws):
        op, m = ta_draw(cfg, master.derive(i, 0))
        cells[(op, m)] += 1
    result = uniformity_test(list(cells.values()))
    ok = result.p_value > 1e-3
    detail = (f"chi2={result.statistic:.1f} over {len(cells)} cells, "
              f"p={result.p_value:.4f}")
    return CheckResult("ta-uniformity", ok, detail)


def run_selfcheck(draws: int = 200_000, seed: int = 0,
                  inject_fault: str | None = None) -> list[CheckResult]:
    """Run the battery; returns one result per check, in execution order."""
    if draws < MIN_DRAWS:
        raise ValueError(f"draws must be >= {MIN_DRAWS}, got {draws}")
    if inject_fault is not None and inject_fault not in FAULTS:
        raise ValueError(f"unknown fault {inject_fault!r}; expected one of {FAULTS}")
    mapper = _fault_strength_map if inject_fault == "strength-map" else map_strength
    return [
        _check_pixel_oracles(),
        _check_identity_at_zero(mapper),
        _check_monotonicity(mapper),
        _check_record_replay(),
        _check_ta_uniformity(draws, seed),
    ]
