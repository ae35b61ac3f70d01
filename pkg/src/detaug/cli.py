"""Command line interface.

Subcommands: augment, replay, spaces, selfcheck, bench, ci. Results go to
stdout as JSON; diagnostics go to stderr. Exit codes: 0 success, 1 a runtime
check failed (selfcheck failure, replay mismatch), 2 usage or configuration
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .backend import available_backends, get_backend
from .corpus import augment_corpus, replay_corpus
from .pipeline import ChainConfig, DatasetSource, chain_preset
from .policy import PolicyConfig
from .selfcheck import FAULTS, MIN_DRAWS, run_selfcheck
from .spaces import SPACE_NAMES, ConfigError, build_space
from .stats import bench_throughput, confidence_interval

_FORMATS = {"folder": "folder", "cifar": "cifar_binary", "cifar_binary": "cifar_binary"}


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("AUG_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"AUG_SEED must be an integer, got {env!r}") from None
    return 0


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _policy(args) -> PolicyConfig | None:
    if args.policy == "none":
        for flag, value in (("--ops", args.ops), ("--strengths", args.strengths),
                            ("--ra-n", args.ra_n), ("--ra-m", args.ra_m)):
            if value is not None:
                raise ConfigError(f"{flag} requires a policy, but --policy is none")
        return None
    space = build_space(args.space)
    op_subset = tuple(args.ops.split(",")) if args.ops else None
    strength_subset = _int_list(args.strengths) if args.strengths else None
    kwargs = {}
    if args.policy == "ra":
        kwargs["ra_n"] = args.ra_n if args.ra_n is not None else 1
        kwargs["ra_m"] = args.ra_m if args.ra_m is not None else 15
    elif args.ra_n is not None or args.ra_m is not None:
        raise ConfigError("--ra-n/--ra-m only apply to --policy ra")
    return PolicyConfig(args.policy, space, op_subset=op_subset,
                        strength_subset=strength_subset, **kwargs)


def _chain(args) -> ChainConfig:
    return chain_preset(args.chain, _policy(args), mirror_axis=args.mirror_axis)


def _add_policy_flags(sub) -> None:
    sub.add_argument("--policy", choices=("ta", "ra", "ua", "none"), default="ta",
                     help="augmentation policy (default ta)")
    sub.add_argument("--space", default="ra",
                     help=f"op space, one of: {', '.join(SPACE_NAMES)} (default ra)")
    sub.add_argument("--ops", help="comma-separated op subset restriction")
    sub.add_argument("--strengths", help="comma-separated strength subset, e.g. 0,15,30")
    sub.add_argument("--ra-n", type=int, help="ra only: ops per image, 1..3")
    sub.add_argument("--ra-m", type=int, help="ra only: the fixed strength")
    sub.add_argument("--chain", choices=("none", "cifar", "svhn"), default="none",
                     help="dataset chain around the policy (default none)")
    sub.add_argument("--mirror-axis", choices=("horizontal", "vertical"),
                     default="horizontal", help="chain mirror flip axis")
    sub.add_argument("--seed", type=int, help="master seed (default $AUG_SEED or 0)")


def cmd_augment(args) -> int:
    source = DatasetSource(_FORMATS[args.format], Path(args.input))
    summary = augment_corpus(source, _chain(args), Path(args.out),
                             replicas=args.replicas, seed=_seed(args),
                             workers=args.workers)
    _emit(summary.to_dict())
    return 0


def cmd_replay(args) -> int:
    source = DatasetSource(_FORMATS[args.format], Path(args.input))
    summary = replay_corpus(Path(args.manifest), source, Path(args.out))
    _emit(summary.to_dict())
    if not summary.ok:
        print(f"replay mismatch: {summary.mismatches[0]}", file=sys.stderr)
        return 1
    return 0


def cmd_spaces(args) -> int:
    if args.name:
        _emit(build_space(args.name).to_dict())
    else:
        _emit({"spaces": list(SPACE_NAMES)})
    return 0


def cmd_selfcheck(args) -> int:
    results = run_selfcheck(draws=args.draws, seed=_seed(args),
                            inject_fault=args.inject_fault)
    _emit({"ok": all(r.ok for r in results), "checks": [r.to_dict() for r in results]})
    failed = [r.name for r in results if not r.ok]
    if failed:
        print(f"selfcheck failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_bench(args) -> int:
    chain = _chain(args)
    if args.backend == "both":
        names = available_backends()
    elif args.backend == "auto":
        names = (get_backend(),)
    else:
        names = (args.backend,)
    results = []
    for name in names:
        if name == "compiled" and "compiled" not in available_backends():
            raise ConfigError("compiled backend requested but the extension is not built")
        res = bench_throughput(chain, image_size=args.size, duration=args.duration,
                               workers=args.workers, seed=_seed(args), backend_name=name)
        results.append(res.to_dict())
    payload = {"results": results}
    if len(results) == 2:
        by_name = {r["backend"]: r["images_per_sec"] for r in results}
        if "compiled" in by_name and "python" in by_name and by_name["python"] > 0:
            payload["speedup"] = by_name["compiled"] / by_name["python"]
    _emit(payload)
    return 0


def cmd_ci(args) -> int:
    values = [float(v) for v in args.values]
    if args.input:
        text = Path(args.input).read_text()
        values.extend(float(line) for line in text.split() if line.strip())
    result = confidence_interval(values, level=args.level)
    _emit(result.to_dict())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detaug",
        description="Deterministic image augmentation with replayable records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment a dataset into a folder of PNGs")
    p.add_argument("--input", required=True, help="source folder or record file")
    p.add_argument("--format", choices=sorted(_FORMATS), default="folder")
    p.add_argument("--out", required=True, help="output folder")
    p.add_argument("--replicas", type=int, default=1, help="outputs per image (default 1)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("replay", help="re-apply a manifest and verify or fill outputs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--input", required=True, help="the original source dataset")
    p.add_argument("--format", choices=sorted(_FORMATS), default="folder")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("spaces", help="list op spaces or dump one space's table")
    p.add_argument("--name", help="dump this space as JSON")
    p.set_defaults(func=cmd_spaces)

    p = sub.add_parser("selfcheck", help="run the built-in verification battery")
    p.add_argument("--draws", type=int, default=200_000,
                   help=f"uniformity sample size, >= {MIN_DRAWS} (default 200000)")
    p.add_argument("--seed", type=int, help="master seed (default $AUG_SEED or 0)")
    p.add_argument("--inject-fault", choices=FAULTS,
                   help="deliberately corrupt a component to prove detection")
    p.set_defaults(func=cmd_selfcheck)

    p = sub.add_parser("bench", help="measure chain throughput")
    p.add_argument("--backend", choices=("auto", "compiled", "python", "both"),
                   default="auto")
    p.add_argument("--size", type=int, default=32, help="square image size (default 32)")
    p.add_argument("--duration", type=float, default=2.0, help="seconds per run (default 2)")
    p.add_argument("--workers", type=int, default=1)
    _add_policy_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ci", help="confidence interval for a list of samples")
    p.add_argument("values", nargs="*", help="sample values")
    p.add_argument("--input", help="file with one value per line")
    p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p.set_defaults(func=cmd_ci)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, NotADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
