"""Corpus augmentation: source dataset -> folder of PNGs + replay manifest.

Output file ``{index}_{replica}.png`` is produced under the rng stream
derived from (image index, replica), so the corpus is byte-identical for any
worker count and any scheduling. Workers only compute pixels; the parent
process does all encoding and writing.

The manifest is JSON lines: one header line (seed, space, policy, chain,
raster options), then one line per emitted file with its full op record.
:func:`replay_corpus` re-applies those records against the source and either
writes missing files or verifies existing ones byte for byte.
"""

from __future__ import annotations

import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import ImageBuffer
from .pipeline import ChainConfig, DatasetSource, ingest, run_chain
from .policy import AugRecord, replay_record
from .rng import RngState
from .spaces import ConfigError, build_space

MANIFEST_NAME = "manifest.jsonl"
INCOMPLETE_MARKER = "INCOMPLETE"
_MANIFEST_VERSION = 1


@dataclass(frozen=True)
class CorpusSummary:
    images: int
    replicas: int
    files: int
    skipped: tuple[str, ...]
    out_dir: str
    manifest: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "images": self.images,
            "replicas": self.replicas,
            "files": self.files,
            "skipped": list(self.skipped),
            "out": self.out_dir,
            "manifest": self.manifest,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ReplaySummary:
    files: int
    compared: int
    written: int
    mismatches: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "files": self.files,
            "compared": self.compared,
            "written": self.written,
            "mismatches": list(self.mismatches),
        }


def _load_items(source: DatasetSource):
    good = []
    skipped = []
    for item in ingest(source):
        if item.ok:
            good.append(item)
        else:
            skipped.append(f"index {item.index}: {item.error}")
    return good, skipped


def _needs_partners(chain: ChainConfig) -> bool:
    return chain.policy is not None and "sample_pairing" in chain.policy.space


def _partners_for(images: dict, index: int):
    # the batch excluding the image itself, in dataset index order
    return [img for i, img in sorted(images.items()) if i != index]


def _png_bytes(img: ImageBuffer) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(np.asarray(img.array)).save(buf, format="PNG")
    return buf.getvalue()


# worker-side state, set once per process by the pool initializer
_W: dict = {}


def _pool_init(chain, seed, items, want_partners):
    _W["chain"] = chain
    _W["seed"] = seed
    _W["images"] = {i: img for i, img in items}
    _W["partners"] = {} if want_partners else None


def _pool_run(task):
    index, replica = task
    chain = _W["chain"]
    images = _W["images"]
    partners = ()
    if _W["partners"] is not None:
        if index not in _W["partners"]:
            _W["partners"][index] = _partners_for(images, index)
        partners = _W["partners"][index]
    stream = RngState(_W["seed"]).derive(index, replica)
    result = run_chain(images[index], chain, stream, partners)
    return index, replica, result.image.tobytes(), result.image.width, \
        result.image.height, result.record.to_list()


def augment_corpus(source: DatasetSource, chain: ChainConfig, out_dir, *,
                   replicas: int = 1, seed: int = 0, workers: int = 1) -> CorpusSummary:
    """Augment every source image ``replicas`` times into ``out_dir``.

    Writes ``{index}_{replica}.png`` per output plus ``manifest.jsonl``. If
    writing fails partway an ``INCOMPLETE`` marker file is left next to the
    outputs before the error propagates.
    """
    if replicas < 1:
        raise ConfigError(f"replicas must be >= 1, got {replicas}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    items, skipped = _load_items(source)
    labels = {item.index: item.label for item in items}
    pairs = [(item.index, item.image) for item in items]
    tasks = [(item.index, r) for item in items for r in range(replicas)]

    results = []
    if workers == 1 or not tasks:
        _pool_init(chain, seed, pairs, _needs_partners(chain))
        try:
            results = [_pool_run(t) for t in tasks]
        finally:
            _W.clear()
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_pool_init,
            initargs=(chain, seed, pairs, _needs_partners(chain)),
        ) as pool:
            chunk = max(1, len(tasks) // (workers * 4))
            results = list(pool.map(_pool_run, tasks, chunksize=chunk))

    results.sort(key=lambda r: (r[0], r[1]))
    marker = out / INCOMPLETE_MARKER
    try:
        lines = [json.dumps({
            "type": "header",
            "version": _MANIFEST_VERSION,
            "seed": seed,
            "replicas": replicas,
            "source_kind": source.kind,
            "space": None if chain.policy is None else chain.policy.space.name,
            "chain": chain.to_dict(),
        }, sort_keys=True)]
        files = 0
        for index, replica, raw, w, h, record in results:
            name = f"{index}_{replica}.png"
            (out / name).write_bytes(_png_bytes(ImageBuffer.from_bytes(raw, w, h)))
            files += 1
            entry = {
                "type": "item",
                "source": index,
                "replica": replica,
                "file": name,
                "ops": record,
            }
            if labels.get(index) is not None:
                entry["label"] = labels[index]
            lines.append(json.dumps(entry, sort_keys=True))
        (out / MANIFEST_NAME).write_text("\n".join(lines) + "\n")
    except Exception as exc:
        try:
            marker.write_text(f"partial write: {exc}\n")
        except OSError:
            pass  # cannot even write the marker; the original error still raises
        raise
    if marker.exists():
        marker.unlink()

    for msg in skipped:
        print(f"warning: skipped {msg}", file=sys.stderr)
    return CorpusSummary(
        images=len(items),
        replicas=replicas,
        files=len(results),
        skipped=tuple(skipped),
        out_dir=str(out),
        manifest=str(out / MANIFEST_NAME),
        seed=seed,
    )


def read_manifest(path) -> tuple[dict, list[dict]]:
    """Parse a manifest into (header, item entries); validates the header line."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    if header.get("type") != "header":
        raise ValueError(f"{path}: first line is not a manifest header")
    entries = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        entry = json.loads(line)
        if entry.get("type") != "item":
            raise ValueError(f"{path}:{n}: expected an item line")
        entries.append(entry)
    return header, entries


def replay_corpus(manifest_path, source: DatasetSource, out_dir) -> ReplaySummary:
    """Re-apply a manifest's records against the source images.

    Files already present in ``out_dir`` are verified byte-for-byte; missing
    ones are written. Any mismatch is reported in the summary.
    """
    header, entries = read_manifest(manifest_path)
    chain_info = header.get("chain") or {}
    fill = tuple(chain_info.get("fill", (128, 128, 128)))
    bilinear = bool(chain_info.get("bilinear", False))
    space = build_space(header["space"]) if header.get("space") else None

    items, _ = _load_items(source)
    images = {item.index: item.image for item in items}
    partner_cache: dict = {}

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    compared = 0
    written = 0
    mismatches = []
    for entry in entries:
        index = int(entry["source"])
        if index not in images:
            raise ValueError(f"manifest references source index {index} missing from input")
        record = AugRecord.from_list(entry["ops"])
        partners = None
        if any(d.partner is not None for d in record):
            if index not in partner_cache:
                partner_cache[index] = _partners_for(images, index)
            partners = partner_cache[index]
        img = replay_record(images[index], record, space, partners,
                            fill=fill, bilinear=bilinear)
        data = _png_bytes(img)
        target = out / entry["file"]
        if target.exists():
            compared += 1
            if target.read_bytes() != data:
                mismatches.append(entry["file"])
        else:
            target.write_bytes(data)
            written += 1
    return ReplaySummary(
        files=len(entries),
        compared=compared,
        written=written,
        mismatches=tuple(mismatches),
    )
