"""Statistics helpers: Student-t confidence intervals, chi-square uniformity,
and a deterministic-workload throughput benchmark.

The numerics come from scipy (t quantile via ``stdtrit``, chi-square tail via
``chi2.sf``); tests pin them against published table values. Extremely large
chi-square statistics underflow to p = 0.0, which callers should read as
"p below float range", not a literal zero probability.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special
from scipy.stats import chi2

from . import backend
from .image import ImageBuffer
from .rng import RngState


@dataclass(frozen=True)
class CiResult:
    """Two-sided Student-t confidence interval around a sample mean."""

    mean: float
    halfwidth: float
    n: int
    level: float

    @property
    def low(self) -> float:
        return self.mean - self.halfwidth

    @property
    def high(self) -> float:
        return self.mean + self.halfwidth

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "halfwidth": self.halfwidth,
            "low": self.low,
            "high": self.high,
            "n": self.n,
            "level": self.level,
        }


def t_quantile(p: float, df: int) -> float:
    """Student-t inverse CDF; df >= 1, 0 < p < 1."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile probability must be in (0, 1), got {p}")
    return float(special.stdtrit(df, p))


def confidence_interval(samples, level: float = 0.95) -> CiResult:
    """Mean and t-based halfwidth of an i.i.d. sample; needs n >= 2.

    halfwidth = t_{(1+level)/2, n-1} * s / sqrt(n) with the n-1 sample
    standard deviation; an all-equal sample yields halfwidth 0.
    """
    xs = np.asarray(list(samples), dtype=np.float64)
    n = xs.size
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    mean = float(xs.mean())
    sd = float(xs.std(ddof=1))
    t = t_quantile((1.0 + level) / 2.0, n - 1)
    return CiResult(mean=mean, halfwidth=t * sd / math.sqrt(n), n=int(n), level=float(level))


class UniformityResult(NamedTuple):
    statistic: float
    p_value: float
    dof: int


def uniformity_test(counts) -> UniformityResult:
    """Pearson chi-square test of the hypothesis 'all cells equally likely'.

    ``counts`` are observed cell counts. Requires every expected count
    (total / cells) to be >= 5, the usual validity floor; raises otherwise.
    """
    obs = np.asarray(list(counts), dtype=np.float64)
    if obs.ndim != 1 or obs.size < 2:
        raise ValueError("need a flat list of at least 2 cell counts")
    if np.any(obs < 0):
        raise ValueError("cell counts must be non-negative")
    total = float(obs.sum())
    cells = obs.size
    expected = total / cells
    if expected < 5.0:
        raise ValueError(
            f"expected count per cell is {expected:.2f} < 5; collect more samples"
        )
    stat = float(((obs - expected) ** 2 / expected).sum())
    dof = cells - 1
    return UniformityResult(statistic=stat, p_value=float(chi2.sf(stat, dof)), dof=dof)


# ---------------------------------------------------------------------------
# throughput

@dataclass(frozen=True)
class ThroughputResult:
    backend: str
    images_per_sec: float
    images: int
    seconds: float
    workers: int
    per_worker: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "images_per_sec": self.images_per_sec,
            "images": self.images,
            "seconds": self.seconds,
            "workers": self.workers,
            "per_worker": list(self.per_worker),
        }


_BENCH_POOL = 64  # distinct synthetic images cycled through the loop


def _bench_images(image_size: int, seed: int):
    gen = np.random.default_rng(seed)
    return [
        ImageBuffer(gen.integers(0, 256, size=(image_size, image_size, 3), dtype=np.uint8))
        for _ in range(_BENCH_POOL)
    ]


def _bench_loop(args):
    chain, image_size, duration, seed, backend_name, worker_id = args
    if backend_name:
        backend.set_backend(backend_name)
    from .pipeline import run_chain  # late import: workers re-import the package

    images = _bench_images(image_size, seed)
    master = RngState(seed)
    count = 0
    start = time.perf_counter()
    deadline = start + duration
    while time.perf_counter() < deadline:
        # worker_id spreads streams so workers never duplicate draws
        stream = master.derive(count, worker_id)
        run_chain(images[count % _BENCH_POOL], chain, stream)
        count += 1
    elapsed = time.perf_counter() - start
    return count, elapsed


def bench_throughput(chain, *, image_size: int = 32, duration: float = 2.0,
                     workers: int = 1, seed: int = 0,
                     backend_name: str | None = None) -> ThroughputResult:
    """Images per second for a chain on synthetic images of a fixed size.

    The workload is deterministic (seeded images, per-iteration rng streams);
    only the wall-clock count varies. ``workers`` > 1 runs that many
    processes for the same duration and sums their rates.
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    argset = [
        (chain, image_size, float(duration), seed, backend_name, wid)
        for wid in range(workers)
    ]
    if workers == 1:
        prev = backend.get_backend()
        try:
            outcomes = [_bench_loop(argset[0])]
        finally:
            if backend_name:
                backend.set_backend(prev)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_bench_loop, argset))
    rates = tuple(count / elapsed for count, elapsed in outcomes)
    images = sum(count for count, _ in outcomes)
    seconds = max(elapsed for _, elapsed in outcomes)
    name = backend_name if backend_name else backend.get_backend()
    return ThroughputResult(
        backend=name,
        images_per_sec=float(sum(rates)),
        images=int(images),
        seconds=float(seconds),
        workers=workers,
        per_worker=rates,
    )
