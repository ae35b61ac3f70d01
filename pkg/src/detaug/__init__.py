"""detaug: deterministic image augmentation with replayable records.

Augments 8-bit RGB images with the uniform single-op policy, the
fixed-strength multi-op policy, or the gated two-op policy over the seven
standard op spaces. Every random decision flows through a splittable
counter-based rng and lands in a record, so any output can be reproduced
byte for byte from (seed, image index, replica) or replayed from its
manifest line.
"""

from .backend import available_backends, get_backend, set_backend
from .image import (
    BLUR_KERNEL,
    GRAY_FILL,
    SMOOTH_KERNEL,
    AffineParams,
    ImageBuffer,
    Kernel,
    round_half_away,
)
from .policy import (
    AugRecord,
    PolicyConfig,
    batch_augment,
    policy_transform,
    ra_transform,
    replay_record,
    sample_op_subset,
    ta_transform,
    ua_transform,
)
from .pipeline import (
    ChainConfig,
    ChainResult,
    DatasetSource,
    FixedCutout,
    MirrorFlip,
    Normalization,
    PadCrop,
    chain_preset,
    ingest,
    run_chain,
)
from .corpus import augment_corpus, read_manifest, replay_corpus
from .rng import RngState, stream_id
from .spaces import (
    OP_NAMES,
    SPACE_NAMES,
    AugmentationSpace,
    ConfigError,
    OpDraw,
    StrengthRange,
    apply_op,
    build_space,
    map_strength,
)
from .stats import bench_throughput, confidence_interval, uniformity_test

__version__ = "0.1.0"

__all__ = [
    "AffineParams",
    "AugRecord",
    "AugmentationSpace",
    "BLUR_KERNEL",
    "ChainConfig",
    "ChainResult",
    "ConfigError",
    "DatasetSource",
    "FixedCutout",
    "GRAY_FILL",
    "ImageBuffer",
    "Kernel",
    "MirrorFlip",
    "Normalization",
    "OP_NAMES",
    "OpDraw",
    "PadCrop",
    "PolicyConfig",
    "RngState",
    "SMOOTH_KERNEL",
    "SPACE_NAMES",
    "StrengthRange",
    "apply_op",
    "augment_corpus",
    "available_backends",
    "batch_augment",
    "bench_throughput",
    "build_space",
    "chain_preset",
    "confidence_interval",
    "get_backend",
    "ingest",
    "map_strength",
    "policy_transform",
    "ra_transform",
    "read_manifest",
    "replay_corpus",
    "replay_record",
    "round_half_away",
    "run_chain",
    "sample_op_subset",
    "set_backend",
    "stream_id",
    "ta_transform",
    "ua_transform",
    "uniformity_test",
    "__version__",
]
