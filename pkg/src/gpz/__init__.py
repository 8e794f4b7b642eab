"""gpz: lossless compression via predictive rank coding in front of gzip.

The pipeline tokenizes input (byte-level by default, optional trained BPE),
rewrites the token stream as prediction ranks under a deterministic order-k
context model, and hands the result to gzip. Because encoder and decoder
drive identical predictors, the transform is exactly invertible; the
container format carries everything needed to reverse it.
"""

from .bench import (
    BenchRecord,
    BenchResult,
    PipelineOptions,
    improvement,
    parse_report_csv,
    render_report,
    run_benchmark,
)
from .container import (
    DEFAULT_LEVEL,
    DEFAULT_ORDER,
    FILE_SUFFIX,
    HEADER_SIZE,
    MAGIC,
    compress,
    decompress,
    gzip_compress,
    gzip_decompress,
    split_container,
)
from .corpusgen import (
    DEFAULT_COMPONENTS,
    DEFAULT_LEVELS,
    DEFAULT_TEMPLATES,
    LogGenSpec,
    Xorshift64Star,
    generate_logs,
    parse_spec_file,
    repeat_to_size,
)
from .errors import (
    ConfigError,
    ContractViolationError,
    FormatError,
    GpzError,
    IntegrityError,
    MalformedStreamError,
    UndefinedMetricError,
)
from .external import ExternalPredictor
from .predictor import (
    KIND_BUILTIN,
    KIND_EXTERNAL,
    ContextModel,
    PredictorConfig,
    Ranking,
)
from .tokenizer import BYTE_LEVEL, Vocabulary, detokenize, tokenize, train_bpe
from .transform import deserialize_ranks, forward, inverse, serialize_ranks

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "BenchResult",
    "BYTE_LEVEL",
    "compress",
    "ConfigError",
    "ContextModel",
    "ContractViolationError",
    "decompress",
    "DEFAULT_COMPONENTS",
    "DEFAULT_LEVEL",
    "DEFAULT_LEVELS",
    "DEFAULT_ORDER",
    "DEFAULT_TEMPLATES",
    "deserialize_ranks",
    "detokenize",
    "ExternalPredictor",
    "FILE_SUFFIX",
    "FormatError",
    "forward",
    "generate_logs",
    "GpzError",
    "gzip_compress",
    "gzip_decompress",
    "HEADER_SIZE",
    "improvement",
    "IntegrityError",
    "inverse",
    "KIND_BUILTIN",
    "KIND_EXTERNAL",
    "LogGenSpec",
    "MAGIC",
    "MalformedStreamError",
    "parse_report_csv",
    "parse_spec_file",
    "PipelineOptions",
    "PredictorConfig",
    "Ranking",
    "render_report",
    "repeat_to_size",
    "run_benchmark",
    "serialize_ranks",
    "split_container",
    "tokenize",
    "train_bpe",
    "UndefinedMetricError",
    "Vocabulary",
    "Xorshift64Star",
]
