"""Command-line interface: compress, decompress, gen-logs, repeat, bench.

Paths given as `-` read standard input / write standard output. File outputs
are written atomically (temp file in the target directory, then rename), so
a failed run never leaves a partial file behind. Exit codes: 0 success,
1 runtime failure (diagnostic names the failing stage), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys

from . import __version__
from .bench import PipelineOptions, render_report, run_benchmark
from .container import (
    DEFAULT_LEVEL,
    DEFAULT_ORDER,
    compress,
    decompress,
)
from .corpusgen import LogGenSpec, generate_logs, parse_spec_file, parse_timestamp, repeat_to_size
from .errors import (
    ConfigError,
    ContractViolationError,
    FormatError,
    GpzError,
    IntegrityError,
    MalformedStreamError,
    UndefinedMetricError,
)
from .predictor import KIND_BUILTIN, KIND_EXTERNAL
from .tokenizer import BYTE_LEVEL, train_bpe

LEVEL_ENV_VAR = "GPZ_LEVEL"

_STAGES = (
    (ConfigError, "config"),
    (FormatError, "format"),
    (IntegrityError, "integrity"),
    (MalformedStreamError, "stream"),
    (ContractViolationError, "predictor"),
    (UndefinedMetricError, "metric"),
)


def _stage(exc: GpzError) -> str:
    for cls, name in _STAGES:
        if isinstance(exc, cls):
            return name
    return "error"


def _default_level() -> int:
    raw = os.environ.get(LEVEL_ENV_VAR)
    if raw is None:
        return DEFAULT_LEVEL
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{LEVEL_ENV_VAR} must be an integer, got {raw!r}") from None


def read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def write_output(path: str, data: bytes) -> None:
    """Atomic write: the destination either keeps its old content or gets all of the new."""
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    tmp = f"{path}.{os.getpid()}.tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _say(out_path: str, message: str) -> None:
    stream = sys.stderr if out_path == "-" else sys.stdout
    print(message, file=stream)


def parse_size(value: str) -> int:
    """Byte counts with optional K/M/G suffix (powers of 1024)."""
    raw = value.strip()
    factor = 1
    suffixes = {"K": 1024, "M": 1024 ** 2, "G": 1024 ** 3}
    if raw and raw[-1].upper() in suffixes:
        factor = suffixes[raw[-1].upper()]
        raw = raw[:-1]
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"bad size {value!r}") from None
    return n * factor


def _predictor_args(args) -> tuple[str, tuple[str, ...] | None]:
    command = tuple(shlex.split(args.predictor_cmd)) if args.predictor_cmd else None
    kind = args.predictor if hasattr(args, "predictor") else KIND_BUILTIN
    if command and kind == KIND_BUILTIN:
        kind = KIND_EXTERNAL
    return kind, command


def _cmd_compress(args) -> int:
    data = read_input(args.input)
    vocab = BYTE_LEVEL
    if args.bpe is not None:
        vocab = train_bpe(data[: args.bpe_sample], args.bpe)
    kind, command = _predictor_args(args)
    blob = compress(
        data,
        vocab=vocab,
        order=args.order,
        level=args.level,
        predictor=kind,
        command=command,
    )
    write_output(args.output, blob)
    pct = 100.0 * len(blob) / len(data) if data else 0.0
    _say(args.output, f"compressed {len(data):,} B -> {len(blob):,} B ({pct:.2f}% of original)")
    return 0


def _cmd_decompress(args) -> int:
    blob = read_input(args.input)
    command = tuple(shlex.split(args.predictor_cmd)) if args.predictor_cmd else None
    data = decompress(blob, command=command)
    write_output(args.output, data)
    _say(args.output, f"decompressed {len(blob):,} B -> {len(data):,} B, verified")
    return 0


def _spec_from_args(args) -> LogGenSpec:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            base = parse_spec_file(fh.read())
    else:
        base = LogGenSpec()
    def pool(raw):
        return tuple(item.strip() for item in raw.split(",") if item.strip())

    fields = {
        "seed": args.seed if args.seed is not None else base.seed,
        "lines": args.lines if args.lines is not None else base.lines,
        "levels": pool(args.levels) if args.levels else base.levels,
        "components": pool(args.components) if args.components else base.components,
        "templates": tuple(args.template) if args.template else base.templates,
        "start": parse_timestamp(args.start) if args.start else base.start,
        "step": args.step if args.step is not None else base.step,
        "number_limit": args.number_limit if args.number_limit is not None else base.number_limit,
    }
    spec = LogGenSpec(**fields)
    spec.validate()
    return spec


def _cmd_gen_logs(args) -> int:
    spec = _spec_from_args(args)
    data = generate_logs(spec)
    write_output(args.output, data)
    _say(args.output, f"generated {spec.lines:,} lines, {len(data):,} B (seed {spec.seed})")
    return 0


def _cmd_repeat(args) -> int:
    block = read_input(args.input)
    data = repeat_to_size(block, parse_size(args.target))
    write_output(args.output, data)
    _say(args.output, f"repeated {len(block):,} B block to {len(data):,} B")
    return 0


def _cmd_bench(args) -> int:
    datasets = []
    for path in args.files:
        datasets.append((os.path.basename(path), read_input(path)))
    for lines in args.gen_lines or ():
        spec = LogGenSpec(seed=args.gen_seed, lines=lines)
        datasets.append((f"synthetic-logs-{lines}", generate_logs(spec)))
    if not datasets:
        raise ConfigError("nothing to benchmark: pass files or --gen-lines")
    kind, command = _predictor_args(args)
    options = PipelineOptions(
        order=args.order,
        level=args.level,
        bpe_size=args.bpe,
        bpe_sample=args.bpe_sample,
        predictor=kind,
        command=command,
    )
    result = run_benchmark(datasets, options)
    write_output(args.output, render_report(result.records, args.format))
    for label, reason in result.failures:
        print(f"gpz: bench: {label} failed roundtrip: {reason}", file=sys.stderr)
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpz",
        description="Predictive rank-coding preprocessor in front of gzip, "
        "with corpus generation and benchmarking.",
    )
    parser.add_argument("--version", action="version", version=f"gpz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, out_default=None):
        p.add_argument("-i", "--input", required=True, help="input path, - for stdin")
        if out_default is None:
            p.add_argument("-o", "--output", required=True, help="output path, - for stdout")
        else:
            p.add_argument("-o", "--output", default=out_default)

    def add_pipeline(p):
        p.add_argument("-k", "--order", type=int, default=DEFAULT_ORDER,
                       help=f"context order for the builtin predictor (default {DEFAULT_ORDER})")
        p.add_argument("--level", type=int, default=_default_level(),
                       help=f"gzip level 1-9 (default {DEFAULT_LEVEL}, or ${LEVEL_ENV_VAR})")
        p.add_argument("--bpe", type=int, default=None, metavar="SIZE",
                       help="train a BPE vocabulary of SIZE tokens on the input prefix")
        p.add_argument("--bpe-sample", type=parse_size, default=96 * 1024, metavar="BYTES",
                       help="training prefix for --bpe (default 96K)")
        p.add_argument("--predictor", choices=[KIND_BUILTIN, KIND_EXTERNAL],
                       default=KIND_BUILTIN)
        p.add_argument("--predictor-cmd", default=None, metavar="CMD",
                       help="command line serving the external predictor protocol")

    p = sub.add_parser("compress", help="compress a file into a .gpz container")
    add_io(p)
    add_pipeline(p)
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="restore the original bytes from a .gpz container")
    add_io(p)
    p.add_argument("--predictor-cmd", default=None, metavar="CMD",
                   help="required when the container was written with an external predictor")
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("gen-logs", help="generate a deterministic synthetic log corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--spec", default=None, help="key=value spec file; flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lines", type=int, default=None)
    p.add_argument("--levels", default=None, help="comma-separated level pool")
    p.add_argument("--components", default=None, help="comma-separated component pool")
    p.add_argument("--template", action="append", default=None,
                   help="message template with {num}/{id} placeholders; repeatable")
    p.add_argument("--start", default=None, help="start timestamp (epoch or 'YYYY-MM-DD HH:MM:SS')")
    p.add_argument("--step", type=int, default=None, help="seconds between lines")
    p.add_argument("--number-limit", type=int, default=None,
                   help="numeric placeholders draw below this value")
    p.set_defaults(func=_cmd_gen_logs)

    p = sub.add_parser("repeat", help="duplicate a block until it reaches a target size")
    add_io(p)
    p.add_argument("--target", required=True, help="target size in bytes (K/M/G suffixes ok)")
    p.set_defaults(func=_cmd_repeat)

    p = sub.add_parser("bench", help="compare gzip-only against the pipeline")
    p.add_argument("files", nargs="*", help="existing corpora to measure")
    p.add_argument("--gen-lines", type=int, action="append", metavar="N",
                   help="also measure a generated corpus of N lines; repeatable")
    p.add_argument("--gen-seed", type=int, default=1)
    p.add_argument("--format", choices=["table", "csv"], default="table")
    p.add_argument("-o", "--output", default="-")
    add_pipeline(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except GpzError as exc:
        print(f"gpz: {_stage(exc)}: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
