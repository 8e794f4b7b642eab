"""Benchmark harness: gzip alone vs the rank-coding pipeline, measured honestly.

Every dataset is compressed both ways, roundtrip-verified byte-exact, and
only then recorded. Improvement is the relative reduction of the gzip-only
size: 100 * (gzip_size - pipeline_size) / gzip_size, negative when
preprocessing hurts. Wall times cover the compression call only, measured
with a monotonic clock, strictly sequentially.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

from .container import DEFAULT_LEVEL, DEFAULT_ORDER, compress, decompress, gzip_compress
from .errors import ConfigError, GpzError, UndefinedMetricError
from .predictor import KIND_BUILTIN
from .tokenizer import BYTE_LEVEL, Vocabulary, train_bpe

DEFAULT_BPE_SAMPLE = 96 * 1024

CSV_COLUMNS = (
    "label",
    "original_bytes",
    "gzip_bytes",
    "pipeline_bytes",
    "improvement_pct",
    "gzip_seconds",
    "pipeline_seconds",
    "verified",
)


@dataclass(frozen=True)
class BenchRecord:
    """One result row: sizes, improvement, and wall times for a dataset."""

    label: str
    original_bytes: int
    gzip_bytes: int
    pipeline_bytes: int
    improvement_pct: float
    gzip_seconds: float
    pipeline_seconds: float
    verified: bool


@dataclass(frozen=True)
class PipelineOptions:
    """Knobs shared by the bench harness and the CLI."""

    order: int = DEFAULT_ORDER
    level: int = DEFAULT_LEVEL
    bpe_size: int | None = None
    bpe_sample: int = DEFAULT_BPE_SAMPLE
    predictor: str = KIND_BUILTIN
    command: tuple[str, ...] | None = None

    def make_vocab(self, data: bytes) -> Vocabulary:
        if self.bpe_size is None:
            return BYTE_LEVEL
        return train_bpe(data[: self.bpe_sample], self.bpe_size)


@dataclass
class BenchResult:
    records: list[BenchRecord]
    failures: list[tuple[str, str]]

    @property
    def ok(self) -> bool:
        return not self.failures


def improvement(gzip_size: int, pipeline_size: int) -> float:
    """Relative size reduction in percent; negative when the pipeline loses."""
    if gzip_size == 0:
        raise UndefinedMetricError("improvement is undefined for a zero gzip size")
    return 100.0 * (gzip_size - pipeline_size) / gzip_size


def run_benchmark(datasets, options: PipelineOptions = PipelineOptions()) -> BenchResult:
    """Measure every (label, bytes) dataset sequentially.

    Vocabulary training happens outside the timed region, mirroring a
    pretrained preprocessor; its size still counts against the pipeline via
    the embedded table. A dataset whose pipeline output fails byte-exact
    roundtrip is excluded from the records and reported as a failure.
    """
    records: list[BenchRecord] = []
    failures: list[tuple[str, str]] = []
    for label, data in datasets:
        data = bytes(data)
        try:
            t0 = time.perf_counter()
            gz = gzip_compress(data, options.level)
            t1 = time.perf_counter()
            vocab = options.make_vocab(data)
            t2 = time.perf_counter()
            artifact = compress(
                data,
                vocab=vocab,
                order=options.order,
                level=options.level,
                predictor=options.predictor,
                command=options.command,
            )
            t3 = time.perf_counter()
            restored = decompress(artifact, command=options.command)
        except GpzError as exc:
            failures.append((label, str(exc)))
            continue
        if restored != data:
            failures.append((label, "roundtrip produced different bytes"))
            continue
        records.append(
            BenchRecord(
                label=label,
                original_bytes=len(data),
                gzip_bytes=len(gz),
                pipeline_bytes=len(artifact),
                improvement_pct=improvement(len(gz), len(artifact)),
                gzip_seconds=t1 - t0,
                pipeline_seconds=t3 - t2,
                verified=True,
            )
        )
    return BenchResult(records, failures)


_TABLE_HEADERS = (
    "Dataset",
    "Original Size",
    "Gzip Size",
    "Pipeline Size",
    "Improvement",
    "Gzip Time (s)",
    "Pipeline Time (s)",
)


def render_report(records, fmt: str = "table") -> bytes:
    """Render records as an aligned text table or as CSV."""
    if fmt == "table":
        return _render_table(records)
    if fmt == "csv":
        return _render_csv(records)
    raise ConfigError(f"unknown report format {fmt!r}")


def _render_table(records) -> bytes:
    rows = [
        (
            r.label,
            f"{r.original_bytes:,} B",
            f"{r.gzip_bytes:,} B",
            f"{r.pipeline_bytes:,} B",
            f"{r.improvement_pct:.2f}%",
            f"{r.gzip_seconds:.3f}",
            f"{r.pipeline_seconds:.3f}",
        )
        for r in records
    ]
    widths = [
        max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
        for i, h in enumerate(_TABLE_HEADERS)
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(_TABLE_HEADERS)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.rjust(widths[i]) if i else cell.ljust(widths[i])
                               for i, cell in enumerate(row)).rstrip())
    return ("\n".join(lines) + "\n").encode()


def _render_csv(records) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.label,
                r.original_bytes,
                r.gzip_bytes,
                r.pipeline_bytes,
                repr(r.improvement_pct),
                repr(r.gzip_seconds),
                repr(r.pipeline_seconds),
                "true" if r.verified else "false",
            ]
        )
    return buf.getvalue().encode()


def parse_report_csv(data: bytes) -> list[BenchRecord]:
    """Exact inverse of render_report(..., "csv")."""
    reader = csv.reader(io.StringIO(data.decode()))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ConfigError(f"unexpected CSV header: {header}")
    records = []
    for row in reader:
        label, osz, gsz, psz, imp, gsec, psec, verified = row
        records.append(
            BenchRecord(
                label=label,
                original_bytes=int(osz),
                gzip_bytes=int(gsz),
                pipeline_bytes=int(psz),
                improvement_pct=float(imp),
                gzip_seconds=float(gsec),
                pipeline_seconds=float(psec),
                verified=verified == "true",
            )
        )
    return records
