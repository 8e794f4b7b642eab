"""Invertible rank transform: token stream <-> stream of prediction ranks.

Forward coding replaces each token with its rank under the predictor's
current ordering, then updates the predictor with the token it just saw.
Inverse coding mirrors this with the same predictor rules, so both sides
walk identical state sequences and the mapping is exactly lossless. The
more predictable the input, the more the output is dominated by small
ranks, which is the redundancy the gzip stage exploits.

Serialized rank streams use unsigned LEB128 varints (7 data bits per byte,
high bit marks continuation), capped at 32 bits per value.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedStreamError
from .external import ExternalPredictor
from .predictor import KIND_BUILTIN, ContextModel, PredictorConfig


def _make_predictor(config: PredictorConfig):
    if config.kind == KIND_BUILTIN:
        return ContextModel(config)
    return ExternalPredictor(config)


def forward(tokens, config: PredictorConfig) -> list[int]:
    """Encode tokens as prediction ranks under a fresh predictor."""
    predictor = _make_predictor(config)
    try:
        return predictor.ranks_for(tokens)
    finally:
        predictor.close()


def inverse(ranks, config: PredictorConfig) -> list[int]:
    """Recover the token stream from ranks; exact inverse of forward."""
    predictor = _make_predictor(config)
    try:
        return predictor.tokens_for(ranks)
    finally:
        predictor.close()


_VARINT_LIMIT = 1 << 32


def serialize_ranks(ranks) -> bytes:
    """Encode ranks as LEB128 varints; values below 128 take one byte."""
    arr = np.asarray(list(ranks), dtype=np.int64)
    if arr.size == 0:
        return b""
    lo, hi = int(arr.min()), int(arr.max())
    if lo < 0 or hi >= _VARINT_LIMIT:
        bad = lo if lo < 0 else hi
        raise MalformedStreamError(f"rank {bad} is not an unsigned 32-bit value")
    if hi < 0x80:
        return arr.astype(np.uint8).tobytes()
    widths = (
        1
        + (arr >= 1 << 7).astype(np.int64)
        + (arr >= 1 << 14)
        + (arr >= 1 << 21)
        + (arr >= 1 << 28)
    )
    ends = np.cumsum(widths)
    starts = ends - widths
    out = np.zeros(int(ends[-1]), dtype=np.uint8)
    pending = arr.copy()
    for j in range(5):
        sel = widths > j
        if not sel.any():
            break
        byte = (pending[sel] & 0x7F).astype(np.uint8)
        byte[widths[sel] > j + 1] |= 0x80
        out[starts[sel] + j] = byte
        pending[sel] = pending[sel] >> 7
    return out.tobytes()


def deserialize_ranks(data: bytes, expected_count: int | None = None) -> list[int]:
    """Decode LEB128 varints back into ranks.

    With an expected_count, the stream must hold exactly that many values;
    with None it is read to exhaustion. Truncated varints, varints wider
    than 32 bits, and count mismatches all fail.
    """
    arr = np.frombuffer(bytes(data), dtype=np.uint8)
    if arr.size == 0:
        if expected_count:
            raise MalformedStreamError(f"rank stream holds 0 values, expected {expected_count}")
        return []
    cont = arr >= 0x80
    if cont[-1]:
        raise MalformedStreamError("rank stream ends inside a varint")
    ends = np.flatnonzero(~cont)
    starts = np.concatenate(([0], ends[:-1] + 1))
    widths = ends - starts + 1
    if int(widths.max()) > 5:
        raise MalformedStreamError("varint exceeds 32 bits")
    if expected_count is not None and ends.size != expected_count:
        raise MalformedStreamError(
            f"rank stream holds {ends.size} values, expected {expected_count}"
        )
    # accumulate from each varint's last byte (highest 7-bit group) backwards
    values = arr[ends].astype(np.int64)
    for back in range(1, 5):
        sel = widths > back
        if not sel.any():
            break
        values[sel] = (values[sel] << 7) | (arr[ends[sel] - back] & 0x7F).astype(np.int64)
    if (values >= _VARINT_LIMIT).any():
        raise MalformedStreamError("varint exceeds 32 bits")
    return values.tolist()
