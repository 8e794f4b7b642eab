"""Self-describing compressed file format binding header, vocabulary, and payload.

Layout, byte-exact and in order:

    magic "GPZ1" (4) | version u8 | tokenizer-mode u8 | predictor-kind u8 |
    order-k u8 | vocab-size u32-LE | original-length u64-LE | crc32 u32-LE |
    [BPE merge table, only when tokenizer-mode is 1] | gzip member to EOF

The gzip member is a standards-conformant single RFC 1952 member whose
decompressed content is the serialized rank stream, so any stock gzip tool
can extract the preprocessed bytes. The CRC-32 (IEEE polynomial, reflected,
init and final xor 0xFFFFFFFF) and original length of the raw input are
verified on every decompress.
"""

from __future__ import annotations

import gzip
import struct
import zlib

from .errors import ConfigError, FormatError, IntegrityError
from .predictor import KIND_BUILTIN, KIND_EXTERNAL, PredictorConfig
from .tokenizer import BYTE_LEVEL, Vocabulary, detokenize, read_table, tokenize, write_table
from .transform import deserialize_ranks, forward, inverse, serialize_ranks

MAGIC = b"GPZ1"
VERSION = 1
HEADER_SIZE = 24

MODE_BYTE = 0
MODE_BPE = 1

DEFAULT_ORDER = 3
DEFAULT_LEVEL = 6

FILE_SUFFIX = ".gpz"


def gzip_compress(data: bytes, level: int = DEFAULT_LEVEL) -> bytes:
    """RFC 1952 single-member compression with a pinned zero mtime."""
    if not 1 <= level <= 9:
        raise ConfigError(f"gzip level must be in 1..9, got {level}")
    return gzip.compress(data, compresslevel=level, mtime=0)


def gzip_decompress(data: bytes) -> bytes:
    try:
        return gzip.decompress(data)
    except (EOFError, zlib.error, OSError) as exc:
        raise IntegrityError(f"corrupt gzip member: {exc}") from exc


def compress(
    data: bytes,
    *,
    vocab: Vocabulary | None = None,
    order: int = DEFAULT_ORDER,
    level: int = DEFAULT_LEVEL,
    predictor: str = KIND_BUILTIN,
    command=None,
) -> bytes:
    """Run tokenize -> rank transform -> gzip and wrap the result."""
    data = bytes(data)
    if vocab is None:
        vocab = BYTE_LEVEL
    config = PredictorConfig(
        kind=predictor,
        order=order,
        vocab_size=vocab.size,
        command=tuple(command) if command else None,
    )
    config.validate()
    tokens = tokenize(data, vocab)
    ranks = forward(tokens, config)
    payload = gzip_compress(serialize_ranks(ranks), level)
    mode = MODE_BYTE if vocab.is_byte_level else MODE_BPE
    header = MAGIC + struct.pack("<BB", VERSION, mode) + config.pack()
    header += struct.pack("<QI", len(data), zlib.crc32(data))
    table = b"" if mode == MODE_BYTE else write_table(vocab)
    return header + table + payload


def decompress(blob: bytes, *, command=None) -> bytes:
    """Exact inverse of compress; verifies length and checksum of the output."""
    blob = bytes(blob)
    if len(blob) < HEADER_SIZE:
        raise FormatError(f"container shorter than the {HEADER_SIZE}-byte header")
    if blob[:4] != MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {MAGIC!r}")
    version, mode = struct.unpack_from("<BB", blob, 4)
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    if mode not in (MODE_BYTE, MODE_BPE):
        raise FormatError(f"unknown tokenizer mode {mode}")
    config = PredictorConfig.unpack(blob, 6)
    original_length, crc = struct.unpack_from("<QI", blob, 12)
    offset = HEADER_SIZE
    if mode == MODE_BYTE:
        if config.vocab_size != 256:
            raise FormatError(
                f"byte-level container declares vocabulary of {config.vocab_size}"
            )
        vocab = BYTE_LEVEL
    else:
        vocab, offset = read_table(blob, offset)
        if vocab.size != config.vocab_size:
            raise FormatError(
                f"vocabulary table holds {vocab.size} tokens, header says {config.vocab_size}"
            )
    if config.kind == KIND_EXTERNAL:
        if not command:
            raise ConfigError(
                "container was written with an external predictor; pass its command"
            )
        config = PredictorConfig(
            kind=KIND_EXTERNAL,
            order=config.order,
            vocab_size=config.vocab_size,
            command=tuple(command),
        )
    rank_bytes = gzip_decompress(blob[offset:])
    expected = original_length if mode == MODE_BYTE else None
    ranks = deserialize_ranks(rank_bytes, expected)
    data = detokenize(inverse(ranks, config), vocab)
    if len(data) != original_length:
        raise IntegrityError(
            f"recovered {len(data)} bytes, header says {original_length}"
        )
    if zlib.crc32(data) != crc:
        raise IntegrityError("checksum mismatch on recovered data")
    return data


def split_container(blob: bytes) -> tuple[dict, bytes]:
    """Parse a container into its header fields and raw gzip member.

    Useful for interop checks: the returned member is a complete RFC 1952
    stream as written.
    """
    blob = bytes(blob)
    if len(blob) < HEADER_SIZE or blob[:4] != MAGIC:
        raise FormatError("not a gpz container")
    version, mode = struct.unpack_from("<BB", blob, 4)
    config = PredictorConfig.unpack(blob, 6)
    original_length, crc = struct.unpack_from("<QI", blob, 12)
    offset = HEADER_SIZE
    vocab = BYTE_LEVEL
    if mode == MODE_BPE:
        vocab, offset = read_table(blob, offset)
    fields = {
        "version": version,
        "mode": mode,
        "config": config,
        "vocab": vocab,
        "original_length": original_length,
        "crc32": crc,
    }
    return fields, blob[offset:]
