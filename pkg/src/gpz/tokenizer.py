"""Byte-to-token mapping with a byte-level default and trainable BPE merges.

Token ids 0-255 always denote the corresponding single byte. A vocabulary is
fully described by its ordered merge list: merge i combines a pair of existing
ids into the new id 256+i. Applying merges in order, each as one
left-to-right non-overlapping replacement pass, makes tokenization a pure
function of (input, merge list) and therefore exactly invertible.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigError, FormatError, MalformedStreamError

BASE_SIZE = 256

# Training is capped so pair codes fit comfortably in int64 and merge tables
# stay desk-sized.
MAX_VOCAB = 1 << 20

_PAIR_SHIFT = 1 << 20


class Vocabulary:
    """Immutable token vocabulary: 256 byte tokens plus an ordered merge list."""

    __slots__ = ("merges", "_table")

    def __init__(self, merges: tuple[tuple[int, int], ...] = ()):
        merges = tuple((int(a), int(b)) for a, b in merges)
        table = [bytes([i]) for i in range(BASE_SIZE)]
        seen = set(table)
        for i, (a, b) in enumerate(merges):
            nid = BASE_SIZE + i
            if not (0 <= a < nid and 0 <= b < nid):
                raise ConfigError(f"merge {i} references undefined id: ({a}, {b})")
            expansion = table[a] + table[b]
            if expansion in seen:
                raise ConfigError(
                    f"merge {i} -> id {nid} duplicates the byte string of an earlier token"
                )
            seen.add(expansion)
            table.append(expansion)
        self.merges = merges
        self._table = tuple(table)

    @property
    def size(self) -> int:
        return len(self._table)

    @property
    def is_byte_level(self) -> bool:
        return not self.merges

    @property
    def mode(self) -> str:
        return "byte-level" if self.is_byte_level else "bpe"

    def expand(self, token: int) -> bytes:
        """Byte string a single token stands for."""
        if not 0 <= token < len(self._table):
            raise MalformedStreamError(f"unknown token id {token} (vocab size {self.size})")
        return self._table[token]

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.merges == other.merges

    def __hash__(self):
        return hash(self.merges)

    def __repr__(self):
        return f"Vocabulary(mode={self.mode!r}, size={self.size})"


BYTE_LEVEL = Vocabulary()


def tokenize(data: bytes, vocab: Vocabulary = BYTE_LEVEL) -> list[int]:
    """Map bytes to token ids; byte-level mode is the identity on byte values."""
    if vocab.is_byte_level:
        return list(data)
    seq = np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int32)
    nid = BASE_SIZE
    for a, b in vocab.merges:
        seq = _merge_pass(seq, a, b, nid)
        nid += 1
    return seq.tolist()


def detokenize(tokens, vocab: Vocabulary = BYTE_LEVEL) -> bytes:
    """Concatenate per-token byte expansions; exact inverse of tokenize."""
    table = vocab._table
    size = len(table)
    tokens = list(tokens)
    if tokens and not (0 <= min(tokens) and max(tokens) < size):
        bad = next(t for t in tokens if not 0 <= t < size)
        raise MalformedStreamError(f"unknown token id {bad} (vocab size {size})")
    return b"".join([table[t] for t in tokens])


def _merge_pass(seq: np.ndarray, a: int, b: int, nid: int) -> np.ndarray:
    """One left-to-right non-overlapping replacement of (a, b) with nid.

    Matches of a distinct pair can never overlap each other, so they merge
    simultaneously. For a == b, consecutive matches overlap and the greedy
    scan keeps every other one, starting with the first of each run.
    """
    if len(seq) < 2:
        return seq
    mask = (seq[:-1] == a) & (seq[1:] == b)
    if not mask.any():
        return seq
    idx = np.flatnonzero(mask)
    if a == b:
        runs = np.split(idx, np.flatnonzero(np.diff(idx) != 1) + 1)
        idx = np.concatenate([r[::2] for r in runs])
    out = seq.copy()
    out[idx] = nid
    keep = np.ones(len(seq), dtype=bool)
    keep[idx + 1] = False
    return out[keep]


def _pair_counts(seq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping left-to-right counts of every adjacent pair.

    Counting all adjacent positions overcounts pairs (x, x) inside runs of x:
    a run of length L holds L-1 adjacent positions but only L//2 greedy
    occurrences, so those counts are corrected run by run.
    """
    codes = seq[:-1].astype(np.int64) * _PAIR_SHIFT + seq[1:]
    pairs, counts = np.unique(codes, return_counts=True)
    # run-length encode to correct self-pairs
    change = np.flatnonzero(np.diff(seq) != 0)
    starts = np.concatenate(([0], change + 1))
    lengths = np.diff(np.concatenate((starts, [len(seq)])))
    long_runs = lengths >= 2
    if long_runs.any():
        run_vals = seq[starts[long_runs]].astype(np.int64)
        run_lens = lengths[long_runs]
        overcount = (run_lens - 1) - run_lens // 2
        self_codes = run_vals * _PAIR_SHIFT + run_vals
        order = np.argsort(self_codes, kind="stable")
        uniq_codes = self_codes[order]
        uniq_over = overcount[order]
        pos = np.searchsorted(pairs, uniq_codes)
        np.subtract.at(counts, pos, uniq_over)
    return pairs, counts


def train_bpe(corpus: bytes, target_size: int) -> Vocabulary:
    """Learn merges by repeatedly fusing the most frequent adjacent pair.

    Each round counts non-overlapping left-to-right pair occurrences, merges
    the most frequent pair (ties: smaller (first, second) id pair), and stops
    early once no pair occurs at least twice. Deterministic for a given
    (corpus, target_size).
    """
    if target_size < BASE_SIZE:
        raise ConfigError(f"target vocabulary size must be >= {BASE_SIZE}, got {target_size}")
    if target_size > MAX_VOCAB:
        raise ConfigError(f"target vocabulary size must be <= {MAX_VOCAB}, got {target_size}")
    merges: list[tuple[int, int]] = []
    seq = np.frombuffer(bytes(corpus), dtype=np.uint8).astype(np.int32)
    for nid in range(BASE_SIZE, target_size):
        if len(seq) < 2:
            break
        pairs, counts = _pair_counts(seq)
        best = counts.max()
        if best < 2:
            break
        code = int(pairs[counts == best].min())
        a, b = code // _PAIR_SHIFT, code % _PAIR_SHIFT
        merges.append((a, b))
        seq = _merge_pass(seq, a, b, nid)
    return Vocabulary(tuple(merges))


def write_table(vocab: Vocabulary) -> bytes:
    """Serialize the merge list: u32-LE count, then (left, right) u32-LE pairs."""
    out = bytearray(struct.pack("<I", len(vocab.merges)))
    for a, b in vocab.merges:
        out += struct.pack("<II", a, b)
    return bytes(out)


def read_table(data: bytes, offset: int = 0) -> tuple[Vocabulary, int]:
    """Parse a merge table; returns the vocabulary and the offset past it."""
    if len(data) - offset < 4:
        raise FormatError("truncated vocabulary table")
    (count,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if len(data) - offset < 8 * count:
        raise FormatError("truncated vocabulary table")
    merges = []
    for _ in range(count):
        a, b = struct.unpack_from("<II", data, offset)
        merges.append((a, b))
        offset += 8
    try:
        return Vocabulary(tuple(merges)), offset
    except ConfigError as exc:
        raise FormatError(f"invalid vocabulary table: {exc}") from exc
