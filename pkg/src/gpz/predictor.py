"""Adaptive order-k context model producing deterministic next-token rankings.

The model keeps, for every order o in 0..k, occurrence counts of each token
under the length-o context that preceded it. A prediction ranks the whole
vocabulary using the highest order whose current context has been seen at
least once: seen tokens sorted by descending count, then ascending id;
unseen tokens follow in ascending id order. Encoder and decoder run one
instance each and stay in lockstep because every step's ranking is a pure
function of the tokens consumed so far.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import ConfigError, ContractViolationError, MalformedStreamError

KIND_BUILTIN = "builtin"
KIND_EXTERNAL = "external"

_KIND_CODES = {KIND_BUILTIN: 0, KIND_EXTERNAL: 1}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}

MAX_ORDER = 8

# Context records are plain dicts mapping token -> count, with the current
# top-ranked token cached under the sentinel key -1.
_TOP = -1


@dataclass(frozen=True)
class PredictorConfig:
    """Predictor identity as serialized into the container header.

    `command` is the argv used to launch an external predictor process; it is
    never serialized, so decoding an external-kind container requires the
    caller to supply the matching command again.
    """

    kind: str = KIND_BUILTIN
    order: int = 3
    vocab_size: int = 256
    command: tuple[str, ...] | None = None

    def validate(self) -> None:
        if self.kind not in _KIND_CODES:
            raise ConfigError(f"unknown predictor kind {self.kind!r}")
        if self.kind == KIND_BUILTIN and not 0 <= self.order <= MAX_ORDER:
            raise ConfigError(f"context order must be in 0..{MAX_ORDER}, got {self.order}")
        if self.vocab_size < 1:
            raise ConfigError(f"vocabulary size must be positive, got {self.vocab_size}")
        if self.kind == KIND_EXTERNAL and not self.command:
            raise ConfigError("external predictor requires a command")

    def pack(self) -> bytes:
        """Header form: kind u8, order u8, vocab-size u32-LE."""
        self.validate()
        return struct.pack("<BBI", _KIND_CODES[self.kind], self.order, self.vocab_size)

    @classmethod
    def unpack(cls, data: bytes, offset: int = 0) -> "PredictorConfig":
        kind_code, order, vocab_size = struct.unpack_from("<BBI", data, offset)
        if kind_code not in _KIND_NAMES:
            raise ConfigError(f"unknown predictor kind code {kind_code}")
        return cls(kind=_KIND_NAMES[kind_code], order=order, vocab_size=vocab_size)


def _rank_in(rec: dict, t: int) -> int:
    """Rank of token t under a context record (skips the cached-top sentinel)."""
    c = rec.get(t)
    if c is None:
        seen = 0
        below = 0
        for s in rec:
            if s >= 0:
                seen += 1
                if s < t:
                    below += 1
        return seen + t - below
    n = 0
    for s, cs in rec.items():
        if s < 0 or s == t:
            continue
        if cs > c or (cs == c and s < t):
            n += 1
    return n


def _token_in(rec: dict, r: int) -> int:
    """Token at rank r under a context record; r must be < vocab size."""
    seen = [(s, c) for s, c in rec.items() if s >= 0]
    if r < len(seen):
        seen.sort(key=lambda sc: (-sc[1], sc[0]))
        return seen[r][0]
    u = r - len(seen)
    prev = -1
    for s in sorted(s for s, _ in seen):
        gap = s - prev - 1
        if u < gap:
            return prev + 1 + u
        u -= gap
        prev = s
    return prev + 1 + u


class Ranking:
    """Snapshot bijection between ranks and token ids for one prediction."""

    __slots__ = ("vocab_size", "_counts")

    def __init__(self, vocab_size: int, counts: dict):
        self.vocab_size = vocab_size
        self._counts = counts

    def rank_of(self, token: int) -> int:
        if not 0 <= token < self.vocab_size:
            raise ContractViolationError(f"token {token} outside vocabulary of {self.vocab_size}")
        return _rank_in(self._counts, token)

    def token_at(self, rank: int) -> int:
        if not 0 <= rank < self.vocab_size:
            raise MalformedStreamError(f"rank {rank} outside vocabulary of {self.vocab_size}")
        return _token_in(self._counts, rank)


class ContextModel:
    """Builtin order-k predictor; single-owner, mutated sequentially."""

    __slots__ = ("config", "vocab_size", "order", "_tabs", "_keys", "_steps")

    def __init__(self, config: PredictorConfig):
        if config.kind != KIND_BUILTIN:
            raise ConfigError(f"ContextModel requires a builtin config, got {config.kind!r}")
        config.validate()
        self.config = config
        self.vocab_size = config.vocab_size
        self.order = config.order
        self.reset()

    def reset(self) -> None:
        """Drop all counts and context; equivalent to a freshly built model."""
        self._tabs = [{} for _ in range(self.order + 1)]
        self._keys = [0] * (self.order + 1)
        self._steps = 0

    def _select(self) -> dict | None:
        """Record of the highest full order whose context has been seen."""
        keys = self._keys
        tabs = self._tabs
        o = self.order
        if self._steps < o:
            o = self._steps
        while o >= 0:
            rec = tabs[o].get(keys[o])
            if rec is not None:
                return rec
            o -= 1
        return None

    def predict(self) -> Ranking:
        rec = self._select()
        counts = {} if rec is None else {s: c for s, c in rec.items() if s >= 0}
        return Ranking(self.vocab_size, counts)

    def update(self, token: int) -> None:
        """Count `token` under every full-context order, then extend the context."""
        if not 0 <= token < self.vocab_size:
            raise ContractViolationError(
                f"token {token} outside vocabulary of {self.vocab_size}"
            )
        self._update(token)

    def _update(self, t: int) -> None:
        keys = self._keys
        tabs = self._tabs
        k = self.order
        m = k if self._steps >= k else self._steps
        for o in range(m + 1):
            tab = tabs[o]
            key = keys[o]
            rec = tab.get(key)
            if rec is None:
                tab[key] = {_TOP: t, t: 1}
            else:
                c = rec.get(t, 0) + 1
                rec[t] = c
                top = rec[_TOP]
                if t != top:
                    ct = rec[top]
                    if c > ct or (c == ct and t < top):
                        rec[_TOP] = t
        V = self.vocab_size
        for o in range(k, 0, -1):
            keys[o] = keys[o - 1] * V + t
        self._steps += 1

    def rank_then_update(self, token: int) -> int:
        """predict().rank_of(token) followed by update(token), fused."""
        if not 0 <= token < self.vocab_size:
            raise ContractViolationError(
                f"token {token} outside vocabulary of {self.vocab_size}"
            )
        rec = self._select()
        if rec is None:
            rank = token
        elif token == rec[_TOP]:
            rank = 0
        else:
            rank = _rank_in(rec, token)
        self._update(token)
        return rank

    def token_then_update(self, rank: int) -> int:
        """predict().token_at(rank) followed by update of that token, fused."""
        if not 0 <= rank < self.vocab_size:
            raise MalformedStreamError(
                f"rank {rank} outside vocabulary of {self.vocab_size}"
            )
        rec = self._select()
        if rec is None:
            token = rank
        elif rank == 0:
            token = rec[_TOP]
        else:
            token = _token_in(rec, rank)
        self._update(token)
        return token

    def ranks_for(self, tokens) -> list[int]:
        """rank_then_update over a whole stream in one pass.

        Identical to calling rank_then_update per token; written as a single
        loop because streams run to tens of millions of tokens.
        """
        tokens = list(tokens)
        V = self.vocab_size
        if tokens and not (0 <= min(tokens) and max(tokens) < V):
            bad = next(t for t in tokens if not 0 <= t < V)
            raise ContractViolationError(f"token {bad} outside vocabulary of {V}")
        k = self.order
        tabs = self._tabs
        keys = self._keys
        steps = self._steps
        roll = tuple(range(k, 0, -1))
        out = []
        append = out.append
        for t in tokens:
            m = k if steps >= k else steps
            o = m
            rec = None
            while o >= 0:
                rec = tabs[o].get(keys[o])
                if rec is not None:
                    break
                o -= 1
            if rec is None:
                append(t)
            elif t == rec[_TOP]:
                append(0)
            else:
                # _rank_in, inlined: this branch runs once per token on
                # low-redundancy input
                c = rec.get(t)
                if c is None:
                    seen = 0
                    below = 0
                    for s in rec:
                        if s >= 0:
                            seen += 1
                            if s < t:
                                below += 1
                    append(seen + t - below)
                else:
                    n = 0
                    for s, cs in rec.items():
                        if cs > c:
                            if s >= 0:
                                n += 1
                        elif cs == c and 0 <= s < t:
                            n += 1
                    append(n)
            for o in range(m + 1):
                tab = tabs[o]
                key = keys[o]
                rec = tab.get(key)
                if rec is None:
                    tab[key] = {_TOP: t, t: 1}
                else:
                    c = rec.get(t, 0) + 1
                    rec[t] = c
                    top = rec[_TOP]
                    if t != top:
                        ct = rec[top]
                        if c > ct or (c == ct and t < top):
                            rec[_TOP] = t
            for o in roll:
                keys[o] = keys[o - 1] * V + t
            steps += 1
        self._steps = steps
        return out

    def tokens_for(self, ranks) -> list[int]:
        """token_then_update over a whole stream in one pass; inverse of ranks_for."""
        ranks = list(ranks)
        V = self.vocab_size
        if ranks and not (0 <= min(ranks) and max(ranks) < V):
            bad = next(r for r in ranks if not 0 <= r < V)
            raise MalformedStreamError(f"rank {bad} outside vocabulary of {V}")
        k = self.order
        tabs = self._tabs
        keys = self._keys
        steps = self._steps
        roll = tuple(range(k, 0, -1))
        out = []
        append = out.append
        for r in ranks:
            m = k if steps >= k else steps
            o = m
            rec = None
            while o >= 0:
                rec = tabs[o].get(keys[o])
                if rec is not None:
                    break
                o -= 1
            if rec is None:
                t = r
            elif r == 0:
                t = rec[_TOP]
            else:
                t = _token_in(rec, r)
            append(t)
            for o in range(m + 1):
                tab = tabs[o]
                key = keys[o]
                rec = tab.get(key)
                if rec is None:
                    tab[key] = {_TOP: t, t: 1}
                else:
                    c = rec.get(t, 0) + 1
                    rec[t] = c
                    top = rec[_TOP]
                    if t != top:
                        ct = rec[top]
                        if c > ct or (c == ct and t < top):
                            rec[_TOP] = t
            for o in roll:
                keys[o] = keys[o - 1] * V + t
            steps += 1
        self._steps = steps
        return out

    def close(self) -> None:
        """No external resources; present for interface parity."""
