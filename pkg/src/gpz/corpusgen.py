"""Deterministic corpus generation: structured synthetic logs and block scaling.

Generation is a pure function of a LogGenSpec. All randomness comes from an
xorshift64* generator whose algorithm and constants are part of the format
contract, so identical specs produce identical bytes on every platform:

    state ^= state >> 12
    state ^= (state << 25) & 2**64-1
    state ^= state >> 27
    output = (state * 0x2545F4914F6CDD1D) & 2**64-1

A zero seed is replaced with 0x9E3779B97F4A7C15 (the generator requires a
nonzero state). Bounded draws use `output % n`.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import ConfigError

_MASK64 = (1 << 64) - 1
_SEED_SUBSTITUTE = 0x9E3779B97F4A7C15
_MULTIPLIER = 0x2545F4914F6CDD1D

_ID_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"
_ID_LENGTH = 6


class Xorshift64Star:
    """The PRNG behind all corpus generation; see the module docstring."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = (seed & _MASK64) or _SEED_SUBSTITUTE

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULTIPLIER) & _MASK64

    def below(self, n: int) -> int:
        return self.next_u64() % n


DEFAULT_LEVELS = ("INFO", "WARN", "ERROR", "DEBUG")

DEFAULT_COMPONENTS = (
    "AuthService",
    "DbPool",
    "CacheLayer",
    "ApiGateway",
    "Scheduler",
    "WorkerPool",
)

# Checked-in default template pool: eight messages, one or two numeric
# placeholders each. `{num}` draws a decimal below number_limit, `{id}`
# draws six base-36 characters; placeholders fill left to right.
DEFAULT_TEMPLATES = (
    "Request {num} completed in {num} ms",
    "Connection pool size now {num}",
    "User session {num} expired after {num} s",
    "Cache hit ratio {num} percent",
    "Retrying job {num}, attempt {num}",
    "Heartbeat OK, latency {num} ms",
    "Queue depth {num} exceeds threshold {num}",
    "Disk usage at {num} percent on volume {num}",
)

DEFAULT_START = 1704067200  # 2024-01-01 00:00:00 UTC
TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"


@dataclass(frozen=True)
class LogGenSpec:
    """Everything that determines a generated log corpus, seed included."""

    seed: int = 1
    lines: int = 1000
    levels: tuple[str, ...] = DEFAULT_LEVELS
    components: tuple[str, ...] = DEFAULT_COMPONENTS
    templates: tuple[str, ...] = DEFAULT_TEMPLATES
    start: int = DEFAULT_START
    step: int = 1
    number_limit: int = 100000

    def validate(self) -> None:
        if self.lines < 0:
            raise ConfigError(f"line count must be >= 0, got {self.lines}")
        for name in ("levels", "components", "templates"):
            pool = getattr(self, name)
            if not pool:
                raise ConfigError(f"{name} pool must not be empty")
        if self.step < 0:
            raise ConfigError(f"timestamp step must be >= 0, got {self.step}")
        if self.number_limit < 1:
            raise ConfigError(f"number limit must be >= 1, got {self.number_limit}")


def _split_template(template: str) -> list[tuple[str, str | None]]:
    """Break a template into (literal, placeholder) pieces, left to right."""
    pieces = []
    rest = template
    while True:
        n = rest.find("{num}")
        i = rest.find("{id}")
        if n < 0 and i < 0:
            pieces.append((rest, None))
            return pieces
        if i < 0 or (0 <= n < i):
            pieces.append((rest[:n], "num"))
            rest = rest[n + 5:]
        else:
            pieces.append((rest[:i], "id"))
            rest = rest[i + 4:]


def generate_logs(spec: LogGenSpec) -> bytes:
    """Emit `[timestamp] [LEVEL] (Component) - Message` lines per the spec.

    Per line the generator draws, in this order: level, component, template,
    then one value per placeholder left to right. Timestamps advance by
    spec.step seconds per line from spec.start.
    """
    spec.validate()
    rng = Xorshift64Star(spec.seed)
    levels = spec.levels
    components = spec.components
    compiled = [_split_template(t) for t in spec.templates]
    nlevels = len(levels)
    ncomponents = len(components)
    ntemplates = len(compiled)
    limit = spec.number_limit
    below = rng.below
    lines = []
    for i in range(spec.lines):
        stamp = datetime.fromtimestamp(
            spec.start + i * spec.step, tz=timezone.utc
        ).strftime(TIMESTAMP_FORMAT)
        level = levels[below(nlevels)]
        component = components[below(ncomponents)]
        pieces = compiled[below(ntemplates)]
        parts = []
        for literal, kind in pieces:
            parts.append(literal)
            if kind == "num":
                parts.append(str(below(limit)))
            elif kind == "id":
                parts.append("".join(_ID_ALPHABET[below(36)] for _ in range(_ID_LENGTH)))
        message = "".join(parts)
        lines.append(f"[{stamp}] [{level}] ({component}) - {message}\n")
    return "".join(lines).encode("utf-8")


def repeat_to_size(block: bytes, target: int) -> bytes:
    """Duplicate a block whole until it covers `target` bytes.

    The result is always a whole number of blocks: length is in
    [target, target + len(block)).
    """
    if not block:
        raise ConfigError("cannot repeat an empty block")
    if target < 1:
        raise ConfigError(f"target size must be >= 1, got {target}")
    reps = -(-target // len(block))
    return bytes(block) * reps


def parse_spec_file(text: str) -> LogGenSpec:
    """Read a LogGenSpec from `key=value` lines.

    Keys: seed, lines, levels, components, template (repeatable), start,
    step, number-limit. Lists are comma-separated; start accepts either an
    epoch integer or `YYYY-MM-DD HH:MM:SS` (UTC). Blank lines and lines
    starting with `#` are skipped.
    """
    fields: dict = {}
    templates: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"spec line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "seed":
            fields["seed"] = _parse_int(key, value)
        elif key == "lines":
            fields["lines"] = _parse_int(key, value)
        elif key == "levels":
            fields["levels"] = _parse_list(key, value)
        elif key == "components":
            fields["components"] = _parse_list(key, value)
        elif key == "template":
            templates.append(value)
        elif key == "start":
            fields["start"] = parse_timestamp(value)
        elif key == "step":
            fields["step"] = _parse_int(key, value)
        elif key == "number-limit":
            fields["number_limit"] = _parse_int(key, value)
        else:
            raise ConfigError(f"spec line {lineno}: unknown key {key!r}")
    if templates:
        fields["templates"] = tuple(templates)
    spec = LogGenSpec(**fields)
    spec.validate()
    return spec


def parse_timestamp(value: str) -> int:
    """Epoch seconds from either an integer or `YYYY-MM-DD HH:MM:SS` UTC."""
    try:
        return int(value)
    except ValueError:
        pass
    try:
        dt = datetime.strptime(value, TIMESTAMP_FORMAT)
    except ValueError as exc:
        raise ConfigError(f"bad timestamp {value!r}: {exc}") from None
    return int(dt.replace(tzinfo=timezone.utc).timestamp())


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _parse_list(key: str, value: str) -> tuple[str, ...]:
    items = tuple(item.strip() for item in value.split(",") if item.strip())
    if not items:
        raise ConfigError(f"{key} must list at least one item")
    return items
