"""Client for external predictor processes speaking the framed line protocol.

The plugin runs as a subprocess exchanging newline-delimited text frames on
its standard streams: `HELLO <version>` / `OK vocab=<N>`, `RESET` / `OK`,
`RANK <token>` / `R <rank>`, `TOKEN <rank>` / `T <token>`, errors as
`ERR <message>`. RANK and TOKEN both advance the plugin's context, so the
encoder's RANK sequence and the decoder's TOKEN sequence traverse identical
model states.
"""

from __future__ import annotations

import subprocess

from .errors import ConfigError, ContractViolationError, MalformedStreamError
from .predictor import KIND_EXTERNAL, PredictorConfig

PROTOCOL_VERSION = 1


class ExternalPredictor:
    """One plugin process serving exactly one stream, request-response only."""

    def __init__(self, config: PredictorConfig):
        if config.kind != KIND_EXTERNAL:
            raise ConfigError(f"ExternalPredictor requires an external config, got {config.kind!r}")
        config.validate()
        self.config = config
        self.vocab_size = config.vocab_size
        self._proc = subprocess.Popen(
            list(config.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        reply = self._exchange(f"HELLO {PROTOCOL_VERSION}")
        if not reply.startswith("OK vocab="):
            self._fail(f"bad HELLO response: {reply!r}")
        try:
            vocab = int(reply.split("=", 1)[1])
        except ValueError:
            self._fail(f"bad HELLO response: {reply!r}")
        if vocab != config.vocab_size:
            self.close()
            raise ConfigError(
                f"predictor vocabulary mismatch: plugin serves {vocab}, "
                f"stream needs {config.vocab_size}"
            )

    def _fail(self, message: str):
        self.close()
        raise ContractViolationError(f"external predictor: {message}")

    def _exchange(self, request: str) -> str:
        proc = self._proc
        try:
            proc.stdin.write(request + "\n")
            proc.stdin.flush()
            reply = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            self._fail(f"process died during {request.split()[0]}: {exc}")
        if not reply:
            self._fail(f"process closed its output during {request.split()[0]}")
        reply = reply.rstrip("\n")
        if reply.startswith("ERR"):
            self._fail(reply)
        return reply

    def reset(self) -> None:
        reply = self._exchange("RESET")
        if reply != "OK":
            self._fail(f"bad RESET response: {reply!r}")

    def rank_then_update(self, token: int) -> int:
        if not 0 <= token < self.vocab_size:
            raise ContractViolationError(
                f"token {token} outside vocabulary of {self.vocab_size}"
            )
        reply = self._exchange(f"RANK {token}")
        if not reply.startswith("R "):
            self._fail(f"bad RANK response: {reply!r}")
        return int(reply[2:])

    def token_then_update(self, rank: int) -> int:
        if not 0 <= rank < self.vocab_size:
            raise MalformedStreamError(
                f"rank {rank} outside vocabulary of {self.vocab_size}"
            )
        reply = self._exchange(f"TOKEN {rank}")
        if not reply.startswith("T "):
            self._fail(f"bad TOKEN response: {reply!r}")
        return int(reply[2:])

    def ranks_for(self, tokens) -> list[int]:
        return [self.rank_then_update(t) for t in tokens]

    def tokens_for(self, ranks) -> list[int]:
        return [self.token_then_update(r) for r in ranks]

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
        if proc.stdout:
            proc.stdout.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
