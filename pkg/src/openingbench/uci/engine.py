"""Client side of the UCI protocol for engines running as subprocesses."""

from __future__ import annotations

import logging
import os
import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..rules import ChessError, Move, Position, STARTING_FEN, to_fen

log = logging.getLogger(__name__)

ENGINE_ENV_VAR = "OPENINGBENCH_ENGINE"
DEFAULT_DEPTH = 22


class EngineError(RuntimeError):
    """An engine misbehaved; ``transcript`` holds the exchange so far."""

    def __init__(self, message: str, transcript: Sequence[str] = ()):
        super().__init__(message)
        self.transcript = list(transcript)

    def __str__(self) -> str:
        base = super().__str__()
        if not self.transcript:
            return base
        tail = "\n".join(self.transcript[-20:])
        return f"{base}\n--- engine transcript (last lines) ---\n{tail}"


class LaunchError(EngineError):
    pass


class HandshakeTimeout(EngineError):
    pass


class OptionRejected(EngineError):
    pass


class MoveTimeout(EngineError):
    pass


class IllegalBestMove(EngineError):
    pass


@dataclass(frozen=True)
class SearchLimit:
    depth: Optional[int] = DEFAULT_DEPTH
    movetime_ms: Optional[int] = None

    def __post_init__(self) -> None:
        if self.depth is None and self.movetime_ms is None:
            raise ValueError("a search limit needs a depth or a move time")
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be at least 1, got {self.depth}")
        if self.movetime_ms is not None and self.movetime_ms <= 0:
            raise ValueError("movetime must be positive")

    def go_command(self) -> str:
        if self.depth is not None:
            return f"go depth {self.depth}"
        return f"go movetime {self.movetime_ms}"


@dataclass(frozen=True)
class EngineConfig:
    command: tuple[str, ...]
    options: Mapping[str, str] = field(default_factory=dict)
    limit: SearchLimit = SearchLimit()
    handshake_timeout: float = 10.0
    move_timeout: float = 300.0

    def __post_init__(self) -> None:
        if isinstance(self.command, str):
            object.__setattr__(self, "command", (self.command,))
        else:
            object.__setattr__(self, "command", tuple(self.command))
        if not self.command:
            raise ValueError("an engine command is required")
        if self.handshake_timeout <= 0 or self.move_timeout <= 0:
            raise ValueError("timeouts must be positive")
        object.__setattr__(self, "options", {str(k): str(v) for k, v in self.options.items()})

    @classmethod
    def from_env(cls, **kwargs) -> EngineConfig:
        value = os.environ.get(ENGINE_ENV_VAR)
        if not value:
            raise LaunchError(f"set {ENGINE_ENV_VAR} to the engine command")
        return cls(tuple(shlex.split(value)), **kwargs)

    def setoption_lines(self) -> list[str]:
        return [f"setoption name {name} value {value}" for name, value in self.options.items()]


@dataclass(frozen=True)
class SearchResult:
    move: Move
    depth: Optional[int]


_EOF = object()


class EngineSession:
    """A running engine speaking UCI over its stdin/stdout.

    A background thread feeds stdout lines into a queue so that every read
    can time out.  Sessions belong to one thread at a time.
    """

    def __init__(self, config: EngineConfig):
        self.config = config
        self.name = config.command[0]
        self.advertised: dict[str, str] = {}
        self.transcript: list[str] = []
        self._lines: queue.Queue = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                list(config.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise LaunchError(f"cannot start {config.command[0]!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\r\n"))
        self._lines.put(_EOF)

    @property
    def alive(self) -> bool:
        return self._proc.poll() is None

    def send(self, line: str) -> None:
        self.transcript.append(f"> {line}")
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise EngineError(f"engine pipe closed while sending {line!r}", self.transcript) from exc

    def read_line(self, deadline: float, error=EngineError) -> str:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise error("timed out waiting for the engine", self.transcript)
        try:
            line = self._lines.get(timeout=remaining)
        except queue.Empty:
            raise error("timed out waiting for the engine", self.transcript) from None
        if line is _EOF:
            self._lines.put(_EOF)
            raise EngineError("engine exited unexpectedly", self.transcript)
        self.transcript.append(f"< {line}")
        return line

    def wait_for(self, token: str, timeout: float, error=EngineError) -> list[str]:
        """Read lines until one starts with ``token``; return all lines read."""
        deadline = time.monotonic() + timeout
        seen = []
        while True:
            line = self.read_line(deadline, error)
            seen.append(line)
            if line.split(maxsplit=1)[:1] == [token]:
                return seen

    def handshake(self) -> None:
        timeout = self.config.handshake_timeout
        self.send("uci")
        for line in self.wait_for("uciok", timeout, HandshakeTimeout):
            words = line.split()
            if words[:2] == ["id", "name"]:
                self.name = line.split(None, 2)[2]
            elif words[:2] == ["option", "name"]:
                rest = line.split(None, 2)[2]
                opt_name = rest.split(" type ")[0].strip()
                self.advertised[opt_name.lower()] = rest
        for name in self.config.options:
            if name.lower() not in self.advertised:
                raise OptionRejected(f"engine does not offer option {name!r}", self.transcript)
        for line in self.config.setoption_lines():
            self.send(line)
        self.send("isready")
        replies = self.wait_for("readyok", timeout, HandshakeTimeout)
        for line in replies:
            low = line.lower()
            if "no such option" in low or "unknown option" in low:
                raise OptionRejected(f"engine rejected an option: {line}", self.transcript)

    def new_game(self) -> None:
        self.send("ucinewgame")
        self.send("isready")
        self.wait_for("readyok", self.config.handshake_timeout, HandshakeTimeout)

    def go(self, pos: Position, moves: Optional[Sequence[Move]] = None, limit: Optional[SearchLimit] = None) -> SearchResult:
        limit = limit or self.config.limit
        if moves is not None:
            cmd = "position startpos"
            if moves:
                cmd += " moves " + " ".join(m.uci() for m in moves)
        else:
            fen = to_fen(pos)
            cmd = "position startpos" if fen == STARTING_FEN else f"position fen {fen}"
        self.send(cmd)
        self.send(limit.go_command())
        lines = self.wait_for("bestmove", self.config.move_timeout, MoveTimeout)
        depth = None
        for line in lines:
            words = line.split()
            if words[:1] == ["info"] and "depth" in words:
                try:
                    depth = int(words[words.index("depth") + 1])
                except (IndexError, ValueError):
                    pass
        words = lines[-1].split()
        if len(words) < 2:
            raise IllegalBestMove("bestmove without a move", self.transcript)
        try:
            move = Move.from_uci(words[1])
        except ChessError:
            raise IllegalBestMove(f"unparseable bestmove {words[1]!r}", self.transcript) from None
        if move not in pos.legal:
            raise IllegalBestMove(
                f"engine played illegal move {words[1]} in {to_fen(pos)}", self.transcript
            )
        return SearchResult(move, depth)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self.send("quit")
            except EngineError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                if stream:
                    stream.close()
            except OSError:
                pass

    def __enter__(self) -> EngineSession:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def launch(config: EngineConfig) -> EngineSession:
    """Start an engine and complete the UCI handshake, applying all options."""
    session = EngineSession(config)
    try:
        session.handshake()
    except BaseException:
        session.close()
        raise
    log.debug("engine %s ready", session.name)
    return session


def best_move(
    session,
    pos: Position,
    limit: Optional[SearchLimit] = None,
    moves: Optional[Sequence[Move]] = None,
) -> Move:
    """Ask ``session`` for its move in ``pos``; the reply is checked for legality."""
    return session.go(pos, moves, limit).move
