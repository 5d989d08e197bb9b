"""Engine-vs-engine matches from a forced opening prefix."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from ..model import OutcomeCounts, ProbabilityVector
from ..montecarlo import derive_seed, match_stream
from ..openings import OpeningSpec
from ..records import GameRecord
from ..rules import GameStatus, Outcome, Reason, initial_position, play_unchecked, status
from .engine import EngineConfig, EngineError, SearchLimit, launch

log = logging.getLogger(__name__)

DEFAULT_MAX_FULLMOVES = 250
DEFAULT_RESTART_EVERY = 50


class GameAborted(EngineError):
    """An engine failed mid-game; ``partial`` holds the moves played so far."""

    def __init__(self, message, transcript=(), partial=()):
        super().__init__(message, transcript)
        self.partial = tuple(partial)


def play_game(
    white,
    black,
    opening: OpeningSpec,
    max_fullmoves: int = DEFAULT_MAX_FULLMOVES,
    limit: Optional[SearchLimit] = None,
) -> GameRecord:
    """Force the opening prefix, then let the engines move until the game ends.

    Games still running after ``max_fullmoves`` full moves are adjudicated
    drawn.  ``white`` and ``black`` are sessions offering
    ``go(pos, moves, limit)``.
    """
    prefix = tuple(opening.moves())
    pos = initial_position()
    for mv in prefix:
        pos = play_unchecked(pos, mv)
    played, depths = [], []
    line = list(prefix)
    while True:
        result = status(pos)
        if result.terminal:
            break
        if pos.fullmove_number > max_fullmoves:
            result = GameStatus(Outcome.DRAW, Reason.ADJUDICATED)
            break
        engine = white if pos.white_to_move else black
        try:
            reply = engine.go(pos, line, limit)
        except EngineError as exc:
            raise GameAborted(str(exc.args[0]), exc.transcript, line) from exc
        played.append(reply.move)
        depths.append(reply.depth)
        line.append(reply.move)
        pos = play_unchecked(pos, reply.move)
    return GameRecord(
        eco=opening.eco,
        opening_name=opening.name,
        prefix=prefix,
        moves=tuple(played),
        status=result,
        white=getattr(white, "name", "?"),
        black=getattr(black, "name", "?"),
        depths=tuple(depths),
    )


class SyntheticEngine:
    """Draws game results straight from an outcome vector, skipping play.

    Game ``i`` uses its own stream derived from ``(seed, i)``, so results do
    not depend on the order or thread in which games are requested.
    """

    name = "synthetic"

    def __init__(self, pi: ProbabilityVector, seed: int):
        self.pi = pi
        self.seed = derive_seed(seed, "synthetic-games")

    def result(self, game_index: int) -> GameStatus:
        u = float(match_stream(self.seed, game_index).random())
        if u < self.pi.p_w:
            outcome = Outcome.WHITE_WINS
        elif u < self.pi.p_w + self.pi.p_b:
            outcome = Outcome.BLACK_WINS
        else:
            outcome = Outcome.DRAW
        return GameStatus(outcome, Reason.ADJUDICATED)


def synthetic_engine(pi: ProbabilityVector, seed: int) -> SyntheticEngine:
    return SyntheticEngine(pi, seed)


@dataclass(frozen=True)
class MatchConfig:
    opening: OpeningSpec
    games: int = 300
    engine: Optional[EngineConfig] = None
    black_engine: Optional[EngineConfig] = None
    max_fullmoves: int = DEFAULT_MAX_FULLMOVES
    seed: int = 0
    synthetic: Optional[ProbabilityVector] = None
    restart_every: int = DEFAULT_RESTART_EVERY
    workers: int = 1

    def __post_init__(self) -> None:
        if self.games <= 0:
            raise ValueError("a match needs at least one game")
        prefix_fullmoves = (len(self.opening.prefix) + 1) // 2
        if self.max_fullmoves <= prefix_fullmoves:
            raise ValueError(
                f"max_fullmoves={self.max_fullmoves} does not exceed the {prefix_fullmoves}-move prefix"
            )
        if self.synthetic is None and self.engine is None:
            raise ValueError("a match needs an engine config or a synthetic vector")
        if self.workers < 1 or self.restart_every < 1:
            raise ValueError("workers and restart_every must be positive")

    @property
    def seats(self) -> tuple[EngineConfig, EngineConfig]:
        assert self.engine is not None
        return self.engine, self.black_engine or self.engine


@dataclass(frozen=True)
class AbortedGame:
    index: int
    error: str


@dataclass(frozen=True)
class MatchResult:
    counts: OutcomeCounts
    records: tuple[GameRecord, ...]
    aborted: tuple[AbortedGame, ...] = field(default=())


def tally(statuses: Sequence[GameStatus]) -> OutcomeCounts:
    white = sum(s.outcome is Outcome.WHITE_WINS for s in statuses)
    black = sum(s.outcome is Outcome.BLACK_WINS for s in statuses)
    draws = sum(s.outcome is Outcome.DRAW for s in statuses)
    return OutcomeCounts.of(white, black, draws)


def _synthetic_record(config: MatchConfig, prefix, result: GameStatus) -> GameRecord:
    return GameRecord(
        eco=config.opening.eco,
        opening_name=config.opening.name,
        prefix=prefix,
        moves=(),
        status=result,
        white=SyntheticEngine.name,
        black=SyntheticEngine.name,
    )


def _run_synthetic(config: MatchConfig) -> MatchResult:
    assert config.synthetic is not None
    source = synthetic_engine(config.synthetic, config.seed)
    prefix = tuple(config.opening.moves())
    indices = range(config.games)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(source.result, indices))
    else:
        results = [source.result(i) for i in indices]
    records = tuple(_synthetic_record(config, prefix, r) for r in results)
    return MatchResult(tally(results), records)


Launcher = Callable[[EngineConfig], object]


def _close(*sessions) -> None:
    for s in sessions:
        if s is not None:
            try:
                s.close()
            except Exception:  # noqa: BLE001 - best effort shutdown
                log.debug("error while closing engine", exc_info=True)


def _run_chunk(config: MatchConfig, indices: Sequence[int], launcher: Launcher):
    """Play a contiguous block of games with one pair of engine processes."""
    white_cfg, black_cfg = config.seats
    white = black = None
    since_restart = 0
    out: list[tuple[int, Optional[GameRecord], Optional[str]]] = []
    try:
        for index in indices:
            last_error = None
            for attempt in range(2):
                try:
                    if white is None or since_restart >= config.restart_every:
                        _close(white, black)
                        white = black = None
                        white, black = launcher(white_cfg), launcher(black_cfg)
                        since_restart = 0
                    white.new_game()
                    black.new_game()
                    record = play_game(white, black, config.opening, config.max_fullmoves)
                    since_restart += 1
                    out.append((index, record, None))
                    break
                except EngineError as exc:
                    last_error = exc
                    log.warning("game %d attempt %d failed: %s", index + 1, attempt + 1, exc.args[0])
                    _close(white, black)
                    white = black = None
            else:
                log.warning("game %d aborted and excluded from the tallies", index + 1)
                out.append((index, None, str(last_error.args[0]) if last_error else "unknown"))
    finally:
        _close(white, black)
    return out


def run_match(config: MatchConfig, launcher: Launcher = launch) -> MatchResult:
    """Play ``config.games`` games from the configured prefix and tally them.

    Games that fail twice are recorded as aborted and left out of the counts.
    With several workers each owns its own engine pair; results come back in
    game order.
    """
    if config.synthetic is not None:
        return _run_synthetic(config)
    games = list(range(config.games))
    workers = min(config.workers, config.games)
    if workers > 1:
        size = -(-len(games) // workers)
        chunks = [games[i : i + size] for i in range(0, len(games), size)]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda c: _run_chunk(config, c, launcher), chunks))
        rows = [row for part in parts for row in part]
    else:
        rows = _run_chunk(config, games, launcher)
    rows.sort(key=lambda r: r[0])
    records = tuple(r for _, r, _ in rows if r is not None)
    aborted = tuple(AbortedGame(i, e) for i, r, e in rows if r is None)
    return MatchResult(tally([r.status for r in records]), records, aborted)
