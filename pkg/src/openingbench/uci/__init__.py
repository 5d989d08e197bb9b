"""Driving UCI engines: sessions, games and matches."""

from .engine import (
    ENGINE_ENV_VAR,
    EngineConfig,
    EngineError,
    EngineSession,
    HandshakeTimeout,
    IllegalBestMove,
    LaunchError,
    MoveTimeout,
    OptionRejected,
    SearchLimit,
    SearchResult,
    best_move,
    launch,
)
from .match import (
    AbortedGame,
    GameAborted,
    MatchConfig,
    MatchResult,
    SyntheticEngine,
    play_game,
    run_match,
    synthetic_engine,
    tally,
)

__all__ = [
    "ENGINE_ENV_VAR",
    "AbortedGame",
    "EngineConfig",
    "EngineError",
    "EngineSession",
    "GameAborted",
    "HandshakeTimeout",
    "IllegalBestMove",
    "LaunchError",
    "MatchConfig",
    "MatchResult",
    "MoveTimeout",
    "OptionRejected",
    "SearchLimit",
    "SearchResult",
    "SyntheticEngine",
    "best_move",
    "launch",
    "play_game",
    "run_match",
    "synthetic_engine",
    "tally",
]
