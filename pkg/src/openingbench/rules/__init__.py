"""Legal chess: positions, move generation, notation and game termination."""

from .board import (
    STARTING_FEN,
    ChessError,
    Color,
    FenError,
    GameStatus,
    IllegalMoveError,
    Move,
    Outcome,
    Position,
    Reason,
    apply_move,
    initial_position,
    insufficient_material,
    is_attacked,
    is_legal,
    legal_moves,
    parse_fen,
    perft,
    play_line,
    play_unchecked,
    repetition_count,
    square,
    status,
    to_fen,
)
from .san import AmbiguousMoveError, MoveParseError, parse_move, parse_san, parse_uci, san

__all__ = [
    "STARTING_FEN",
    "AmbiguousMoveError",
    "ChessError",
    "Color",
    "FenError",
    "GameStatus",
    "IllegalMoveError",
    "Move",
    "MoveParseError",
    "Outcome",
    "Position",
    "Reason",
    "apply_move",
    "initial_position",
    "insufficient_material",
    "is_attacked",
    "is_legal",
    "legal_moves",
    "parse_fen",
    "parse_move",
    "parse_san",
    "parse_uci",
    "perft",
    "play_line",
    "play_unchecked",
    "repetition_count",
    "san",
    "square",
    "status",
    "to_fen",
]
