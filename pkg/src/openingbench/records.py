from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rules import GameStatus, Move, Position, Reason, apply_move, initial_position


@dataclass(frozen=True)
class GameRecord:
    """One finished game: the forced prefix, the engine moves and the result."""

    eco: str
    opening_name: str
    prefix: tuple[Move, ...]
    moves: tuple[Move, ...]
    status: GameStatus
    white: str = "?"
    black: str = "?"
    depths: tuple[Optional[int], ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.status.terminal:
            raise ValueError("a game record needs a terminal result")

    @property
    def all_moves(self) -> tuple[Move, ...]:
        return self.prefix + self.moves

    @property
    def reason(self) -> Optional[Reason]:
        return self.status.reason

    def replay(self) -> Position:
        """Replay every move from the start, raising on the first illegal one."""
        pos = initial_position()
        for mv in self.all_moves:
            pos = apply_move(pos, mv)
        return pos
