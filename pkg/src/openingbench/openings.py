"""Baseline and test opening definitions, rarity ratios and ECO tagging."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .rules import ChessError, Color, Move, Position, initial_position, parse_move, play_unchecked

PREFIX_PLIES = 6


class Role(enum.Enum):
    BASELINE = "baseline"
    TEST = "test"


@dataclass(frozen=True)
class RarityInput:
    baseline_move_frequency: float
    innovation_frequency: float
    rating_floor: Optional[int] = None

    def __post_init__(self) -> None:
        if self.baseline_move_frequency <= 0 or self.innovation_frequency <= 0:
            raise ValueError("rarity frequencies must be positive")


def rarity_ratio(data: RarityInput) -> float:
    return data.baseline_move_frequency / data.innovation_frequency


@dataclass(frozen=True)
class OpeningSpec:
    eco: str
    name: str
    prefix: tuple[str, ...]
    role: Role = Role.TEST
    innovation_ply: Optional[int] = None
    group: str = ""
    reported_rarity: Optional[float] = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return f"{self.eco} {self.name}"

    @property
    def innovator(self) -> Optional[Color]:
        """The side whose move departs from the baseline (odd plies are white's)."""
        if self.innovation_ply is None:
            return None
        return Color.WHITE if self.innovation_ply % 2 == 1 else Color.BLACK

    def moves(self) -> list[Move]:
        """The prefix as moves; raises ChessError if it is not legal."""
        return _replay(self.prefix)[0]

    def final_position(self) -> Position:
        return _replay(self.prefix)[1]


def _replay(line: Iterable[Union[str, Move]]) -> tuple[list[Move], Position]:
    pos = initial_position()
    out = []
    for item in line:
        mv = item if isinstance(item, Move) else parse_move(pos, item)
        if mv not in pos.legal:
            raise ChessError(f"illegal move {mv.uci()} in {pos.fen()}")
        out.append(mv)
        pos = play_unchecked(pos, mv)
    return out, pos


@dataclass(frozen=True)
class ValidationReport:
    spec: OpeningSpec
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_spec(spec: OpeningSpec, baseline: Optional[OpeningSpec] = None) -> ValidationReport:
    """Check length, legality and the shared stem with the baseline."""
    problems = []
    if len(spec.prefix) != PREFIX_PLIES:
        problems.append(f"prefix has {len(spec.prefix)} half-moves, expected {PREFIX_PLIES}")
    try:
        moves = spec.moves()
    except ChessError as exc:
        problems.append(f"illegal prefix: {exc}")
        moves = None

    if spec.role is Role.BASELINE:
        if spec.innovation_ply is not None:
            problems.append("a baseline has no innovation")
    else:
        ply = spec.innovation_ply
        if ply is None or not 1 <= ply <= PREFIX_PLIES:
            problems.append(f"innovation ply {ply!r} outside 1..{PREFIX_PLIES}")
        elif baseline is not None and moves is not None:
            try:
                base_moves = baseline.moves()
            except ChessError as exc:
                problems.append(f"baseline {baseline.eco} has an illegal prefix: {exc}")
            else:
                stem = min(len(moves), len(base_moves))
                first_diff = next((i for i in range(stem) if moves[i] != base_moves[i]), stem)
                if first_diff + 1 != ply:
                    problems.append(
                        f"departs from {baseline.eco} at half-move {first_diff + 1},"
                        f" but innovation ply is {ply}"
                    )
        if baseline is not None and baseline.group and spec.group and baseline.group != spec.group:
            problems.append(f"group {spec.group!r} differs from baseline group {baseline.group!r}")
    return ValidationReport(spec, tuple(problems))


def _spec(eco, name, line, innovation_ply, group, rarity):
    role = Role.BASELINE if innovation_ply is None else Role.TEST
    return OpeningSpec(eco, name, tuple(line.split()), role, innovation_ply, group, rarity)


BUILTIN_OPENINGS: tuple[OpeningSpec, ...] = (
    _spec("C68", "Ruy Lopez", "e4 e5 Nf3 Nc6 Bb5 a6", None, "1", 1.0),
    _spec("C61", "Bird Defense", "e4 e5 Nf3 Nc6 Bb5 Nd4", 6, "1", 254.5),
    _spec("C50", "Giuoco Piano", "e4 e5 Nf3 Nc6 Bc4 Bc5", 5, "1", 9.0),
    _spec("C44", "Scotch Game", "e4 e5 Nf3 Nc6 d4 exd4", 5, "1", 10.9),
    _spec("C41", "Philidor", "e4 e5 Nf3 d6 d4 exd4", 4, "1", 100.2),
    _spec("C37", "Kings Gambit", "e4 e5 f4 exf4 Nf3 g5", 3, "1", 43.7),
    _spec("B53", "Sicilian Defense", "e4 c5 Nf3 d6 d4 cxd4", None, "2", 1.0),
    _spec("B21", "Smith Morra", "e4 c5 d4 cxd4 c3 dxc3", 3, "2", 1459.2),
    _spec("B22", "Sicilian Alapin", "e4 c5 c3 d5 exd5 Qxd5", 3, "2", 35.8),
    _spec("B12", "Caro Kann", "e4 c6 d4 d5 e5 Bf5", 2, "2", 4.0),
    _spec("B01", "Scandinavian", "e4 d5 exd5 Qxd5 Nc3 Qd6", 2, "2", 39.6),
    _spec("B07", "Pirc", "e4 d6 d4 Nf6 Nc3 g6", 2, "2", 18.5),
)

_BY_ECO = {spec.eco: spec for spec in BUILTIN_OPENINGS}


def builtin_opening(eco: str) -> OpeningSpec:
    try:
        return _BY_ECO[eco]
    except KeyError:
        raise KeyError(f"no built-in opening {eco!r}; known: {', '.join(_BY_ECO)}") from None


def group_baseline(spec: OpeningSpec, specs: Sequence[OpeningSpec] = BUILTIN_OPENINGS) -> Optional[OpeningSpec]:
    for other in specs:
        if other.role is Role.BASELINE and other.group == spec.group:
            return other
    return None


# Prefix table for the twelve study lines and the codes their games transposed into.
# The six-ply study lines carry the codes under which they were filed.
_ECO_LINES = (
    ("C68", "e4 e5 Nf3 Nc6 Bb5 a6"),
    ("C61", "e4 e5 Nf3 Nc6 Bb5 Nd4"),
    ("C50", "e4 e5 Nf3 Nc6 Bc4"),
    ("C54", "e4 e5 Nf3 Nc6 Bc4 Bc5 c3 Nf6 d4 exd4 cxd4"),
    ("C44", "e4 e5 Nf3 Nc6 d4"),
    ("C45", "e4 e5 Nf3 Nc6 d4 exd4 Nxd4"),
    ("C41", "e4 e5 Nf3 d6"),
    ("C37", "e4 e5 f4 exf4 Nf3 g5"),
    ("C39", "e4 e5 f4 exf4 Nf3 g5 h4"),
    ("B53", "e4 c5 Nf3 d6 d4 cxd4"),
    ("B90", "e4 c5 Nf3 d6 d4 cxd4 Nxd4 Nf6 Nc3 a6"),
    ("B92", "e4 c5 Nf3 d6 d4 cxd4 Nxd4 Nf6 Nc3 a6 Be2"),
    ("B73", "e4 c5 Nf3 d6 d4 cxd4 Nxd4 Nf6 Nc3 g6 Be3 Bg7 Be2 Nc6 O-O"),
    ("B76", "e4 c5 Nf3 d6 d4 cxd4 Nxd4 Nf6 Nc3 g6 Be3 Bg7 f3 O-O"),
    ("B21", "e4 c5 d4"),
    ("B22", "e4 c5 c3"),
    ("B12", "e4 c6 d4 d5 e5"),
    ("B01", "e4 d5"),
    ("B07", "e4 d6 d4 Nf6"),
    ("B08", "e4 d6 d4 Nf6 Nc3 g6 Nf3"),
    ("A43", "d4 c5"),
)

ECO_TABLE: tuple[tuple[str, tuple[str, ...]], ...] = tuple(
    (code, tuple(m.uci() for m in _replay(line.split())[0])) for code, line in _ECO_LINES
)


def eco_tag(moves: Iterable[Union[str, Move]]) -> Optional[str]:
    """Code of the longest table line that prefixes ``moves``, or None."""
    played = tuple(m.uci() for m in _replay(moves)[0])
    best, best_len = None, 0
    for code, line in ECO_TABLE:
        if len(line) > best_len and played[: len(line)] == line:
            best, best_len = code, len(line)
    return best
