"""Positions, legal move generation and game termination.

Squares are numbered 0..63 with a1 = 0, h1 = 7, a8 = 56.  A board is a
64-tuple of piece letters (``"PNBRQK"`` white, ``"pnbrqk"`` black) or
``None``.  Positions are immutable; :func:`apply_move` returns a new one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

Board = tuple[Optional[str], ...]

FILES = "abcdefgh"
RANKS = "12345678"
SQUARE_NAMES = tuple(f + r for r in RANKS for f in FILES)
STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

WHITE_PIECES = frozenset("PNBRQK")
BLACK_PIECES = frozenset("pnbrqk")


class ChessError(ValueError):
    """Base class for rule violations and malformed chess input."""


class IllegalMoveError(ChessError):
    pass


class FenError(ChessError):
    pass


class Color(enum.Enum):
    WHITE = "white"
    BLACK = "black"

    @property
    def other(self) -> Color:
        return Color.BLACK if self is Color.WHITE else Color.WHITE


class Outcome(enum.Enum):
    ONGOING = "ongoing"
    WHITE_WINS = "white wins"
    BLACK_WINS = "black wins"
    DRAW = "draw"


class Reason(enum.Enum):
    CHECKMATE = "Checkmate"
    STALEMATE = "Stalemate"
    FIFTY_MOVE = "FiftyMove"
    THREEFOLD_REPETITION = "ThreefoldRepetition"
    INSUFFICIENT_MATERIAL = "InsufficientMaterial"
    ADJUDICATED = "Adjudicated"
    RESIGNATION = "Resignation"


_DECISIVE_REASONS = {Reason.CHECKMATE, Reason.ADJUDICATED, Reason.RESIGNATION}


@dataclass(frozen=True)
class GameStatus:
    outcome: Outcome
    reason: Optional[Reason] = None

    def __post_init__(self) -> None:
        if self.outcome in (Outcome.WHITE_WINS, Outcome.BLACK_WINS):
            if self.reason not in _DECISIVE_REASONS:
                raise ValueError(f"{self.outcome.value} cannot end by {self.reason}")
        if self.outcome is Outcome.ONGOING and self.reason is not None:
            raise ValueError("an ongoing game has no termination reason")
        if self.outcome is not Outcome.ONGOING and self.reason is None:
            raise ValueError("a finished game needs a termination reason")

    @property
    def terminal(self) -> bool:
        return self.outcome is not Outcome.ONGOING

    @property
    def result(self) -> str:
        """PGN result marker."""
        return {
            Outcome.WHITE_WINS: "1-0",
            Outcome.BLACK_WINS: "0-1",
            Outcome.DRAW: "1/2-1/2",
            Outcome.ONGOING: "*",
        }[self.outcome]


ONGOING = GameStatus(Outcome.ONGOING)


def square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILES or name[1] not in RANKS:
        raise ChessError(f"bad square name {name!r}")
    return RANKS.index(name[1]) * 8 + FILES.index(name[0])


class Move(NamedTuple):
    from_sq: int
    to_sq: int
    promotion: Optional[str] = None  # lowercase piece letter

    def uci(self) -> str:
        return SQUARE_NAMES[self.from_sq] + SQUARE_NAMES[self.to_sq] + (self.promotion or "")

    @classmethod
    def from_uci(cls, text: str) -> Move:
        if len(text) not in (4, 5):
            raise ChessError(f"bad UCI move {text!r}")
        promo = text[4] if len(text) == 5 else None
        if promo is not None and promo not in "qrbn":
            raise ChessError(f"bad promotion piece in {text!r}")
        return cls(square(text[:2]), square(text[2:4]), promo)

    def __str__(self) -> str:
        return self.uci()


# --- precomputed geometry --------------------------------------------------

_ORTHO = ((0, 1), (0, -1), (1, 0), (-1, 0))
_DIAG = ((1, 1), (-1, 1), (1, -1), (-1, -1))


def _walk(sq: int, df: int, dr: int) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    out = []
    f, r = f + df, r + dr
    while 0 <= f < 8 and 0 <= r < 8:
        out.append(r * 8 + f)
        f, r = f + df, r + dr
    return tuple(out)


def _jumps(sq: int, deltas) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    return tuple(
        (r + dr) * 8 + f + df for df, dr in deltas if 0 <= f + df < 8 and 0 <= r + dr < 8
    )


ORTHO_RAYS = tuple(tuple(_walk(s, df, dr) for df, dr in _ORTHO) for s in range(64))
DIAG_RAYS = tuple(tuple(_walk(s, df, dr) for df, dr in _DIAG) for s in range(64))
KNIGHT_TARGETS = tuple(
    _jumps(s, ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)))
    for s in range(64)
)
KING_TARGETS = tuple(_jumps(s, _ORTHO + _DIAG) for s in range(64))
# squares from which a pawn of the given colour attacks s
WHITE_PAWN_SOURCES = tuple(_jumps(s, ((-1, -1), (1, -1))) for s in range(64))
BLACK_PAWN_SOURCES = tuple(_jumps(s, ((-1, 1), (1, 1))) for s in range(64))

_PROMOTIONS = ("q", "r", "b", "n")
_CASTLE_ROOK = {6: (7, 5), 2: (0, 3), 62: (63, 61), 58: (56, 59)}
# castling right lost when a piece leaves or arrives on these squares
_RIGHT_SQUARES = {0: "Q", 7: "K", 4: "KQ", 56: "q", 63: "k", 60: "kq"}


def is_attacked(board: Board, sq: int, by_white: bool) -> bool:
    """Is ``sq`` attacked by the given side on ``board``?"""
    if by_white:
        knight, king, pawn, rook, bishop, queen = "N", "K", "P", "R", "B", "Q"
        pawn_sources = WHITE_PAWN_SOURCES[sq]
    else:
        knight, king, pawn, rook, bishop, queen = "n", "k", "p", "r", "b", "q"
        pawn_sources = BLACK_PAWN_SOURCES[sq]
    for t in KNIGHT_TARGETS[sq]:
        if board[t] == knight:
            return True
    for t in pawn_sources:
        if board[t] == pawn:
            return True
    for t in KING_TARGETS[sq]:
        if board[t] == king:
            return True
    for ray in ORTHO_RAYS[sq]:
        for t in ray:
            p = board[t]
            if p is not None:
                if p == rook or p == queen:
                    return True
                break
    for ray in DIAG_RAYS[sq]:
        for t in ray:
            p = board[t]
            if p is not None:
                if p == bishop or p == queen:
                    return True
                break
    return False


def _king_square(board: Board, white: bool) -> int:
    try:
        return board.index("K" if white else "k")
    except ValueError:
        raise ChessError(f"no {'white' if white else 'black'} king on the board") from None


# --- position --------------------------------------------------------------


@dataclass(frozen=True)
class Position:
    """A chess position with the history needed for repetition claims.

    ``history`` holds the keys of earlier positions since the last capture
    or pawn move (older positions can never recur).
    """

    board: Board
    turn: Color = Color.WHITE
    castling: str = "KQkq"
    ep_square: Optional[int] = None
    halfmove_clock: int = 0
    fullmove_number: int = 1
    history: tuple = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if len(self.board) != 64:
            raise ChessError("a board has 64 squares")
        if self.board.count("K") != 1 or self.board.count("k") != 1:
            raise ChessError("each side needs exactly one king")
        if self.halfmove_clock < 0 or self.fullmove_number < 1:
            raise ChessError("bad move clocks")

    @property
    def white_to_move(self) -> bool:
        return self.turn is Color.WHITE

    def piece_at(self, sq: int) -> Optional[str]:
        return self.board[sq]

    @cached_property
    def in_check(self) -> bool:
        white = self.turn is Color.WHITE
        return is_attacked(self.board, _king_square(self.board, white), not white)

    @cached_property
    def legal(self) -> tuple[Move, ...]:
        return tuple(_generate(self))

    @cached_property
    def key(self) -> tuple:
        """Repetition key: placement, side to move, castling, en passant if capturable."""
        ep = self.ep_square
        if ep is not None and not any(
            m.to_sq == ep and self.board[m.from_sq] in ("P", "p") for m in self.legal
        ):
            ep = None
        return (self.board, self.turn, self.castling, ep)

    def fen(self) -> str:
        return to_fen(self)

    def __str__(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            rows.append(" ".join(self.board[r * 8 + f] or "." for f in range(8)))
        return "\n".join(rows)


def initial_position() -> Position:
    return parse_fen(STARTING_FEN)


def parse_fen(fen: str) -> Position:
    parts = fen.split()
    if len(parts) == 4:
        parts += ["0", "1"]
    if len(parts) != 6:
        raise FenError(f"FEN needs six fields: {fen!r}")
    placement, turn, castling, ep, half, full = parts
    rows = placement.split("/")
    if len(rows) != 8:
        raise FenError(f"FEN placement needs eight ranks: {placement!r}")
    board: list[Optional[str]] = [None] * 64
    for i, row in enumerate(rows):
        r = 7 - i
        f = 0
        for ch in row:
            if ch.isdigit():
                f += int(ch)
            elif ch in WHITE_PIECES or ch in BLACK_PIECES:
                if f > 7:
                    raise FenError(f"rank overflow in {row!r}")
                board[r * 8 + f] = ch
                f += 1
            else:
                raise FenError(f"bad placement character {ch!r}")
        if f != 8:
            raise FenError(f"rank {row!r} does not cover eight files")
    if turn not in ("w", "b"):
        raise FenError(f"bad side to move {turn!r}")
    if castling != "-" and (not set(castling) <= set("KQkq") or len(set(castling)) != len(castling)):
        raise FenError(f"bad castling field {castling!r}")
    rights = "".join(c for c in "KQkq" if c in castling)
    try:
        ep_sq = None if ep == "-" else square(ep)
        halfmove, fullmove = int(half), int(full)
    except (ChessError, ValueError) as exc:
        raise FenError(f"bad FEN field in {fen!r}: {exc}") from None
    try:
        pos = Position(
            tuple(board),
            Color.WHITE if turn == "w" else Color.BLACK,
            rights,
            ep_sq,
            halfmove,
            fullmove,
        )
    except ChessError as exc:
        raise FenError(str(exc)) from None
    white = pos.turn is Color.WHITE
    if is_attacked(pos.board, _king_square(pos.board, not white), white):
        raise FenError("the side not to move is in check")
    return pos


def to_fen(pos: Position) -> str:
    rows = []
    for r in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            p = pos.board[r * 8 + f]
            if p is None:
                empty += 1
            else:
                row += (str(empty) if empty else "") + p
                empty = 0
        rows.append(row + (str(empty) if empty else ""))
    ep = "-" if pos.ep_square is None else SQUARE_NAMES[pos.ep_square]
    return " ".join(
        (
            "/".join(rows),
            "w" if pos.turn is Color.WHITE else "b",
            pos.castling or "-",
            ep,
            str(pos.halfmove_clock),
            str(pos.fullmove_number),
        )
    )


# --- move generation -------------------------------------------------------


def _generate(pos: Position) -> list[Move]:
    board = pos.board
    white = pos.turn is Color.WHITE
    own = WHITE_PIECES if white else BLACK_PIECES
    enemy = BLACK_PIECES if white else WHITE_PIECES
    ksq = _king_square(board, white)
    e_rook, e_bishop, e_queen = ("r", "b", "q") if white else ("R", "B", "Q")

    # checkers and absolute pins, found by scanning outward from the king
    pinned: dict[int, tuple[int, ...]] = {}
    block: Optional[set[int]] = None
    n_checkers = 0
    for rays, slider in ((ORTHO_RAYS[ksq], e_rook), (DIAG_RAYS[ksq], e_bishop)):
        for ray in rays:
            candidate = -1
            for i, t in enumerate(ray):
                p = board[t]
                if p is None:
                    continue
                if p in own:
                    if candidate >= 0:
                        break
                    candidate = t
                    continue
                if p == slider or p == e_queen:
                    if candidate >= 0:
                        pinned[candidate] = ray[: i + 1]
                    else:
                        n_checkers += 1
                        block = set(ray[: i + 1])
                break
    e_knight, e_pawn = ("n", "p") if white else ("N", "P")
    for t in KNIGHT_TARGETS[ksq]:
        if board[t] == e_knight:
            n_checkers += 1
            block = {t}
    for t in (BLACK_PAWN_SOURCES if white else WHITE_PAWN_SOURCES)[ksq]:
        if board[t] == e_pawn:
            n_checkers += 1
            block = {t}

    moves: list[Move] = []
    append = moves.append

    # king moves: test destinations with the king lifted off the board
    lifted = list(board)
    lifted[ksq] = None
    lifted_t = tuple(lifted)
    for t in KING_TARGETS[ksq]:
        if board[t] not in own and not is_attacked(lifted_t, t, not white):
            append(Move(ksq, t))
    if n_checkers > 1:
        return moves

    if n_checkers == 0 and pos.castling:
        if white:
            if "K" in pos.castling and board[5] is None and board[6] is None and board[7] == "R":
                if not is_attacked(board, 5, False) and not is_attacked(board, 6, False):
                    append(Move(4, 6))
            if (
                "Q" in pos.castling
                and board[3] is None
                and board[2] is None
                and board[1] is None
                and board[0] == "R"
            ):
                if not is_attacked(board, 3, False) and not is_attacked(board, 2, False):
                    append(Move(4, 2))
        else:
            if "k" in pos.castling and board[61] is None and board[62] is None and board[63] == "r":
                if not is_attacked(board, 61, True) and not is_attacked(board, 62, True):
                    append(Move(60, 62))
            if (
                "q" in pos.castling
                and board[59] is None
                and board[58] is None
                and board[57] is None
                and board[56] == "r"
            ):
                if not is_attacked(board, 59, True) and not is_attacked(board, 58, True):
                    append(Move(60, 58))

    def add(frm: int, to: int) -> None:
        if block is not None and to not in block:
            return
        ray = pinned.get(frm)
        if ray is not None and to not in ray:
            return
        append(Move(frm, to))

    if white:
        pawn, knight, bishop, rook, queen = "P", "N", "B", "R", "Q"
        push, start_rank, promo_rank = 8, 1, 7
    else:
        pawn, knight, bishop, rook, queen = "p", "n", "b", "r", "q"
        push, start_rank, promo_rank = -8, 6, 0

    for frm in range(64):
        p = board[frm]
        if p is None or p not in own:
            continue
        if p == pawn:
            f = frm & 7
            to = frm + push
            targets = []
            if board[to] is None:
                targets.append(to)
                if frm >> 3 == start_rank and board[to + push] is None:
                    targets.append(to + push)
            for df in (-1, 1):
                if 0 <= f + df < 8:
                    c = to + df
                    if board[c] in enemy:
                        targets.append(c)
                    elif c == pos.ep_square:
                        if _ep_legal(board, frm, c, white, ksq):
                            append(Move(frm, c))
            for to in targets:
                if block is not None and to not in block:
                    continue
                ray = pinned.get(frm)
                if ray is not None and to not in ray:
                    continue
                if to >> 3 == promo_rank:
                    for pr in _PROMOTIONS:
                        append(Move(frm, to, pr))
                else:
                    append(Move(frm, to))
        elif p == knight:
            if frm in pinned:
                continue
            for to in KNIGHT_TARGETS[frm]:
                if board[to] not in own:
                    add(frm, to)
        elif p != ("K" if white else "k"):
            ray_sets = []
            if p == rook or p == queen:
                ray_sets.append(ORTHO_RAYS[frm])
            if p == bishop or p == queen:
                ray_sets.append(DIAG_RAYS[frm])
            for rays in ray_sets:
                for ray in rays:
                    for to in ray:
                        q = board[to]
                        if q is None:
                            add(frm, to)
                        else:
                            if q in enemy:
                                add(frm, to)
                            break
    return moves


def _ep_legal(board: Board, frm: int, to: int, white: bool, ksq: int) -> bool:
    """En passant is rare and has odd discovered checks: test it by playing it."""
    b = list(board)
    b[to] = b[frm]
    b[frm] = None
    b[to - 8 if white else to + 8] = None
    return not is_attacked(tuple(b), ksq, not white)


def legal_moves(pos: Position) -> list[Move]:
    return list(pos.legal)


def is_legal(pos: Position, mv: Move) -> bool:
    return mv in pos.legal


def apply_move(pos: Position, mv: Move) -> Position:
    """Play a legal move and return the resulting position."""
    if mv not in pos.legal:
        raise IllegalMoveError(f"illegal move {mv.uci()} in position {to_fen(pos)}")
    return play_unchecked(pos, mv)


def play_unchecked(pos: Position, mv: Move) -> Position:
    """Apply ``mv`` without verifying legality (callers guarantee it)."""
    board = list(pos.board)
    frm, to = mv.from_sq, mv.to_sq
    piece = board[frm]
    captured = board[to]
    white = pos.turn is Color.WHITE
    ep_square = None
    irreversible = captured is not None

    if piece == "P" or piece == "p":
        irreversible = True
        if to == pos.ep_square:
            board[to - 8 if white else to + 8] = None
        elif abs(to - frm) == 16:
            ep_square = (frm + to) // 2
        if mv.promotion:
            piece = mv.promotion.upper() if white else mv.promotion
    elif (piece == "K" or piece == "k") and abs(to - frm) == 2:
        r_from, r_to = _CASTLE_ROOK[to]
        board[r_to] = board[r_from]
        board[r_from] = None
    board[to] = piece
    board[frm] = None

    castling = pos.castling
    if castling:
        for sq in (frm, to):
            lost = _RIGHT_SQUARES.get(sq)
            if lost:
                castling = "".join(c for c in castling if c not in lost)

    if irreversible:
        history: tuple = ()
        halfmove = 0
    else:
        history = pos.history + (pos.key,)
        halfmove = pos.halfmove_clock + 1
    return Position(
        tuple(board),
        Color.BLACK if white else Color.WHITE,
        castling,
        ep_square,
        halfmove,
        pos.fullmove_number + (0 if white else 1),
        history,
    )


def play_line(moves, pos: Optional[Position] = None) -> Position:
    """Replay a sequence of legal moves from ``pos`` (default: the start)."""
    pos = pos or initial_position()
    for mv in moves:
        pos = apply_move(pos, mv)
    return pos


# --- termination -----------------------------------------------------------


def repetition_count(pos: Position) -> int:
    """Occurrences of the current position, counting itself."""
    key = pos.key
    return 1 + sum(1 for k in pos.history if k == key)


def insufficient_material(pos: Position) -> bool:
    """K v K, K+minor v K, or K+B v K+B with bishops on one colour."""
    pieces = [(sq, p) for sq, p in enumerate(pos.board) if p is not None and p not in "Kk"]
    if not pieces:
        return True
    if len(pieces) == 1:
        return pieces[0][1] in "NBnb"
    if len(pieces) == 2:
        (s1, p1), (s2, p2) = pieces
        if {p1, p2} == {"B", "b"}:
            shade = lambda s: ((s & 7) + (s >> 3)) & 1  # noqa: E731
            return shade(s1) == shade(s2)
    return False


def status(pos: Position) -> GameStatus:
    if not pos.legal:
        if pos.in_check:
            winner = Outcome.BLACK_WINS if pos.turn is Color.WHITE else Outcome.WHITE_WINS
            return GameStatus(winner, Reason.CHECKMATE)
        return GameStatus(Outcome.DRAW, Reason.STALEMATE)
    if insufficient_material(pos):
        return GameStatus(Outcome.DRAW, Reason.INSUFFICIENT_MATERIAL)
    if pos.history and repetition_count(pos) >= 3:
        return GameStatus(Outcome.DRAW, Reason.THREEFOLD_REPETITION)
    if pos.halfmove_clock >= 100:
        return GameStatus(Outcome.DRAW, Reason.FIFTY_MOVE)
    return ONGOING


def perft(pos: Position, depth: int) -> int:
    """Number of legal move sequences of length ``depth`` from ``pos``."""
    if depth == 0:
        return 1
    moves = pos.legal
    if depth == 1:
        return len(moves)
    return sum(perft(play_unchecked(pos, m), depth - 1) for m in moves)
