"""Standard algebraic notation (SAN) and coordinate move text."""

from __future__ import annotations

import re

from .board import (
    SQUARE_NAMES,
    ChessError,
    IllegalMoveError,
    Move,
    Position,
    play_unchecked,
    square,
)


class MoveParseError(ChessError):
    pass


class AmbiguousMoveError(ChessError):
    pass


_SAN_RE = re.compile(
    r"^(?:(?P<castle>[O0]-[O0](?:-[O0])?)"
    r"|(?P<piece>[NBRQK])?(?P<ffile>[a-h])?(?P<frank>[1-8])?(?P<capture>x)?"
    r"(?P<dest>[a-h][1-8])(?:=?(?P<promo>[NBRQnbrq]))?)"
    r"(?P<suffix>[+#])?[!?]*$"
)
_UCI_RE = re.compile(r"^[a-h][1-8][a-h][1-8][qrbn]?$")


def _kind(piece: str) -> str:
    return piece.upper()


def san(pos: Position, mv: Move) -> str:
    """Render a legal move in SAN, with ``+``/``#`` suffixes."""
    if mv not in pos.legal:
        raise IllegalMoveError(f"illegal move {mv.uci()} in {pos.fen()}")
    piece = pos.board[mv.from_sq]
    kind = _kind(piece)
    if kind == "K" and abs(mv.to_sq - mv.from_sq) == 2:
        text = "O-O" if mv.to_sq > mv.from_sq else "O-O-O"
    else:
        capture = pos.board[mv.to_sq] is not None or (kind == "P" and mv.to_sq == pos.ep_square)
        dest = SQUARE_NAMES[mv.to_sq]
        if kind == "P":
            text = (SQUARE_NAMES[mv.from_sq][0] + "x" if capture else "") + dest
            if mv.promotion:
                text += "=" + mv.promotion.upper()
        else:
            rivals = [
                m.from_sq
                for m in pos.legal
                if m.to_sq == mv.to_sq and m.from_sq != mv.from_sq and pos.board[m.from_sq] == piece
            ]
            prefix = ""
            if rivals:
                name = SQUARE_NAMES[mv.from_sq]
                if all((r & 7) != (mv.from_sq & 7) for r in rivals):
                    prefix = name[0]
                elif all((r >> 3) != (mv.from_sq >> 3) for r in rivals):
                    prefix = name[1]
                else:
                    prefix = name
            text = kind + prefix + ("x" if capture else "") + dest
    after = play_unchecked(pos, mv)
    if after.in_check:
        text += "#" if not after.legal else "+"
    return text


def parse_san(pos: Position, text: str) -> Move:
    m = _SAN_RE.match(text.strip())
    if not m:
        raise MoveParseError(f"cannot parse move text {text!r}")
    white = pos.white_to_move
    if m["castle"]:
        long = m["castle"].count("-") == 2
        frm = 4 if white else 60
        mv = Move(frm, frm - 2 if long else frm + 2)
        king = "K" if white else "k"
        if pos.board[frm] != king or mv not in pos.legal:
            raise IllegalMoveError(f"{text!r} is not legal in {pos.fen()}")
        return mv
    kind = m["piece"] or "P"
    dest = square(m["dest"])
    promo = m["promo"].lower() if m["promo"] else None
    ffile = "abcdefgh".index(m["ffile"]) if m["ffile"] else None
    frank = int(m["frank"]) - 1 if m["frank"] else None
    candidates = []
    for mv in pos.legal:
        if mv.to_sq != dest:
            continue
        piece = pos.board[mv.from_sq]
        if _kind(piece) != kind:
            continue
        if kind == "K" and abs(mv.to_sq - mv.from_sq) == 2:
            continue
        if ffile is not None and (mv.from_sq & 7) != ffile:
            continue
        if frank is not None and (mv.from_sq >> 3) != frank:
            continue
        if mv.promotion != promo:
            continue
        candidates.append(mv)
    if not candidates:
        if kind == "P" and promo is None and dest >> 3 in (0, 7):
            raise MoveParseError(f"{text!r} reaches the last rank without a promotion piece")
        raise IllegalMoveError(f"{text!r} is not legal in {pos.fen()}")
    if len(candidates) > 1:
        options = ", ".join(c.uci() for c in candidates)
        raise AmbiguousMoveError(f"{text!r} matches several moves ({options}) in {pos.fen()}")
    return candidates[0]


def parse_uci(pos: Position, text: str) -> Move:
    mv = Move.from_uci(text.strip())
    if mv not in pos.legal:
        raise IllegalMoveError(f"{text!r} is not legal in {pos.fen()}")
    return mv


def parse_move(pos: Position, text: str) -> Move:
    """Parse SAN (``Nf3``, ``exd4``, ``O-O``) or coordinate (``g1f3``) text."""
    stripped = text.strip()
    if _UCI_RE.match(stripped):
        return parse_uci(pos, stripped)
    return parse_san(pos, stripped)
