"""PGN export and import for game records.

Besides the seven-tag roster, records carry ``ECO``, ``Opening``,
``Termination`` and two custom tags, ``TerminationReason`` and
``ForcedPlies``.  The custom tags let a forced prefix and the precise
termination reason survive a round trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

from .records import GameRecord
from .rules import (
    ChessError,
    GameStatus,
    Outcome,
    Reason,
    initial_position,
    parse_move,
    play_unchecked,
    san,
    status,
)

ROSTER = ("Event", "Site", "Date", "Round", "White", "Black", "Result")
_RESULTS = {
    "1-0": Outcome.WHITE_WINS,
    "0-1": Outcome.BLACK_WINS,
    "1/2-1/2": Outcome.DRAW,
}
_TERMINATION = {
    Reason.ADJUDICATED: "adjudication",
    Reason.RESIGNATION: "normal",
}


class PgnParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PgnLegalityError(ValueError):
    def __init__(self, message: str, game_index: int, move: str):
        super().__init__(f"game {game_index}: {message}")
        self.game_index = game_index
        self.move = move


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _movetext(record: GameRecord) -> str:
    pos = initial_position()
    tokens = []
    for i, mv in enumerate(record.all_moves):
        if pos.white_to_move:
            tokens.append(f"{pos.fullmove_number}.")
        elif i == 0:
            tokens.append(f"{pos.fullmove_number}...")
        tokens.append(san(pos, mv))
        pos = play_unchecked(pos, mv)
    tokens.append(record.status.result)
    lines, current = [], ""
    for tok in tokens:
        if current and len(current) + 1 + len(tok) > 79:
            lines.append(current)
            current = tok
        else:
            current = f"{current} {tok}" if current else tok
    lines.append(current)
    return "\n".join(lines)


def write_pgn(records: Sequence[GameRecord], headers: Optional[Mapping[str, str]] = None) -> str:
    """Serialise records as a PGN document (empty string for no records)."""
    headers = dict(headers or {})
    games = []
    for index, record in enumerate(records, start=1):
        tags = {
            "Event": headers.get("Event", "?"),
            "Site": headers.get("Site", "?"),
            "Date": headers.get("Date", "????.??.??"),
            "Round": str(index),
            "White": record.white,
            "Black": record.black,
            "Result": record.status.result,
            "ECO": record.eco,
            "Opening": record.opening_name,
            "Termination": _TERMINATION.get(record.status.reason, "normal"),
            "TerminationReason": record.status.reason.value,
            "ForcedPlies": str(len(record.prefix)),
        }
        for key, value in headers.items():
            tags.setdefault(key, value)
        head = "\n".join(f'[{k} "{_escape(str(v))}"]' for k, v in tags.items())
        games.append(f"{head}\n\n{_movetext(record)}\n")
    return "\n".join(games)


@dataclass
class _Token:
    kind: str  # tag, move, result, number
    text: str
    line: int
    column: int
    value: str = ""


_TAG_RE = re.compile(r'\[\s*([A-Za-z0-9_]+)\s+"((?:[^"\\]|\\.)*)"\s*\]')
_NUMBER_RE = re.compile(r"\d+\.*")
_NAG_RE = re.compile(r"\$\d+")
_SYMBOL_RE = re.compile(r"[A-Za-z0-9_+#=:\-/]+[!?]*")


def _tokens(text: str) -> Iterator[_Token]:
    i, line, line_start = 0, 1, 0
    n = len(text)

    def col() -> int:
        return i - line_start + 1

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, line_start = line + 1, i
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "%" and i == line_start:
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "{":
            start_line, start_col = line, col()
            while i < n and text[i] != "}":
                if text[i] == "\n":
                    line, line_start = line + 1, i + 1
                i += 1
            if i >= n:
                raise PgnParseError("unterminated comment", start_line, start_col)
            i += 1
            continue
        if ch == "(":
            start_line, start_col = line, col()
            depth = 0
            while i < n:
                c = text[i]
                if c == "\n":
                    line, line_start = line + 1, i + 1
                elif c == "{":
                    while i < n and text[i] != "}":
                        if text[i] == "\n":
                            line, line_start = line + 1, i + 1
                        i += 1
                elif c == "(":
                    depth += 1
                elif c == ")":
                    depth -= 1
                    if depth == 0:
                        break
                i += 1
            if i >= n:
                raise PgnParseError("unterminated variation", start_line, start_col)
            i += 1
            continue
        if ch == ")":
            raise PgnParseError("unbalanced ')'", line, col())
        if ch == "[":
            m = _TAG_RE.match(text, i)
            if not m:
                raise PgnParseError("malformed tag pair", line, col())
            value = re.sub(r"\\(.)", r"\1", m.group(2))
            yield _Token("tag", m.group(1), line, col(), value)
            i = m.end()
            continue
        if ch == "$":
            m = _NAG_RE.match(text, i)
            if not m:
                raise PgnParseError("malformed NAG", line, col())
            i = m.end()
            continue
        if ch == "*":
            yield _Token("result", "*", line, col())
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m and "." in m.group(0):
            yield _Token("number", m.group(0), line, col())
            i = m.end()
            continue
        m = _SYMBOL_RE.match(text, i)
        if not m:
            raise PgnParseError(f"unexpected character {ch!r}", line, col())
        word = m.group(0)
        yield _Token("result" if word in _RESULTS else "move", word, line, col())
        i = m.end()


def read_pgn(text: str) -> list[GameRecord]:
    """Parse every game in a PGN document and replay its moves."""
    records: list[GameRecord] = []
    tags: dict[str, str] = {}
    sans: list[tuple[str, _Token]] = []
    in_moves = False

    def finish(result_token: _Token) -> None:
        nonlocal tags, sans, in_moves
        records.append(_build(len(records) + 1, tags, sans, result_token))
        tags, sans, in_moves = {}, [], False

    for tok in _tokens(text):
        if tok.kind == "tag":
            if in_moves:
                raise PgnParseError("tag pair inside movetext", tok.line, tok.column)
            tags[tok.text] = tok.value
        elif tok.kind == "number":
            in_moves = True
        elif tok.kind == "move":
            in_moves = True
            sans.append((tok.text, tok))
        elif tok.kind == "result":
            finish(tok)
    if sans:
        last = sans[-1][1]
        raise PgnParseError("game without a result marker", last.line, last.column)
    if tags:
        raise PgnParseError("tag pairs without movetext", 1, 1)
    return records


def _build(index: int, tags: Mapping[str, str], sans, result_token: _Token) -> GameRecord:
    if result_token.text == "*":
        raise PgnParseError("unfinished game ('*')", result_token.line, result_token.column)
    outcome = _RESULTS[result_token.text]
    tag_result = tags.get("Result")
    if tag_result is not None and tag_result != result_token.text:
        raise PgnParseError(
            f"movetext result {result_token.text} disagrees with Result tag {tag_result}",
            result_token.line,
            result_token.column,
        )
    pos = initial_position()
    moves = []
    for ply, (text, tok) in enumerate(sans, start=1):
        try:
            mv = parse_move(pos, text)
        except ChessError as exc:
            raise PgnLegalityError(
                f"move {text!r} at half-move {ply} (line {tok.line}, column {tok.column}): {exc}",
                index,
                text,
            ) from None
        moves.append(mv)
        pos = play_unchecked(pos, mv)

    reason_text = tags.get("TerminationReason")
    if reason_text:
        try:
            reason = Reason(reason_text)
        except ValueError:
            raise PgnParseError(
                f"unknown TerminationReason {reason_text!r}", result_token.line, result_token.column
            ) from None
    else:
        final = status(pos)
        if final.terminal and final.outcome is outcome:
            reason = final.reason
        elif outcome is Outcome.DRAW:
            reason = Reason.ADJUDICATED
        else:
            reason = Reason.RESIGNATION
    forced = int(tags.get("ForcedPlies", "0") or 0)
    forced = max(0, min(forced, len(moves)))
    return GameRecord(
        eco=tags.get("ECO", "?"),
        opening_name=tags.get("Opening", "?"),
        prefix=tuple(moves[:forced]),
        moves=tuple(moves[forced:]),
        status=GameStatus(outcome, reason),
        white=tags.get("White", "?"),
        black=tags.get("Black", "?"),
    )
