"""A tiny UCI engine for desk-scale pipeline checks.

Material-only alpha-beta search on the package's own move generator.  It is
weak and slow, but speaks enough UCI (``uci``, ``isready``, ``setoption``,
``ucinewgame``, ``position``, ``go depth|movetime``, ``quit``) for harness
integration runs when no real engine is installed::

    python -m openingbench.uci.toy_engine
"""

from __future__ import annotations

import random
import sys
import time
from typing import Optional, TextIO

from ..rules import Move, Position, initial_position, parse_fen, play_unchecked

NAME = "openingbench toy engine"
MATE = 100_000
VALUES = {"P": 100, "N": 320, "B": 330, "R": 500, "Q": 900, "K": 0}


def evaluate(pos: Position) -> int:
    """Material balance from the side to move's point of view."""
    score = 0
    for p in pos.board:
        if p is not None:
            v = VALUES[p.upper()]
            score += v if p.isupper() else -v
    return score if pos.white_to_move else -score


def _ordered(pos: Position) -> list[Move]:
    board = pos.board

    def gain(m: Move) -> int:
        victim = board[m.to_sq]
        return (VALUES[victim.upper()] if victim else 0) + (800 if m.promotion == "q" else 0)

    return sorted(pos.legal, key=gain, reverse=True)


class Searcher:
    def __init__(self, seed: int = 0, max_depth: int = 3):
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.deadline: Optional[float] = None

    def negamax(self, pos: Position, depth: int, alpha: int, beta: int, ply: int) -> int:
        moves = pos.legal
        if not moves:
            return -(MATE - ply) if pos.in_check else 0
        if pos.halfmove_clock >= 100:
            return 0
        if depth == 0:
            return evaluate(pos)
        best = -MATE - 1
        for mv in _ordered(pos):
            score = -self.negamax(play_unchecked(pos, mv), depth - 1, -beta, -alpha, ply + 1)
            if score > best:
                best = score
            if score > alpha:
                alpha = score
            if alpha >= beta:
                break
        return best

    def search(self, pos: Position, depth: int) -> tuple[Move, int]:
        depth = max(1, min(depth, self.max_depth))
        scored = []
        for mv in _ordered(pos):
            child = play_unchecked(pos, mv)
            # avoid walking into a repetition draw when not forced to
            rep = sum(1 for k in child.history if k == child.key)
            score = -self.negamax(child, depth - 1, -MATE - 1, MATE + 1, 1) - 5 * rep
            scored.append((score, mv))
            if self.deadline is not None and time.monotonic() > self.deadline:
                break
        top = max(s for s, _ in scored)
        choice = self.rng.choice([m for s, m in scored if s == top])
        return choice, depth


def _parse_position(words: list[str]) -> Position:
    if words[1] == "startpos":
        pos, rest = initial_position(), words[2:]
    elif words[1] == "fen":
        end = words.index("moves") if "moves" in words else len(words)
        pos, rest = parse_fen(" ".join(words[2:end])), words[end:]
    else:
        raise ValueError("bad position command")
    if rest[:1] == ["moves"]:
        for text in rest[1:]:
            mv = Move.from_uci(text)
            if mv not in pos.legal:
                raise ValueError(f"illegal move {text}")
            pos = play_unchecked(pos, mv)
    return pos


def main(stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout) -> None:
    options = {"Threads": "1", "Contempt": "0", "Hash": "16", "Seed": "0", "MaxDepth": "3"}
    games = 0
    pos = initial_position()

    def say(line: str) -> None:
        stdout.write(line + "\n")
        stdout.flush()

    def searcher() -> Searcher:
        return Searcher(int(options["Seed"]) * 1_000_003 + games, int(options["MaxDepth"]))

    engine = searcher()
    for raw in stdin:
        words = raw.split()
        if not words:
            continue
        cmd = words[0]
        if cmd == "uci":
            say(f"id name {NAME}")
            say("id author openingbench")
            say("option name Threads type spin default 1 min 1 max 512")
            say("option name Contempt type spin default 0 min -100 max 100")
            say("option name Hash type spin default 16 min 1 max 1024")
            say("option name Seed type spin default 0 min 0 max 1000000")
            say("option name MaxDepth type spin default 3 min 1 max 6")
            say("uciok")
        elif cmd == "isready":
            say("readyok")
        elif cmd == "setoption" and "name" in words:
            i = words.index("name")
            j = words.index("value") if "value" in words else len(words)
            name = " ".join(words[i + 1 : j])
            match = next((k for k in options if k.lower() == name.lower()), None)
            if match is None:
                say(f"info string No such option: {name}")
            else:
                options[match] = " ".join(words[j + 1 :])
                engine = searcher()
        elif cmd == "ucinewgame":
            games += 1
            engine = searcher()
            pos = initial_position()
        elif cmd == "position":
            try:
                pos = _parse_position(words)
            except Exception as exc:  # noqa: BLE001 - report and keep serving
                say(f"info string error {exc}")
        elif cmd == "go":
            depth = 2
            engine.deadline = None
            if "depth" in words:
                depth = int(words[words.index("depth") + 1])
            elif "movetime" in words:
                engine.deadline = time.monotonic() + int(words[words.index("movetime") + 1]) / 1000
            if not pos.legal:
                say("bestmove 0000")
                continue
            mv, reached = engine.search(pos, depth)
            say(f"info depth {reached}")
            say(f"bestmove {mv.uci()}")
        elif cmd == "quit":
            break


if __name__ == "__main__":
    main()
