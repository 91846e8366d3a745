"""Go Text Protocol v2 front end."""

from __future__ import annotations

import sys
from dataclasses import replace
from typing import Callable, TextIO

import numpy as np

from .evaluation import Evaluator
from .go import BLACK, WHITE, GameResult, IllegalMove, Position, check_komi, from_gtp, to_gtp, tromp_taylor_score
from .search import SearchConfig, estimate_score, run_search, select_move, should_resign
from .value import AgentConfig

NAME = "saigo"
VERSION = "0.1.0"


class GtpError(Exception):
    pass


def _color(text: str) -> int:
    t = text.lower()
    if t in ("b", "black"):
        return BLACK
    if t in ("w", "white"):
        return WHITE
    raise GtpError("invalid color")


def _score_text(score: float) -> str:
    return GameResult.from_score(score).sgf()


class GtpEngine:
    def __init__(self, evaluator: Evaluator, cfg: SearchConfig, size: int = 9, komi: float = 7.5,
                 score_visits: int = 1000):
        self.evaluator = evaluator
        self.cfg = cfg
        self.size = size
        self.komi = komi
        self.score_visits = score_visits
        self.pos = Position.empty(size, komi)
        self.running = True
        self.commands: dict[str, Callable[[list[str]], str]] = {
            "protocol_version": lambda a: "2",
            "name": lambda a: NAME,
            "version": lambda a: VERSION,
            "known_command": lambda a: "true" if a and a[0] in self.commands else "false",
            "list_commands": lambda a: "\n".join(sorted(self.commands)),
            "quit": self._quit,
            "boardsize": self._boardsize,
            "clear_board": self._clear_board,
            "komi": self._komi,
            "play": self._play,
            "genmove": self._genmove,
            "final_score": lambda a: _score_text(tromp_taylor_score(self.pos)),
            "showboard": lambda a: "\n" + str(self.pos),
            "sai-params": self._params,
            "sai-agent": self._agent,
            "sai-score-est": self._score_est,
        }

    # -- protocol --

    def handle(self, line: str) -> str | None:
        """Full framed response for one input line (None for blank/comment lines)."""
        line = "".join(ch for ch in line.split("#", 1)[0] if ch == "\t" or ch >= " " or ch == "\n")
        words = line.replace("\t", " ").split()
        if not words:
            return None
        ident = ""
        if words[0].isdigit():
            ident = words.pop(0)
        if not words:
            return f"?{ident} missing command\n\n"
        name, args = words[0], words[1:]
        fn = self.commands.get(name)
        if fn is None:
            return f"?{ident} unknown command\n\n"
        try:
            text = fn(args)
        except GtpError as exc:
            return f"?{ident} {exc}\n\n"
        return f"={ident} {text}\n\n" if text else f"={ident}\n\n"

    def serve(self, stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout) -> None:
        for line in stdin:
            reply = self.handle(line)
            if reply is None:
                continue
            stdout.write(reply)
            stdout.flush()
            if not self.running:
                break

    # -- commands --

    def _quit(self, args: list[str]) -> str:
        self.running = False
        return ""

    def _boardsize(self, args: list[str]) -> str:
        try:
            size = int(args[0])
        except (IndexError, ValueError):
            raise GtpError("boardsize needs an integer") from None
        try:
            self.pos = Position.empty(size, self.komi)
        except ValueError:
            raise GtpError("unacceptable size") from None
        self.size = size
        return ""

    def _clear_board(self, args: list[str]) -> str:
        self.pos = Position.empty(self.size, self.komi)
        return ""

    def _komi(self, args: list[str]) -> str:
        try:
            komi = check_komi(float(args[0]))
        except (IndexError, ValueError):
            raise GtpError("syntax error") from None
        self.komi = komi
        self.pos = self.pos.with_komi(komi)
        return ""

    def _play(self, args: list[str]) -> str:
        if len(args) < 2:
            raise GtpError("syntax error")
        color = _color(args[0])
        try:
            move = from_gtp(args[1], self.size)
        except ValueError:
            raise GtpError("invalid vertex") from None
        pos = self.pos.with_player(color)
        try:
            self.pos = pos.play(move)
        except IllegalMove:
            raise GtpError("illegal move") from None
        return ""

    def _search_position(self, color: int | None = None) -> Position:
        pos = self.pos if color is None else self.pos.with_player(color)
        return pos.resumed() if pos.is_terminal else pos

    def _genmove(self, args: list[str]) -> str:
        if not args:
            raise GtpError("syntax error")
        pos = self._search_position(_color(args[0]))
        move_number = len(pos.move_history())
        rng = np.random.default_rng([self.cfg.seed, move_number])
        report = run_search(pos, self.evaluator, replace(self.cfg, seed=int(rng.integers(2**63))))
        if should_resign(report, self.cfg):
            return "resign"
        move = select_move(report, move_number, self.cfg, rng)
        self.pos = pos.play(move)
        return to_gtp(move, self.size)

    def _params(self, args: list[str]) -> str:
        pos = self._search_position()
        result = self.evaluator.evaluate(pos)
        return f"{result.alpha:.4f} {result.beta:.4f} {result.winrate(pos):.4f}"

    def _agent(self, args: list[str]) -> str:
        try:
            lam, mu, threshold = (float(x) for x in args)
            agent = AgentConfig(lam, mu, threshold)
        except ValueError as exc:
            raise GtpError(f"bad agent parameters: {exc}") from None
        self.cfg = replace(self.cfg, agent=agent)
        return ""

    def _score_est(self, args: list[str]) -> str:
        return _score_text(estimate_score(self.pos, self.evaluator, self.score_visits, seed=self.cfg.seed))
