"""Minimal SGF FF[4] reader/writer for complete Go games.

Only the main line is read.  Files written here re-read and re-write to the
same bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .go import BLACK, WHITE, GameResult, IllegalMove, Position, check_komi

LETTERS = "abcdefghijklmnopqrs"


class SgfError(ValueError):
    pass


@dataclass
class SgfGame:
    size: int = 9
    komi: float = 7.5
    black_name: str = ""
    white_name: str = ""
    result: str = ""
    setup_black: list[int] = field(default_factory=list)
    moves: list[tuple[int, int]] = field(default_factory=list)  # (color, move)

    @classmethod
    def from_position(cls, pos: Position, result: GameResult | str | None = None,
                      black_name: str = "", white_name: str = "") -> SgfGame:
        start = pos.root()
        if any(c == WHITE for c in start.board):
            raise SgfError("white setup stones are not supported")
        setup = [p for p, c in enumerate(start.board) if c == BLACK]
        if isinstance(result, GameResult):
            result = result.sgf()
        return cls(pos.size, pos.komi, black_name, white_name, result or "",
                   setup, pos.move_history())

    def first_player(self) -> int:
        if self.moves:
            return self.moves[0][0]
        return WHITE if self.setup_black else BLACK

    def replay(self, upto: int | None = None) -> Position:
        """Replay the record (optionally only the first ``upto`` moves)."""
        pos = Position.setup(self.size, self.setup_black, (), self.first_player(), self.komi)
        for color, move in self.moves[:upto]:
            if pos.to_move != color:
                pos = pos.with_player(color)
            try:
                pos = pos.play(move)
            except IllegalMove as exc:
                raise SgfError(f"illegal move in record: {exc}") from None
        return pos

    def dumps(self) -> str:
        n = self.size
        parts = [f"(;GM[1]FF[4]CA[UTF-8]SZ[{n}]KM[{self.komi:g}]"]
        if self.black_name:
            parts.append(f"PB[{_escape(self.black_name)}]")
        if self.white_name:
            parts.append(f"PW[{_escape(self.white_name)}]")
        if self.result:
            parts.append(f"RE[{_escape(self.result)}]")
        if self.setup_black:
            parts.append("AB" + "".join(f"[{_vertex(p, n)}]" for p in sorted(self.setup_black)))
        for color, move in self.moves:
            parts.append(f";{'B' if color == BLACK else 'W'}[{_vertex(move, n)}]")
        parts.append(")\n")
        return "".join(parts)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("]", "\\]")


def _vertex(move: int, size: int) -> str:
    if move == size * size:
        return ""
    row, col = divmod(move, size)
    return LETTERS[col] + LETTERS[row]


def _parse_vertex(text: str, size: int) -> int:
    if text == "" or (text == "tt" and size <= 19):
        return size * size
    if len(text) != 2 or text[0] not in LETTERS or text[1] not in LETTERS:
        raise SgfError(f"bad vertex {text!r}")
    col, row = LETTERS.index(text[0]), LETTERS.index(text[1])
    if col >= size or row >= size:
        raise SgfError(f"vertex {text!r} is off the board")
    return row * size + col


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(;)|([A-Za-z]+)|(\[))")


def _nodes(text: str) -> list[list[tuple[str, list[str]]]]:
    """Tokenise the main variation into nodes of (property, values)."""
    nodes: list[list[tuple[str, list[str]]]] = []
    depth = 0
    skip_from = None  # depth at which a side variation started
    seen_main_end = False
    i = 0
    n = len(text)
    prop = None
    while i < n:
        m = _TOKEN.match(text, i)
        if m is None:
            if text[i:].strip() == "":
                break
            raise SgfError(f"unexpected character at offset {i}")
        i = m.end()
        if m.group(1):
            depth += 1
            # a second subtree at the same depth is a variation; keep the first only
            if seen_main_end and skip_from is None:
                skip_from = depth
        elif m.group(2):
            if skip_from is not None and depth == skip_from:
                skip_from = None
            elif skip_from is None:
                seen_main_end = True
            depth -= 1
        elif m.group(3):
            if skip_from is None:
                nodes.append([])
        elif m.group(4):
            prop = m.group(4)
            if skip_from is None:
                if not nodes:
                    raise SgfError("property before first node")
                nodes[-1].append((prop, []))
        else:
            j = i
            buf = []
            while True:
                if j >= n:
                    raise SgfError("unterminated property value")
                ch = text[j]
                if ch == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if ch == "]":
                    break
                buf.append(ch)
                j += 1
            i = j + 1
            if skip_from is None:
                if prop is None or not nodes or not nodes[-1]:
                    raise SgfError("value without property")
                nodes[-1][-1][1].append("".join(buf))
    if depth != 0:
        raise SgfError("unbalanced parentheses")
    return nodes


def loads(text: str) -> SgfGame:
    nodes = _nodes(text)
    if not nodes:
        raise SgfError("empty game tree")
    game = SgfGame()
    root = dict((k, v) for k, v in nodes[0])
    if "SZ" in root:
        game.size = int(root["SZ"][0].split(":")[0])
    if not 2 <= game.size <= 19:
        raise SgfError(f"unsupported size {game.size}")
    if "KM" in root:
        try:
            game.komi = check_komi(float(root["KM"][0]))
        except ValueError as exc:
            raise SgfError(str(exc)) from None
    game.black_name = root.get("PB", [""])[0]
    game.white_name = root.get("PW", [""])[0]
    game.result = root.get("RE", [""])[0]
    for v in root.get("AB", []):
        game.setup_black.append(_parse_vertex(v, game.size))
    if "AW" in root:
        raise SgfError("white setup stones are not supported")
    for node in nodes:
        for key, values in node:
            if key in ("B", "W"):
                color = BLACK if key == "B" else WHITE
                game.moves.append((color, _parse_vertex(values[0], game.size)))
    return game


def dumps(pos: Position, result: GameResult | str | None = None, black_name: str = "",
          white_name: str = "") -> str:
    return SgfGame.from_position(pos, result, black_name, white_name).dumps()
