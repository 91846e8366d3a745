"""Go rules: board state, legality (suicide, positional superko) and Tromp-Taylor scoring.

Intersections are plain ints ``row * size + col`` with row 0 at the top of the
board.  The pass move is ``size * size``, so a policy vector over all moves is
indexed directly by move number.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

EMPTY, BLACK, WHITE = 0, 1, 2
MAX_SIZE = 19
GTP_COLUMNS = "ABCDEFGHJKLMNOPQRST"


class IllegalMove(ValueError):
    pass


def opponent(color: int) -> int:
    return 3 - color


def color_name(color: int) -> str:
    return {BLACK: "B", WHITE: "W"}[color]


@lru_cache(maxsize=None)
def neighbor_table(size: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for p in range(size * size):
        r, c = divmod(p, size)
        nb = []
        if r > 0:
            nb.append(p - size)
        if r < size - 1:
            nb.append(p + size)
        if c > 0:
            nb.append(p - 1)
        if c < size - 1:
            nb.append(p + 1)
        out.append(tuple(nb))
    return tuple(out)


@lru_cache(maxsize=None)
def zobrist_table(size: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    rng = random.Random(0x5A1 * 1000 + size)
    n2 = size * size
    black = tuple(rng.getrandbits(64) for _ in range(n2))
    white = tuple(rng.getrandbits(64) for _ in range(n2))
    return (0,) * n2, black, white


def board_hash(board: bytes, size: int) -> int:
    zob = zobrist_table(size)
    h = 0
    for p, c in enumerate(board):
        if c:
            h ^= zob[c][p]
    return h


# -- vertices ---------------------------------------------------------------

def point(col: int, row: int, size: int) -> int:
    if not (0 <= col < size and 0 <= row < size):
        raise ValueError(f"({col}, {row}) is off a {size}x{size} board")
    return row * size + col


def coords(move: int, size: int) -> tuple[int, int] | None:
    """(col, row) of an intersection, None for pass."""
    if move == size * size:
        return None
    row, col = divmod(move, size)
    return col, row


def to_gtp(move: int, size: int) -> str:
    if move == size * size:
        return "pass"
    row, col = divmod(move, size)
    return f"{GTP_COLUMNS[col]}{size - row}"


def from_gtp(text: str, size: int) -> int:
    t = text.strip().upper()
    if t == "PASS":
        return size * size
    if len(t) < 2 or t[0] not in GTP_COLUMNS:
        raise ValueError(f"bad vertex {text!r}")
    col = GTP_COLUMNS.index(t[0])
    try:
        num = int(t[1:])
    except ValueError:
        raise ValueError(f"bad vertex {text!r}") from None
    return point(col, size - num, size)


# -- results ----------------------------------------------------------------

class Outcome(enum.Enum):
    BLACK_WIN = "B"
    WHITE_WIN = "W"
    DRAW = "0"


class Termination(enum.Enum):
    DOUBLE_PASS = "double-pass"
    RESIGNATION = "resignation"
    MOVE_LIMIT = "move-limit"


@dataclass(frozen=True)
class GameResult:
    outcome: Outcome
    margin: float | None  # None when a resignation was not scored
    termination: Termination

    @classmethod
    def from_score(cls, score: float, termination: Termination = Termination.DOUBLE_PASS) -> GameResult:
        """Build a result from a Black-perspective score (komi included)."""
        if score > 0:
            return cls(Outcome.BLACK_WIN, score, termination)
        if score < 0:
            return cls(Outcome.WHITE_WIN, -score, termination)
        return cls(Outcome.DRAW, 0.0, termination)

    @classmethod
    def resignation(cls, loser: int, margin: float | None = None) -> GameResult:
        outcome = Outcome.WHITE_WIN if loser == BLACK else Outcome.BLACK_WIN
        return cls(outcome, margin, Termination.RESIGNATION)

    @property
    def winner(self) -> int | None:
        return {Outcome.BLACK_WIN: BLACK, Outcome.WHITE_WIN: WHITE}.get(self.outcome)

    def value_for(self, color: int) -> float:
        """1, 0.5 or 0 from ``color``'s point of view."""
        if self.outcome is Outcome.DRAW:
            return 0.5
        return 1.0 if self.winner == color else 0.0

    def sgf(self) -> str:
        if self.outcome is Outcome.DRAW:
            return "0"
        tag = self.outcome.value
        if self.termination is Termination.RESIGNATION and self.margin is None:
            return f"{tag}+R"
        return f"{tag}+{self.margin:g}"

    @classmethod
    def parse_sgf(cls, text: str) -> GameResult:
        t = text.strip()
        if t in ("0", "Draw", "Jigo"):
            return cls(Outcome.DRAW, 0.0, Termination.DOUBLE_PASS)
        tag, _, rest = t.partition("+")
        outcome = Outcome(tag.upper())
        if rest in ("R", "Resign"):
            return cls(outcome, None, Termination.RESIGNATION)
        return cls(outcome, float(rest), Termination.DOUBLE_PASS)


def check_komi(komi: float) -> float:
    komi = float(komi)
    if komi * 2 != int(komi * 2):
        raise ValueError(f"komi must be a multiple of 0.5, got {komi}")
    return komi


# -- position ---------------------------------------------------------------

class Position:
    """Immutable game state.  ``play`` returns a new position.

    The history is a parent chain; every position also carries the set of
    board hashes seen so far for positional-superko checks.
    """

    __slots__ = ("size", "board", "to_move", "komi", "passes", "parent", "last_move",
                 "hash", "_seen", "_groups", "_legal")

    def __init__(self, size: int, board: bytes, to_move: int, komi: float, passes: int = 0,
                 parent: Position | None = None, last_move: int | None = None,
                 hash_: int | None = None, seen: frozenset | None = None):
        self.size = size
        self.board = board
        self.to_move = to_move
        self.komi = komi
        self.passes = passes
        self.parent = parent
        self.last_move = last_move
        self.hash = board_hash(board, size) if hash_ is None else hash_
        self._seen = frozenset((self.hash,)) if seen is None else seen
        self._groups = None
        self._legal = None

    @classmethod
    def empty(cls, size: int = 9, komi: float = 7.5, to_move: int = BLACK) -> Position:
        if not 2 <= size <= MAX_SIZE:
            raise ValueError(f"unsupported board size {size}")
        return cls(size, bytes(size * size), to_move, check_komi(komi))

    @classmethod
    def setup(cls, size: int, black: Iterable[int] = (), white: Iterable[int] = (),
              to_move: int = BLACK, komi: float = 7.5) -> Position:
        """A fresh position (history of length one) with stones placed directly."""
        b = bytearray(size * size)
        for p in black:
            b[p] = BLACK
        for p in white:
            b[p] = WHITE
        pos = cls(size, bytes(b), to_move, check_komi(komi))
        for grp in pos._analysis()[1]:
            if not grp[1]:
                raise ValueError("setup leaves a group without liberties")
        return pos

    @classmethod
    def from_rows(cls, rows: str, to_move: int = BLACK, komi: float = 7.5) -> Position:
        """Parse a diagram of ``.``, ``X`` (black) and ``O`` (white) rows."""
        lines = [ln.strip() for ln in rows.strip().splitlines() if ln.strip()]
        size = len(lines)
        black, white = [], []
        for r, ln in enumerate(lines):
            ln = ln.replace(" ", "")
            if len(ln) != size:
                raise ValueError("diagram is not square")
            for c, ch in enumerate(ln):
                if ch in "Xx#":
                    black.append(r * size + c)
                elif ch in "Oo":
                    white.append(r * size + c)
        return cls.setup(size, black, white, to_move, komi)

    # -- basic properties --

    @property
    def pass_move(self) -> int:
        return self.size * self.size

    @property
    def is_terminal(self) -> bool:
        return self.passes >= 2

    @property
    def signed_komi(self) -> float:
        return self.komi if self.to_move == WHITE else -self.komi

    def __repr__(self) -> str:
        return f"Position(size={self.size}, to_move={color_name(self.to_move)}, komi={self.komi}, passes={self.passes})"

    def __str__(self) -> str:
        ch = ".XO"
        n = self.size
        return "\n".join("".join(ch[self.board[r * n + c]] for c in range(n)) for r in range(n))

    def history(self) -> list[Position]:
        """All positions from the start of the record up to and including this one."""
        out = []
        p: Position | None = self
        while p is not None:
            out.append(p)
            p = p.parent
        out.reverse()
        return out

    def recent(self, count: int) -> list[Position]:
        """This position and up to ``count - 1`` predecessors, newest first."""
        out = []
        p: Position | None = self
        while p is not None and len(out) < count:
            out.append(p)
            p = p.parent
        return out

    def move_history(self) -> list[tuple[int, int]]:
        """(color, move) pairs from the first recorded position."""
        out = []
        p = self
        while p.parent is not None:
            out.append((p.parent.to_move, p.last_move))
            p = p.parent
        out.reverse()
        return out

    def root(self) -> Position:
        p = self
        while p.parent is not None:
            p = p.parent
        return p

    # -- derived variants --

    def with_komi(self, komi: float) -> Position:
        """Same game record with a different komi (the history is rebuilt)."""
        komi = check_komi(komi)
        start = self.root()
        pos = Position(start.size, start.board, start.to_move, komi, start.passes)
        for color, move in self.move_history():
            if pos.to_move != color:
                pos = pos.with_player(color)
            pos = pos.play(move)
        if pos.to_move != self.to_move:
            pos = pos.with_player(self.to_move)
        return pos

    def with_player(self, color: int) -> Position:
        """Same stones and history, different player to move."""
        if color == self.to_move:
            return self
        return Position(self.size, self.board, color, self.komi, self.passes,
                        self.parent, self.last_move, self.hash, self._seen)

    def resumed(self) -> Position:
        """A copy with the consecutive-pass counter cleared, so play may continue."""
        return Position(self.size, self.board, self.to_move, self.komi, 0,
                        self.parent, self.last_move, self.hash, self._seen)

    def swap_colors(self) -> Position:
        """Mirror with stone colours and player to move exchanged (history included)."""
        chain = self.history()
        prev = None
        for p in chain:
            b = bytes(0 if c == EMPTY else 3 - c for c in p.board)
            seen = None if prev is None else prev._seen | {board_hash(b, p.size)}
            prev = Position(p.size, b, 3 - p.to_move, p.komi, p.passes, prev, p.last_move,
                            None, seen)
        return prev

    # -- rules --

    def _analysis(self):
        """Group index per point and (stones, liberties, hash) per group."""
        if self._groups is None:
            n = self.size
            board = self.board
            nbrs = neighbor_table(n)
            zob = zobrist_table(n)
            gid = [-1] * (n * n)
            groups = []
            for p in range(n * n):
                c = board[p]
                if c == EMPTY or gid[p] >= 0:
                    continue
                g = len(groups)
                gid[p] = g
                stones = [p]
                libs = set()
                h = 0
                i = 0
                while i < len(stones):
                    s = stones[i]
                    i += 1
                    h ^= zob[c][s]
                    for q in nbrs[s]:
                        cq = board[q]
                        if cq == EMPTY:
                            libs.add(q)
                        elif cq == c and gid[q] < 0:
                            gid[q] = g
                            stones.append(q)
                groups.append((stones, libs, h))
            self._groups = (gid, groups)
        return self._groups

    def atari_points(self) -> set[int]:
        """Empty points that are the only liberty of at least one group (either colour)."""
        out = set()
        for _, libs, _ in self._analysis()[1]:
            if len(libs) == 1:
                out |= libs
        return out

    def legal_moves(self) -> frozenset[int]:
        if self._legal is None:
            self._legal = frozenset(self._compute_legal())
        return self._legal

    def _compute_legal(self) -> Iterator[int]:
        n = self.size
        board = self.board
        nbrs = neighbor_table(n)
        color = self.to_move
        zstone = zobrist_table(n)[color]
        gid, groups = self._analysis()
        seen = self._seen
        base = self.hash
        for p in range(n * n):
            if board[p] != EMPTY:
                continue
            breathes = False
            captured = None
            for q in nbrs[p]:
                cq = board[q]
                if cq == EMPTY:
                    breathes = True
                else:
                    g = gid[q]
                    nlibs = len(groups[g][1])
                    if cq == color:
                        if nlibs > 1:
                            breathes = True
                    elif nlibs == 1:
                        if captured is None:
                            captured = {g}
                        else:
                            captured.add(g)
            if not breathes and captured is None:
                continue
            h = base ^ zstone[p]
            if captured is not None:
                for g in captured:
                    h ^= groups[g][2]
            if h in seen:
                continue
            yield p
        yield n * n

    def is_legal(self, move: int) -> bool:
        return move in self.legal_moves()

    def play(self, move: int) -> Position:
        n = self.size
        n2 = n * n
        color = self.to_move
        if move == n2:
            return Position(n, self.board, 3 - color, self.komi, min(self.passes + 1, 2),
                            self, move, self.hash, self._seen)
        if not 0 <= move < n2:
            raise IllegalMove(f"move {move} is off the board")
        board = self.board
        if board[move] != EMPTY:
            raise IllegalMove(f"{to_gtp(move, n)} is occupied")
        nbrs = neighbor_table(n)
        zob = zobrist_table(n)
        opp = 3 - color
        b = bytearray(board)
        b[move] = color
        h = self.hash ^ zob[color][move]
        for q in nbrs[move]:
            if b[q] == opp:
                dead = _dead_group(b, q, nbrs)
                if dead:
                    zo = zob[opp]
                    for s in dead:
                        b[s] = EMPTY
                        h ^= zo[s]
        if _dead_group(b, move, nbrs):
            raise IllegalMove(f"{to_gtp(move, n)} is suicide")
        if h in self._seen:
            raise IllegalMove(f"{to_gtp(move, n)} repeats an earlier position")
        return Position(n, bytes(b), opp, self.komi, 0, self, move, h, self._seen | {h})

    def score(self) -> float:
        return tromp_taylor_score(self)

    def area(self) -> tuple[int, int]:
        """(black, white) Tromp-Taylor area counts."""
        n = self.size
        board = self.board
        nbrs = neighbor_table(n)
        black = board.count(BLACK)
        white = board.count(WHITE)
        done = bytearray(n * n)
        for p in range(n * n):
            if board[p] != EMPTY or done[p]:
                continue
            region = [p]
            done[p] = 1
            reach = 0
            i = 0
            while i < len(region):
                s = region[i]
                i += 1
                for q in nbrs[s]:
                    cq = board[q]
                    if cq == EMPTY:
                        if not done[q]:
                            done[q] = 1
                            region.append(q)
                    else:
                        reach |= cq
            if reach == BLACK:
                black += len(region)
            elif reach == WHITE:
                white += len(region)
        return black, white


def _dead_group(b: bytearray, start: int, nbrs) -> list[int] | None:
    """Stones of the group at ``start`` if it has no liberties, else None."""
    c = b[start]
    stones = [start]
    seen = {start}
    i = 0
    while i < len(stones):
        s = stones[i]
        i += 1
        for q in nbrs[s]:
            cq = b[q]
            if cq == EMPTY:
                return None
            if cq == c and q not in seen:
                seen.add(q)
                stones.append(q)
    return stones


def legal_moves(p: Position) -> frozenset[int]:
    return p.legal_moves()


def play(p: Position, move: int) -> Position:
    return p.play(move)


def tromp_taylor_score(p: Position) -> float:
    """Black area minus White area minus komi."""
    black, white = p.area()
    return black - white - p.komi


def handicap_points(size: int, stones: int) -> list[int]:
    """Conventional placements; two stones go on opposite corner star points."""
    edge = 2 if size < 13 else 3
    lo, hi = edge, size - 1 - edge
    mid = size // 2
    corners = [point(hi, lo, size), point(lo, hi, size), point(hi, hi, size), point(lo, lo, size)]
    if stones <= 4:
        return corners[:stones]
    extra = [point(mid, mid, size)] if stones % 2 else []
    sides = [point(lo, mid, size), point(hi, mid, size), point(mid, lo, size), point(mid, hi, size)]
    pts = corners + sides[: (stones - 4) // 2 * 2] + extra
    if len(pts) != stones:
        raise ValueError(f"no standard placement for {stones} stones")
    return pts
