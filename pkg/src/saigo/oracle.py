"""Exact minimax over final Tromp-Taylor lead for tiny boards.

Values are the best achievable area lead (komi excluded) for the player to
move.  Exact positional superko makes every value depend on the whole game
history, which is far too expensive to solve exhaustively, so the solver plays
a simple-ko game instead: a state is (stones, player to move, consecutive
passes, ko point), and only the immediate recapture of a single-stone ko is
banned.  That game can cycle forever through multi-stone captures, so it is
also cut off after a fixed number of further plies and scored by area at the
cutoff.  The reachable state graph is built once per board size and solved by
backward induction over the remaining plies.
"""

from __future__ import annotations

import numpy as np

from .go import BLACK, EMPTY, Position, neighbor_table

MAX_ORACLE_SIZE = 3  # a 4x4 state graph has tens of millions of states


class OracleTooLarge(ValueError):
    pass


def default_horizon(size: int) -> int:
    return 3 * size * size


class _Graph:
    """Reachable simple-ko states of one board size with values per horizon.

    ``value[h, i]`` is the optimal lead of the player to move in state ``i``
    with ``h`` plies left.  A state's successors never change once expanded,
    so adding states only appends columns.
    """

    def __init__(self, size: int):
        self.size = size
        self.index: dict[tuple, int] = {}
        self.keys: list[tuple] = []
        self.kids: list[list[int] | None] = []  # None for finished games
        self.frontier: list[int] = []
        self.value = np.zeros((1, 0), dtype=np.int64)
        self.open = np.zeros(0, dtype=np.int64)
        self.flat = np.zeros(0, dtype=np.int64)
        self.starts = np.zeros(0, dtype=np.int64)

    def add(self, key: tuple) -> int:
        i = self.index.get(key)
        if i is None:
            i = self.index[key] = len(self.keys)
            self.keys.append(key)
            self.kids.append(None)
            if key[2] < 2:
                self.frontier.append(i)
        return i

    def grow(self) -> None:
        lo = self.value.shape[1]
        if not self.frontier and lo == len(self.keys):
            return
        while self.frontier:
            i = self.frontier.pop()
            self.kids[i] = [self.add(k) for k in _children(self.keys[i], self.size)]
        n = len(self.keys)
        new_open = [i for i in range(lo, n) if self.kids[i] is not None]
        flat = np.array([c for i in new_open for c in self.kids[i]], dtype=np.int64)
        starts = np.cumsum([0] + [len(self.kids[i]) for i in new_open[:-1]], dtype=np.int64)
        new_open = np.array(new_open, dtype=np.int64)
        lead = np.array([_mover_lead(k, self.size) for k in self.keys[lo:]], dtype=np.int64)
        value = np.empty((self.value.shape[0], n), dtype=np.int64)
        value[:, :lo] = self.value
        value[:, lo:] = lead
        for h in range(1, value.shape[0]):
            if len(new_open):
                value[h, new_open] = np.maximum.reduceat(-value[h - 1, flat], starts)
        self.value = value
        self.starts = np.concatenate([self.starts, starts + len(self.flat)])
        self.open = np.concatenate([self.open, new_open])
        self.flat = np.concatenate([self.flat, flat])

    def table(self, horizon: int) -> np.ndarray:
        depth = self.value.shape[0] - 1
        if horizon > depth:
            rows = [self.value]
            prev = self.value[-1]
            for _ in range(horizon - depth):
                cur = self.value[0].copy()
                if len(self.open):
                    cur[self.open] = np.maximum.reduceat(-prev[self.flat], self.starts)
                rows.append(cur[None, :])
                prev = cur
            self.value = np.concatenate(rows)
        return self.value[horizon]


_graphs: dict[int, _Graph] = {}


def _mover_lead(key: tuple, size: int) -> int:
    black, white = Position(size, key[0], BLACK, 0.5).area()
    return black - white if key[1] == BLACK else white - black


def ko_point(parent_board: bytes, child: Position, move: int) -> int | None:
    """Point the opponent may not retake immediately, if ``move`` started a ko."""
    if move == child.pass_move:
        return None
    captured = [p for p, (a, b) in enumerate(zip(parent_board, child.board)) if a and not b]
    if len(captured) != 1:
        return None
    board = child.board
    me = board[move]
    libs = 0
    for q in neighbor_table(child.size)[move]:
        if board[q] == me:
            return None
        if board[q] == EMPTY:
            libs += 1
    return captured[0] if libs == 1 else None


def _initial_ko(pos: Position) -> int | None:
    if pos.parent is None or pos.last_move is None:
        return None
    return ko_point(pos.parent.board, pos, pos.last_move)


def _state(pos: Position, ko: int | None) -> tuple:
    if pos.is_terminal:
        return (pos.board, pos.to_move, 2, None)
    return (pos.board, pos.to_move, pos.passes, ko)


def _children(key: tuple, size: int) -> list[tuple]:
    board, to_move, passes, ko = key
    node = Position(size, board, to_move, 0.5, passes)
    out = []
    for m in sorted(node.legal_moves()):
        if m == ko:
            continue
        child = node.play(m)
        out.append(_state(child, ko_point(board, child, m)))
    return out


def solve(pos: Position, ko: int | None = None, horizon: int | None = None) -> int:
    """Optimal area lead (komi excluded) of the player to move within ``horizon`` more plies.

    ``ko`` defaults to the ko ban implied by the position's last move.
    """
    if pos.size > MAX_ORACLE_SIZE:
        raise OracleTooLarge(f"oracle limited to {MAX_ORACLE_SIZE}x{MAX_ORACLE_SIZE}, got {pos.size}")
    if ko is None:
        ko = _initial_ko(pos)
    if horizon is None:
        horizon = default_horizon(pos.size)
    g = _graphs.get(pos.size)
    if g is None:
        g = _graphs[pos.size] = _Graph(pos.size)
    i = g.add(_state(pos, ko))
    g.grow()
    return int(g.table(horizon)[i])


def move_values(pos: Position, horizon: int | None = None) -> dict[int, int]:
    """Optimal lead for the player to move after each legal move."""
    if horizon is None:
        horizon = default_horizon(pos.size)
    ko = _initial_ko(pos)
    out = {}
    for m in sorted(pos.legal_moves()):
        if m == ko:
            continue
        child = pos.play(m)
        out[m] = -solve(child, ko_point(pos.board, child, m), max(horizon - 1, 0))
    return out


def optimal_moves(pos: Position, horizon: int | None = None) -> list[int]:
    values = move_values(pos, horizon)
    best = max(values.values())
    return [m for m, v in values.items() if v == best]


def clear_cache() -> None:
    _graphs.clear()
