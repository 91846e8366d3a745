"""Input planes for the network and the eight board symmetries."""

from __future__ import annotations

import numpy as np

from .go import EMPTY, Position

HISTORY = 4
PLANES = 1 + 4 * HISTORY


def extract_features(pos: Position) -> np.ndarray:
    """17 x N x N float32 planes.

    Plane 0 is all ones.  Then, for the current position and the three before
    it (newest first): stones of the player to move now, opponent stones,
    empty points illegal for whoever was to move in that position, and points
    that are the last liberty of some group.  Missing history repeats the
    oldest available position.
    """
    n = pos.size
    n2 = n * n
    out = np.zeros((PLANES, n2), dtype=np.float32)
    out[0] = 1.0
    me = pos.to_move
    recent = pos.recent(HISTORY)
    while len(recent) < HISTORY:
        recent.append(recent[-1])
    for t, h in enumerate(recent):
        base = 1 + 4 * t
        board = np.frombuffer(h.board, dtype=np.uint8)
        out[base] = board == me
        out[base + 1] = (board != me) & (board != EMPTY)
        illegal = out[base + 2]
        legal = h.legal_moves()
        for p in range(n2):
            if h.board[p] == EMPTY and p not in legal:
                illegal[p] = 1.0
        for p in h.atari_points():
            out[base + 3, p] = 1.0
    return out.reshape(PLANES, n, n)


def transform_planes(planes: np.ndarray, sym: int) -> np.ndarray:
    """Apply dihedral symmetry ``sym`` (0..7) to the last two axes."""
    out = planes
    if sym & 4:
        out = np.swapaxes(out, -1, -2)
    return np.rot90(out, sym & 3, axes=(-2, -1))


def inverse_transform_planes(planes: np.ndarray, sym: int) -> np.ndarray:
    out = np.rot90(planes, -(sym & 3), axes=(-2, -1))
    if sym & 4:
        out = np.swapaxes(out, -1, -2)
    return out


def untransform_policy(policy: np.ndarray, size: int, sym: int) -> np.ndarray:
    """Map a policy computed on transformed planes back to original move numbers."""
    if sym == 0:
        return policy
    board = inverse_transform_planes(policy[:-1].reshape(size, size), sym)
    return np.concatenate([board.reshape(-1), policy[-1:]])
