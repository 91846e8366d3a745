from __future__ import annotations

import itertools

import numpy as np

from saigo.evaluation import EvalResult
from saigo.go import BLACK, WHITE, Position
from saigo.search import Node
from saigo.value import SigmoidParams

ACCEPTANCE: list[str] = []   # one line per criterion, printed in the terminal summary
EMITTED_SGF: list[str] = []  # every SGF produced by the acceptance runs


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append(f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def check_tree(root: Node) -> list[str]:
    """Visit conservation and value range on every node; returns the violations."""
    problems = []
    for node in root.walk():
        if node.N > 0 and not 0.0 <= node.W / node.N <= 1.0 + 1e-12:
            problems.append(f"Q out of range at {node.pos!r}")
        if node.expanded and not node.terminal:
            if node.N != 1 + node.child_N.sum():
                problems.append(f"N={node.N} but children hold {node.child_N.sum()}")
            for i, child in enumerate(node.children):
                n = 0 if child is None else child.N
                if node.child_N[i] != n:
                    problems.append("child_N out of step with child.N")
                if n and not 0.0 <= node.child_W[i] / n <= 1.0 + 1e-12:
                    problems.append("child Q out of range")
    return problems


def dihedral_images(board: bytes, n: int) -> list[bytes]:
    g = np.frombuffer(board, dtype=np.uint8).reshape(n, n)
    out = []
    for k in range(4):
        r = np.rot90(g, k)
        out.append(r.tobytes())
        out.append(np.ascontiguousarray(r.T).tobytes())
    return out


def canonical_positions(n: int, komi: float = 0.5) -> list[Position]:
    """One legal position per dihedral class of stone layouts, for each player to move."""
    seen = set()
    out = []
    for cells in itertools.product((0, 1, 2), repeat=n * n):
        b = bytes(cells)
        if b in seen:
            continue
        seen.update(dihedral_images(b, n))
        black = [i for i, c in enumerate(cells) if c == BLACK]
        white = [i for i, c in enumerate(cells) if c == WHITE]
        for to_move in (BLACK, WHITE):
            try:
                out.append(Position.setup(n, black, white, to_move, komi))
            except ValueError:
                break
    return out


class ScriptedEvaluator:
    """Evaluator driven by a function of the position: (policy, alpha, beta)."""

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult:
        policy, alpha, beta = self.fn(pos)
        return EvalResult(np.asarray(policy, dtype=np.float64), SigmoidParams(alpha, beta))
