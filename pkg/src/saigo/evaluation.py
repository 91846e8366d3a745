"""Evaluator interface and the synthetic evaluators used for desk-scale testing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from . import oracle
from .go import BLACK, Position, neighbor_table
from .value import SigmoidParams, WinrateCurve, winrate


@dataclass(frozen=True)
class EvalResult:
    policy: np.ndarray  # N*N + 1 probabilities, pass last
    params: SigmoidParams

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta

    def curve(self, pos: Position) -> WinrateCurve:
        return WinrateCurve.of(self.params, pos.signed_komi)

    def winrate(self, pos: Position) -> float:
        return winrate(self.curve(pos), 0.0)


class Evaluator(Protocol):
    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult: ...


def _position_rng(pos: Position, seed: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, pos.hash & 0xFFFFFFFF, pos.hash >> 32, pos.to_move])


def area_lead(pos: Position) -> float:
    """Tromp-Taylor area lead of the player to move, komi excluded."""
    black, white = pos.area()
    return float(black - white if pos.to_move == BLACK else white - black)


def uniform_legal_policy(pos: Position) -> np.ndarray:
    policy = np.zeros(pos.size * pos.size + 1)
    legal = list(pos.legal_moves())
    policy[legal] = 1.0 / len(legal)
    return policy


def fills_own_eye(pos: Position, move: int) -> bool:
    """True for an empty point whose every neighbour is a stone of the player to move."""
    if move == pos.pass_move:
        return False
    board = pos.board
    return all(board[q] == pos.to_move for q in neighbor_table(pos.size)[move])


def eye_preserving_policy(pos: Position) -> np.ndarray:
    """Uniform over legal moves that do not fill the mover's own single-point eyes."""
    policy = np.zeros(pos.size * pos.size + 1)
    moves = [m for m in pos.legal_moves() if not fills_own_eye(pos, m)]
    policy[moves] = 1.0 / len(moves)
    return policy


class UniformRandomEvaluator:
    """Pseudo-random policy and alpha, fixed per (position, seed); beta = 1."""

    name = "uniform-random"

    def __init__(self, seed: int = 0, alpha_range: float = 10.0):
        self.seed = seed
        self.alpha_range = alpha_range

    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult:
        rng = _position_rng(pos, self.seed)
        raw = rng.random(pos.size * pos.size + 2)
        policy = raw[:-1] / raw[:-1].sum()
        alpha = (2.0 * raw[-1] - 1.0) * self.alpha_range
        return EvalResult(policy, SigmoidParams(alpha, 1.0))


class TerritoryEvaluator:
    """alpha = current area lead of the player to move (plus optional seeded noise).

    The policy is uniform over legal moves, except that the mover never fills
    its own single-point eyes.
    """

    name = "territory"

    def __init__(self, beta: float = 1.0, noise: float = 0.0, seed: int = 0):
        self.beta = beta
        self.noise = noise
        self.seed = seed

    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult:
        alpha = area_lead(pos)
        if self.noise > 0:
            alpha += self.noise * float(_position_rng(pos, self.seed).standard_normal())
        return EvalResult(eye_preserving_policy(pos), SigmoidParams(alpha, self.beta))


class OracleEvaluator:
    """Exact minimax lead on boards up to 3x3, policy concentrated on optimal moves."""

    name = "oracle"

    def __init__(self, beta: float = 20.0, optimal_mass: float = 0.9):
        self.beta = beta
        self.optimal_mass = optimal_mass

    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult:
        if pos.size > oracle.MAX_ORACLE_SIZE:
            raise oracle.OracleTooLarge(f"oracle evaluator needs a board of at most "
                                        f"{oracle.MAX_ORACLE_SIZE}x{oracle.MAX_ORACLE_SIZE}")
        policy = np.zeros(pos.size * pos.size + 1)
        if pos.is_terminal:
            policy[:] = uniform_legal_policy(pos)
            return EvalResult(policy, SigmoidParams(area_lead(pos), self.beta))
        values = oracle.move_values(pos)
        best = max(values.values())
        good = [m for m, v in values.items() if v == best]
        rest = [m for m in values if m not in good]
        if rest:
            policy[good] = self.optimal_mass / len(good)
            policy[rest] = (1.0 - self.optimal_mass) / len(rest)
        else:
            policy[good] = 1.0 / len(good)
        return EvalResult(policy, SigmoidParams(float(best), self.beta))


def make_evaluator(kind: str, *, seed: int = 0, beta: float = 1.0, noise: float = 0.0,
                   weights: str | None = None) -> Evaluator:
    if kind == "uniform-random":
        return UniformRandomEvaluator(seed)
    if kind == "territory":
        return TerritoryEvaluator(beta, noise, seed)
    if kind == "oracle":
        return OracleEvaluator()
    if kind == "net":
        from .network import NetworkEvaluator, NetworkWeights
        if weights is None:
            raise ValueError("the net evaluator needs a weights file")
        return NetworkEvaluator(NetworkWeights.load(weights))
    raise ValueError(f"unknown evaluator {kind!r}")
