"""PUCT tree search with agent values, move selection, resignation and score estimation.

Node values are stored from the perspective of the player to move at that
node; a parent scores child ``a`` with ``1 - W_a / N_a``.  The agent's bonus
interval is fixed once from the root evaluation and reused for every leaf.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from .evaluation import EvalResult, Evaluator
from .go import BLACK, Position, tromp_taylor_score
from .value import AgentConfig, BonusInterval, WinrateCurve, value_nu, winrate


class NoLegalMove(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    visits: int = 800
    c_puct: float = 0.8
    agent: AgentConfig = AgentConfig()
    resign_threshold: float = 0.05
    root_move_visit_cap: float = 1.0
    temperature: float = 1.0
    random_moves: int = 25
    symmetries: bool = False
    seed: int = 0
    fpu_reduction: float = 0.1
    workers: int = 1
    virtual_loss: int = 1

    def __post_init__(self):
        if self.visits < 1:
            raise ValueError("visits must be at least 1")
        if not 0.0 <= self.resign_threshold < 0.5:
            raise ValueError("resign threshold must lie in [0, 0.5)")
        if not 0.0 < self.root_move_visit_cap <= 1.0:
            raise ValueError("root visit cap must lie in (0, 1]")
        if self.workers < 1:
            raise ValueError("need at least one worker")


class Node:
    __slots__ = ("pos", "player", "prior", "N", "W", "WR", "result", "terminal", "moves",
                 "priors", "children", "child_N", "child_W", "pending")

    def __init__(self, pos: Position, prior: float = 1.0):
        self.pos = pos
        self.player = pos.to_move
        self.prior = prior
        self.N = 0
        self.W = 0.0   # agent values, own perspective
        self.WR = 0.0  # plain winrates rho(0), own perspective
        self.result: EvalResult | None = None
        self.terminal = pos.is_terminal
        self.moves: list[int] | None = None
        self.priors = None
        self.children = None
        self.child_N = None
        self.child_W = None  # accumulated value from *this* node's perspective
        self.pending = False

    @property
    def expanded(self) -> bool:
        return self.moves is not None

    @property
    def Q(self) -> float:
        return self.W / self.N if self.N else 0.0

    def walk(self):
        """Every node in the subtree (this one included)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.children is not None:
                stack.extend(c for c in node.children if c is not None)


def terminal_value(pos: Position, player: int) -> float:
    score = tromp_taylor_score(pos)
    if score == 0:
        return 0.5
    return 1.0 if (score > 0) == (player == BLACK) else 0.0


@dataclass
class SearchReport:
    move: int
    visits: np.ndarray            # root visit count per move number
    winrate: float                # subtree mean of plain rho(0), root player's view
    alpha: float
    beta: float
    agent_value: float            # subtree mean of the agent value
    pv: list[int]
    child_values: dict[int, float]  # visited root moves -> Q for the root player
    priors: np.ndarray
    playouts: int
    agent: AgentConfig = AgentConfig()
    root: Node | None = field(default=None, repr=False)


class Search:
    """One search tree over a root position."""

    def __init__(self, pos: Position, evaluator: Evaluator, cfg: SearchConfig):
        if pos.is_terminal:
            raise ValueError("cannot search a finished game")
        self.evaluator = evaluator
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.root = Node(pos)
        self.root_player = pos.to_move
        self.agent = cfg.agent
        self.interval: BonusInterval | None = None
        self.playouts = 0
        self._lock = threading.Lock()

    # -- evaluation --

    def _evaluate(self, node: Node) -> tuple[float, float]:
        """Expand ``node``; return (agent value, plain winrate) for its player."""
        pos = node.pos
        sym = int(self.rng.integers(8)) if self.cfg.symmetries else 0
        res = self.evaluator.evaluate(pos, sym)
        node.result = res
        moves = sorted(pos.legal_moves())
        pri = np.asarray(res.policy, dtype=np.float64)[moves]
        total = pri.sum()
        pri = pri / total if total > 0 else np.full(len(moves), 1.0 / len(moves))
        node.priors = pri
        node.children = [None] * len(moves)
        node.child_N = np.zeros(len(moves))
        node.child_W = np.zeros(len(moves))
        node.moves = moves
        curve = WinrateCurve(res.alpha, res.beta, pos.signed_komi)
        raw = winrate(curve, 0.0)
        if self.interval is None:
            # first evaluation is the root: fix the agent and its bonus interval
            agent = self.agent
            if agent.threshold > 0 and raw <= agent.threshold:
                agent = AgentConfig()
            self.agent = agent
            self.interval = BonusInterval.from_curve(curve, agent, node.player)
        if self.agent.is_plain:
            return raw, raw
        return value_nu(curve, self.interval, node.player == self.interval.owner), raw

    # -- selection --

    def _select(self, node: Node, is_root: bool) -> int:
        cfg = self.cfg
        cn = node.child_N
        parent_q = node.W / node.N if node.N else 0.5
        fpu = min(1.0, max(0.0, parent_q - cfg.fpu_reduction))
        visited = cn > 0
        q = np.where(visited, node.child_W / np.where(visited, cn, 1.0), fpu)
        score = q + cfg.c_puct * node.priors * (math.sqrt(node.N) / (1.0 + cn))
        if is_root and cfg.root_move_visit_cap < 1.0:
            limit = math.floor(cfg.root_move_visit_cap * cfg.visits)
            blocked = cn + 1 > limit
            if not blocked.all():
                score = np.where(blocked, -np.inf, score)
        return int(np.argmax(score))

    def _descend(self) -> list[tuple[Node, int]]:
        """Walk to a leaf; returns the path as (node, index of child taken)."""
        node = self.root
        path = []
        vl = self.cfg.virtual_loss if self.cfg.workers > 1 else 0
        while node.expanded and not node.terminal:
            i = self._select(node, node is self.root)
            child = node.children[i]
            if child is None:
                child = Node(node.pos.play(node.moves[i]), float(node.priors[i]))
                node.children[i] = child
            if vl:
                node.child_N[i] += vl
                node.N += vl
            path.append((node, i))
            node = child
        path.append((node, -1))
        return path

    def _backup(self, path: list[tuple[Node, int]], value: float, raw: float) -> None:
        vl = self.cfg.virtual_loss if self.cfg.workers > 1 else 0
        for node, i in reversed(path):
            if i >= 0:
                # value/raw are currently from the child's perspective
                node.child_N[i] += 1 - vl
                node.child_W[i] += 1.0 - value
                node.N -= vl
                value, raw = 1.0 - value, 1.0 - raw
            node.N += 1
            node.W += value
            node.WR += raw

    def _leaf_value(self, leaf: Node) -> tuple[float, float]:
        if leaf.terminal:
            v = terminal_value(leaf.pos, leaf.player)
            return v, v
        return self._evaluate(leaf)

    def playout(self) -> None:
        path = self._descend()
        value, raw = self._leaf_value(path[-1][0])
        self._backup(path, value, raw)
        self.playouts += 1

    def _worker(self, budget: list[int]) -> None:
        while True:
            with self._lock:
                if budget[0] <= 0:
                    return
                budget[0] -= 1
                path = self._descend()
                leaf = path[-1][0]
                if leaf.pending:
                    # another worker is evaluating this leaf; back the virtual loss out and retry
                    self._undo_virtual(path)
                    budget[0] += 1
                    continue
                leaf.pending = not leaf.terminal
            value, raw = self._leaf_value(leaf)
            with self._lock:
                leaf.pending = False
                self._backup(path, value, raw)
                self.playouts += 1

    def _undo_virtual(self, path: list[tuple[Node, int]]) -> None:
        vl = self.cfg.virtual_loss
        for node, i in path:
            if i >= 0:
                node.child_N[i] -= vl
                node.N -= vl

    def run(self) -> SearchReport:
        cfg = self.cfg
        if self.root.N == 0:
            self.playout()
        remaining = cfg.visits - self.root.N
        if cfg.workers == 1 or remaining <= 1:
            for _ in range(remaining):
                self.playout()
        else:
            budget = [remaining]
            threads = [threading.Thread(target=self._worker, args=(budget,)) for _ in range(cfg.workers)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        return self.report()

    def report(self) -> SearchReport:
        root = self.root
        n2 = root.pos.size * root.pos.size
        visits = np.zeros(n2 + 1)
        priors = np.zeros(n2 + 1)
        visits[root.moves] = root.child_N
        priors[root.moves] = root.priors
        child_values = {m: 1.0 - root.children[i].Q for i, m in enumerate(root.moves)
                        if root.children[i] is not None and root.children[i].N > 0}
        return SearchReport(
            move=best_move(visits, priors),
            visits=visits,
            winrate=root.WR / root.N,
            alpha=root.result.alpha,
            beta=root.result.beta,
            agent_value=root.W / root.N,
            pv=principal_variation(root),
            child_values=child_values,
            priors=priors,
            playouts=self.playouts,
            agent=self.agent,
            root=root,
        )


def best_move(visits: np.ndarray, priors: np.ndarray) -> int:
    """Most visited move (lowest move number on ties); policy argmax if nothing was visited."""
    if visits.max() > 0:
        return int(np.argmax(visits))
    return int(np.argmax(priors))


def principal_variation(root: Node, limit: int = 30) -> list[int]:
    pv = []
    node = root
    while node.expanded and len(pv) < limit and node.child_N.max() > 0:
        i = int(np.argmax(node.child_N))
        pv.append(node.moves[i])
        node = node.children[i]
    return pv


def run_search(pos: Position, evaluator: Evaluator, cfg: SearchConfig) -> SearchReport:
    return Search(pos, evaluator, cfg).run()


def select_move(report: SearchReport, move_number: int, cfg: SearchConfig,
                rng: np.random.Generator | None = None) -> int:
    """Sample by visits**(1/T) during the opening, otherwise take the most visited move."""
    if move_number >= cfg.random_moves or cfg.temperature <= 0:
        return report.move
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    weights = report.visits if report.visits.max() > 0 else report.priors
    mask = weights > 0
    logw = np.full(weights.shape, -np.inf)
    logw[mask] = np.log(weights[mask]) / cfg.temperature
    logw -= logw.max()
    probs = np.exp(logw)
    probs /= probs.sum()
    return int(rng.choice(len(probs), p=probs))


def should_resign(report: SearchReport, cfg: SearchConfig) -> bool:
    return report.winrate < cfg.resign_threshold


# -- score estimation ---------------------------------------------------------

def black_score_of(node: Node) -> float | None:
    """Predicted Black-perspective final score at a node (exact if the game ended there)."""
    pos = node.pos
    if node.terminal:
        return tromp_taylor_score(pos)
    if node.result is None:
        return None
    lead = node.result.alpha + pos.signed_komi
    return lead if pos.to_move == BLACK else -lead


def round_to_komi_grid(value: float, komi: float) -> float:
    """Nearest score compatible with the komi (integer area difference minus komi).

    Exact halfway cases go toward zero.
    """
    lo = math.floor(value + komi) - komi
    hi = lo + 1.0
    dlo, dhi = value - lo, hi - value
    if dlo < dhi:
        return lo
    if dhi < dlo:
        return hi
    return lo if abs(lo) < abs(hi) else hi


def subtree_scores(root: Node) -> list[float]:
    """Predicted scores of every leaf evaluation backed up into ``root``.

    This is the multiset whose mean the winrate uses: an evaluated node
    contributes once, a terminal node once per visit.
    """
    out = []
    for node in root.walk():
        s = black_score_of(node)
        if s is not None:
            out.extend([s] * (node.N if node.terminal else 1))
    return out


def estimate_score(pos: Position, evaluator: Evaluator, visits: int = 1000, seed: int = 0,
                   cfg: SearchConfig | None = None) -> float:
    """Median of predicted scores over the nodes of a plain-winrate search, Black's view."""
    if pos.is_terminal:
        pos = pos.resumed()
    base = cfg if cfg is not None else SearchConfig()
    cfg = replace(base, visits=visits, agent=AgentConfig(), seed=seed, root_move_visit_cap=1.0,
                  workers=1)
    report = run_search(pos, evaluator, cfg)
    scores = subtree_scores(report.root)
    return round_to_komi_grid(float(np.median(scores)), pos.komi)
