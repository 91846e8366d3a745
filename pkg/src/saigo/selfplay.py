"""Self-play generation: komi sampling, branching, blunder filtering and training chunks.

Chunk format (UTF-8 text)::

    SAID1
    <size>\\t<komi>\\t<moves>\\t<z>\\t<included>\\t<branch>\\t<visit proportions>

one line per record.  ``moves`` is the space-separated list of move numbers
from the empty board (``-`` when empty), ``branch`` is ``game:move`` or
``-``, and the proportions are N*N + 1 space-separated floats.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .evaluation import Evaluator
from .go import BLACK, GameResult, Position, Termination, tromp_taylor_score
from .search import SearchConfig, estimate_score, run_search, select_move, should_resign
from .sgf import SgfGame
from .value import WinrateCurve, logit

log = logging.getLogger(__name__)

BRANCH_PROBABILITY = 0.02
BLUNDER_DELTA = 0.05
KOMI_RANGE = (-10.0, 30.0)
CHUNK_MAGIC = "SAID1"


class MalformedRecord(ValueError):
    pass


def round_half(x: float) -> float:
    """Nearest multiple of 0.5 (halfway cases round up)."""
    return math.floor(2.0 * x + 0.5) / 2.0


@dataclass(frozen=True)
class Branch:
    game: int
    move: int


@dataclass(frozen=True)
class GameTask:
    komi: float
    seed: int
    origin: Branch | None = None
    start_moves: tuple[int, ...] = ()  # from the empty board; empty for complete games

    @property
    def is_branch(self) -> bool:
        return self.origin is not None


@dataclass(frozen=True)
class TrainingRecord:
    size: int
    komi: float
    moves: tuple[int, ...]
    visit_proportions: tuple[float, ...]
    z: float
    included: bool = True
    branch: Branch | None = None

    def position(self) -> Position:
        pos = Position.empty(self.size, self.komi)
        for m in self.moves:
            pos = pos.play(m)
        return pos


@dataclass
class PlayedGame:
    task: GameTask
    result: GameResult
    records: list[TrainingRecord]
    branches: list[GameTask]
    final: Position
    last_blunder: int = -1

    def sgf(self) -> str:
        return SgfGame.from_position(self.final, self.result).dumps()


# -- komi and branches ---------------------------------------------------------

def sample_komi(empty_board_curve: WinrateCurve, rng: np.random.Generator,
                clamp: tuple[float, float] = KOMI_RANGE) -> float:
    """Draw a komi from the empty-board sigmoid read as a distribution function.

    The curve is Black's (Black to move); its u-quantile in Black bonus points
    is converted to the komi credited to White.
    """
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    x_u = -empty_board_curve.shift + logit(u) / empty_board_curve.beta
    komi = -empty_board_curve.signed_komi - x_u
    return min(clamp[1], max(clamp[0], round_half(komi)))


def fair_komi(pos: Position, alpha_hat: float) -> float:
    """Komi that makes ``pos`` estimated even: alpha + k_s = 0 for the player to move."""
    return round_half(alpha_hat if pos.to_move == BLACK else -alpha_hat)


def maybe_branch(pos: Position, alpha_hat: float, rng: np.random.Generator, game: int = 0,
                 probability: float = BRANCH_PROBABILITY) -> GameTask | None:
    if rng.random() >= probability:
        return None
    moves = tuple(m for _, m in pos.move_history())
    seed = int(rng.integers(2**63))
    return GameTask(fair_komi(pos, alpha_hat), seed, Branch(game, len(moves)), moves)


# -- games --------------------------------------------------------------------

def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**63))


def play_game(task: GameTask, evaluator: Evaluator, cfg: SearchConfig, *, size: int = 9,
              game_id: int = 0, blunder_delta: float = BLUNDER_DELTA,
              branch_probability: float = BRANCH_PROBABILITY, max_moves: int | None = None,
              score_resigned: bool = False) -> PlayedGame:
    rng = np.random.default_rng(task.seed)
    pos = Position.empty(size, task.komi)
    for m in task.start_moves:
        pos = pos.play(m)
    start = len(task.start_moves)
    limit = max_moves if max_moves is not None else 3 * size * size
    pending = []  # (position, visit proportions) per move of this game
    branches = []
    last_blunder = -1
    result = None
    while not pos.is_terminal:
        move_number = start + len(pending)
        if move_number >= limit:
            result = GameResult.from_score(tromp_taylor_score(pos), Termination.MOVE_LIMIT)
            break
        report = run_search(pos, evaluator, replace(cfg, seed=_child_seed(rng)))
        if should_resign(report, cfg):
            margin = None
            if score_resigned:
                margin = abs(estimate_score(pos, evaluator, seed=_child_seed(rng)))
            result = GameResult.resignation(pos.to_move, margin)
            break
        total = report.visits.sum()
        props = report.visits / total if total > 0 else np.eye(len(report.visits))[report.move]
        move = select_move(report, move_number, cfg, rng)
        if move_number < cfg.random_moves and move != report.move:
            best = report.child_values.get(report.move)
            got = report.child_values.get(move)
            if best is not None and got is not None and got < best - blunder_delta:
                last_blunder = len(pending)
        pending.append((pos, props))
        task_b = maybe_branch(pos, report.alpha, rng, game_id, branch_probability)
        if task_b is not None:
            branches.append(task_b)
        pos = pos.play(move)
    if result is None:
        result = GameResult.from_score(tromp_taylor_score(pos))
    records = []
    for i, (p, props) in enumerate(pending):
        records.append(TrainingRecord(
            size=size, komi=task.komi, moves=tuple(m for _, m in p.move_history()),
            visit_proportions=tuple(float(x) for x in props),
            z=result.value_for(p.to_move), included=i > last_blunder, branch=task.origin))
    # branches from positions before the last blunder would inherit a wrong epilogue
    branches = [b for b in branches if b.origin.move - start > last_blunder]
    return PlayedGame(task, result, records, branches, pos, last_blunder)


def game_seeds(master_seed: int, games: int) -> list[int]:
    seq = np.random.SeedSequence(master_seed)
    return [int(s.generate_state(2, dtype=np.uint64)[0] >> 1) for s in seq.spawn(games)]


def run_generation(evaluator: Evaluator, cfg: SearchConfig, games: int = 2000, *, size: int = 9,
                   master_seed: int = 0, reference_komi: float = 7.5,
                   branch_probability: float = BRANCH_PROBABILITY,
                   max_moves: int | None = None) -> Iterator[PlayedGame]:
    """Play one generation, keeping complete games and branches at 2:1 when branches exist."""
    empty = Position.empty(size, reference_komi)
    curve = evaluator.evaluate(empty).curve(empty)
    queue: list[GameTask] = []
    complete = branched = 0
    for gid, seed in enumerate(game_seeds(master_seed, games)):
        if queue and 2 * branched < complete:
            task = queue.pop(0)
            task = replace(task, seed=seed)
            branched += 1
        else:
            rng = np.random.default_rng(seed)
            task = GameTask(sample_komi(curve, rng), seed)
            complete += 1
        game = play_game(task, evaluator, cfg, size=size, game_id=gid,
                         branch_probability=branch_probability, max_moves=max_moves)
        queue.extend(game.branches)
        log.info("game %d (%s, komi %g): %s in %d moves", gid, "branch" if task.is_branch else "full",
                 task.komi, game.result.sgf(), len(game.records))
        yield game


# -- chunks -------------------------------------------------------------------

def export_chunk(records: list[TrainingRecord]) -> bytes:
    lines = [CHUNK_MAGIC]
    for r in records:
        moves = " ".join(str(m) for m in r.moves) or "-"
        branch = f"{r.branch.game}:{r.branch.move}" if r.branch else "-"
        props = " ".join(repr(float(x)) for x in r.visit_proportions)
        lines.append("\t".join([str(r.size), repr(float(r.komi)), moves, repr(float(r.z)),
                                "1" if r.included else "0", branch, props]))
    return ("\n".join(lines) + "\n").encode()


def parse_chunk(data: bytes) -> list[TrainingRecord]:
    try:
        text = data.decode()
    except UnicodeDecodeError as exc:
        raise MalformedRecord("chunk is not UTF-8") from exc
    lines = text.split("\n")
    if not lines or lines[0] != CHUNK_MAGIC:
        raise MalformedRecord("missing SAID1 header")
    if lines[-1] != "":
        raise MalformedRecord("chunk must end with a newline")
    out = []
    for lineno, line in enumerate(lines[1:-1], start=2):
        try:
            out.append(_parse_record(line))
        except (ValueError, IndexError) as exc:
            raise MalformedRecord(f"line {lineno}: {exc}") from None
    return out


def _parse_record(line: str) -> TrainingRecord:
    fields = line.split("\t")
    if len(fields) != 7:
        raise MalformedRecord(f"expected 7 fields, got {len(fields)}")
    size = int(fields[0])
    komi = float(fields[1])
    moves = () if fields[2] == "-" else tuple(int(m) for m in fields[2].split(" "))
    z = float(fields[3])
    if z not in (0.0, 0.5, 1.0):
        raise MalformedRecord(f"bad result {z}")
    if fields[4] not in ("0", "1"):
        raise MalformedRecord(f"bad flag {fields[4]!r}")
    branch = None
    if fields[5] != "-":
        g, m = fields[5].split(":")
        branch = Branch(int(g), int(m))
    props = tuple(float(x) for x in fields[6].split(" "))
    if len(props) != size * size + 1:
        raise MalformedRecord(f"expected {size * size + 1} proportions, got {len(props)}")
    if any(p < 0 for p in props) or abs(sum(props) - 1.0) > 1e-6:
        raise MalformedRecord("visit proportions are not a distribution")
    if any(not 0 <= m <= size * size for m in moves):
        raise MalformedRecord("move off the board")
    return TrainingRecord(size, komi, moves, props, z, fields[4] == "1", branch)
