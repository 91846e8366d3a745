"""Engines, head-to-head matches and handicap ladders."""

from __future__ import annotations

import csv
import io
import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Protocol

import numpy as np

from .evaluation import Evaluator
from .go import BLACK, WHITE, GameResult, Position, Termination, handicap_points, opponent, tromp_taylor_score
from .search import SearchConfig, estimate_score, run_search, select_move, should_resign
from .sgf import SgfGame

log = logging.getLogger(__name__)

REFERENCE_KOMI = 7.5
MIN_WINS_FOR_MARGIN = 5


class Engine(Protocol):
    name: str

    def choose(self, pos: Position, move_number: int, rng: np.random.Generator) -> int | None:
        """A move number, or None to resign."""


class SearchEngine:
    def __init__(self, evaluator: Evaluator, cfg: SearchConfig, name: str = "engine"):
        self.evaluator = evaluator
        self.cfg = cfg
        self.name = name
        self.last_report = None

    def choose(self, pos: Position, move_number: int, rng: np.random.Generator) -> int | None:
        report = run_search(pos, self.evaluator, replace(self.cfg, seed=int(rng.integers(2**63))))
        self.last_report = report
        if should_resign(report, self.cfg):
            return None
        return select_move(report, move_number, self.cfg, rng)


# -- match specification ----------------------------------------------------

@dataclass(frozen=True)
class ScoreHandicap:
    """Malus points taken from the focal engine relative to the reference komi."""
    malus: float
    reference: float = REFERENCE_KOMI

    def komi(self, focal_color: int) -> float:
        return self.reference - self.malus if focal_color == WHITE else self.reference + self.malus


@dataclass(frozen=True)
class PositionalHandicap:
    """Black stones placed before the game; White then moves first."""
    stones: int
    placement: tuple[int, ...] | None = None
    komi: float = 0.5

    def points(self, size: int) -> list[int]:
        return list(self.placement) if self.placement is not None else handicap_points(size, self.stones)


@dataclass
class MatchSpec:
    focal: Engine
    opponent: Engine
    games: int = 100
    komi: float = REFERENCE_KOMI
    colors: str = "alternate"  # alternate | black | white (focal engine's colour when fixed)
    handicap: ScoreHandicap | PositionalHandicap | None = None
    seed: int = 0
    size: int = 9
    max_moves: int | None = None
    score_visits: int = 1000
    workers: int = 1

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("a match needs at least one game")
        if self.colors not in ("alternate", "black", "white"):
            raise ValueError(f"unknown colour policy {self.colors!r}")

    def focal_color(self, game: int) -> int:
        if self.colors == "black":
            return BLACK
        if self.colors == "white":
            return WHITE
        return BLACK if game % 2 == 0 else WHITE

    def start(self, focal_color: int) -> Position:
        h = self.handicap
        if isinstance(h, PositionalHandicap):
            return Position.setup(self.size, black=h.points(self.size), to_move=WHITE, komi=h.komi)
        komi = h.komi(focal_color) if isinstance(h, ScoreHandicap) else self.komi
        return Position.empty(self.size, komi)

    def manifest(self) -> str:
        lines = [f"focal={self.focal.name}", f"opponent={self.opponent.name}"]
        for eng, tag in ((self.focal, "focal"), (self.opponent, "opponent")):
            cfg = getattr(eng, "cfg", None)
            if cfg is not None:
                lines.append(f"{tag}.search={asdict(cfg)}")
        for key in ("games", "komi", "colors", "handicap", "seed", "size", "max_moves", "score_visits"):
            lines.append(f"{key}={getattr(self, key)!r}")
        return "\n".join(lines) + "\n"


@dataclass
class GameRecord:
    index: int
    focal_color: int
    komi: float
    result: GameResult | None  # None for a void game
    sgf: str = ""
    focal_margin: float | None = None  # winning margin when the focal engine won
    error: str = ""

    @property
    def void(self) -> bool:
        return self.result is None

    @property
    def focal_won(self) -> bool:
        return self.result is not None and self.result.winner == self.focal_color


@dataclass
class ExperimentReport:
    focal: str
    opponent: str
    games: list[GameRecord] = field(default_factory=list)

    def _played(self, color: int | None = None) -> list[GameRecord]:
        return [g for g in self.games if not g.void and (color is None or g.focal_color == color)]

    @property
    def void_count(self) -> int:
        return sum(g.void for g in self.games)

    def wins(self, color: int | None = None) -> int:
        return sum(g.focal_won for g in self._played(color))

    def played(self, color: int | None = None) -> int:
        return len(self._played(color))

    def win_percentage(self, color: int | None = None) -> float | None:
        n = self.played(color)
        return 100.0 * self.wins(color) / n if n else None

    @property
    def winning_margins(self) -> list[float]:
        return [g.focal_margin for g in self.games if g.focal_won and g.focal_margin is not None]

    @property
    def mean_winning_margin(self) -> float | None:
        m = self.winning_margins
        return statistics.fmean(m) if len(m) >= MIN_WINS_FOR_MARGIN else None

    def summary_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["game", "focal_color", "komi", "result", "focal_won", "focal_margin", "error"])
        for g in self.games:
            w.writerow([g.index, "B" if g.focal_color == BLACK else "W", g.komi,
                        "void" if g.void else g.result.sgf(), int(g.focal_won),
                        "" if g.focal_margin is None else g.focal_margin, g.error])
        return out.getvalue()

    def describe(self) -> str:
        def pct(c):
            v = self.win_percentage(c)
            return "-" if v is None else f"{v:.1f}%"
        margin = self.mean_winning_margin
        return (f"{self.focal} vs {self.opponent}: {self.wins()}/{self.played()} wins "
                f"({pct(None)}; as black {pct(BLACK)}, as white {pct(WHITE)}), "
                f"mean winning margin {'-' if margin is None else f'{margin:.2f}'}, "
                f"void {self.void_count}")


def spread(reports: list[ExperimentReport]) -> tuple[float, float]:
    """Mean and standard deviation of overall win percentage across reports."""
    values = [r.win_percentage() for r in reports if r.played()]
    if not values:
        return float("nan"), float("nan")
    return statistics.fmean(values), statistics.stdev(values) if len(values) > 1 else 0.0


# -- playing ----------------------------------------------------------------

def game_seeds(seed: int, games: int) -> list[int]:
    return [int(s.generate_state(2, dtype=np.uint64)[0] >> 1)
            for s in np.random.SeedSequence(seed).spawn(games)]


def play_one(spec: MatchSpec, index: int, seed: int) -> GameRecord:
    focal_color = spec.focal_color(index)
    pos = spec.start(focal_color)
    rng = np.random.default_rng(seed)
    engines = {focal_color: spec.focal, opponent(focal_color): spec.opponent}
    limit = spec.max_moves if spec.max_moves is not None else 3 * spec.size * spec.size
    try:
        result = None
        move_number = 0
        while not pos.is_terminal:
            if move_number >= limit:
                result = GameResult.from_score(tromp_taylor_score(pos), Termination.MOVE_LIMIT)
                break
            move = engines[pos.to_move].choose(pos, move_number, rng)
            if move is None:
                result = GameResult.resignation(pos.to_move)
                break
            pos = pos.play(move)
            move_number += 1
        if result is None:
            result = GameResult.from_score(tromp_taylor_score(pos))
        margin = None
        if result.winner == focal_color:
            if result.margin is not None:
                margin = result.margin
            else:
                evaluator = getattr(spec.focal, "evaluator", None)
                if evaluator is not None:
                    est = estimate_score(pos, evaluator, spec.score_visits, seed=seed)
                    margin = est if focal_color == BLACK else -est
        names = {BLACK: engines[BLACK].name, WHITE: engines[WHITE].name}
        sgf = SgfGame.from_position(pos, result, names[BLACK], names[WHITE]).dumps()
        return GameRecord(index, focal_color, pos.komi, result, sgf, margin)
    except Exception as exc:  # engine fault: the game is void
        log.warning("game %d void: %s", index, exc)
        return GameRecord(index, focal_color, pos.komi, None, error=f"{type(exc).__name__}: {exc}")


def run_match(spec: MatchSpec, out_dir: str | Path | None = None) -> ExperimentReport:
    seeds = game_seeds(spec.seed, spec.games)
    jobs = list(enumerate(seeds))
    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            records = list(pool.map(lambda job: play_one(spec, *job), jobs))
    else:
        records = [play_one(spec, i, s) for i, s in jobs]
    report = ExperimentReport(spec.focal.name, spec.opponent.name, sorted(records, key=lambda g: g.index))
    if out_dir is not None:
        write_match(spec, report, Path(out_dir))
    return report


def write_match(spec: MatchSpec, report: ExperimentReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for g in report.games:
        if g.sgf:
            (out / f"game-{g.index:04d}.sgf").write_text(g.sgf)
    (out / "summary.csv").write_text(report.summary_csv())
    (out / "manifest.txt").write_text(spec.manifest())


def run_handicap_ladder(spec: MatchSpec, malus: list[float], adaptive: bool = False,
                        step: float = 2.0) -> list[ExperimentReport]:
    """Score-handicap ladder.

    Fixed mode plays a full match at every malus.  Adaptive mode plays
    ``spec.games`` single games starting from ``malus[0]``: a focal win adds
    ``step`` malus and keeps colours, a loss keeps the malus and swaps colours.
    """
    if not malus:
        raise ValueError("empty malus sequence")
    if not adaptive:
        return [run_match(replace(spec, handicap=ScoreHandicap(m))) for m in malus]
    reports = []
    current = malus[0]
    color = BLACK if spec.colors == "black" else WHITE
    for i, seed in enumerate(game_seeds(spec.seed, spec.games)):
        single = replace(spec, games=1, handicap=ScoreHandicap(current),
                         colors="black" if color == BLACK else "white")
        record = play_one(single, i, seed)
        reports.append(ExperimentReport(spec.focal.name, spec.opponent.name, [record]))
        if record.void:
            continue
        if record.focal_won:
            current += step
        else:
            color = opponent(color)
    return reports
