"""Maximum-likelihood Elo ratings from win/draw/loss counts.

Each match between f and g contributes a log p + b log q + c log r, where
(p, q, r) are the win/draw/loss probabilities that maximise that term subject
to p + q + r = 1 and p + q/2 = expected_score(s_f - s_g).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

KAPPA = math.log(10.0) / 400.0
RATING_CLAMP = 2000.0
TOLERANCE = 1e-4
MAX_ITERATIONS = 500


class Disconnected(ValueError):
    pass


class DegenerateDiff(ValueError):
    pass


class NonConvergence(RuntimeWarning):
    pass


def _expit(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def expected_score(d: float) -> float:
    return _expit(KAPPA * d)


def _scores(d: float) -> tuple[float, float]:
    # both sides computed directly so w + (1 - w) is exact to one ulp
    return _expit(KAPPA * d), _expit(-KAPPA * d)


def inner_probabilities(d: float, a: float, b: float, c: float) -> tuple[float, float, float]:
    """Win, draw, loss probabilities for Elo difference ``d`` given the observed counts."""
    if a < 0 or b < 0 or c < 0 or a + b + c <= 0:
        raise ValueError("counts must be non-negative with at least one game")
    w, wc = _scores(d)
    if b == 0:
        return w, 0.0, wc
    q_max = 2.0 * min(w, wc)
    if q_max <= 0.0:
        raise DegenerateDiff(f"no room for draws at difference {d}")
    # stationarity b/q = a/(2p) + c/(2r) reduces to (n/2) q^2 - B q + 2 b w wc = 0
    n = a + b + c
    big_b = b + a * wc + c * w
    disc = max(big_b * big_b - 4.0 * n * b * w * wc, 0.0)
    q = 4.0 * b * w * wc / (big_b + math.sqrt(disc))
    q = min(q, q_max)
    p = max(w - q / 2.0, 0.0)
    r = max(wc - q / 2.0, 0.0)
    return p, q, r


def _term(count: float, prob: float) -> float:
    if count == 0:
        return 0.0
    if prob <= 0.0:
        return -math.inf
    return count * math.log(prob)


def match_log_likelihood(d: float, a: float, b: float, c: float) -> float:
    p, q, r = inner_probabilities(d, a, b, c)
    return _term(a, p) + _term(b, q) + _term(c, r)


def _derivatives(d: float, a: float, b: float, c: float) -> tuple[float, float]:
    """First and second derivative of the profiled match term in ``d``."""
    w, wc = _scores(d)
    p, q, r = inner_probabilities(d, a, b, c)
    w1 = w * wc * KAPPA
    w2 = KAPPA * w1 * (wc - w)
    if b and q >= 2.0 * min(w, wc):
        # draws pinned at their maximum: q = 2 min(w, 1 - w), the other side is |2w - 1|
        sign, other_count = (1.0, c) if w <= wc else (-1.0, a)
        other = abs(w - wc)
        grad = sign * 2.0 * b * w1 / q
        hess = b * (sign * 2.0 * w2 / q - 4.0 * w1 * w1 / (q * q))
        if other_count:
            grad -= sign * 2.0 * other_count * w1 / other
            hess += other_count * (-sign * 2.0 * w2 / other - 4.0 * w1 * w1 / (other * other))
        return grad, hess
    ap = a / p if a else 0.0
    cr = c / r if c else 0.0
    ap2 = a / (p * p) if a else 0.0
    cr2 = c / (r * r) if c else 0.0
    grad = (ap - cr) * w1
    hess = -(ap2 + cr2) * w1 * w1 + (ap - cr) * w2
    if b and q > 0:
        f_qq = -b / (q * q) - ap2 / 4.0 - cr2 / 4.0
        f_dq = (ap2 - cr2) / 2.0 * w1
        hess -= f_dq * f_dq / f_qq
    return grad, hess


@dataclass(frozen=True)
class Match:
    first: str
    second: str
    wins: int
    draws: int
    losses: int

    @property
    def games(self) -> int:
        return self.wins + self.draws + self.losses

    def mirrored(self) -> Match:
        return Match(self.second, self.first, self.losses, self.draws, self.wins)


@dataclass
class MatchSet:
    matches: list[Match] = field(default_factory=list)

    def __post_init__(self):
        for m in self.matches:
            if min(m.wins, m.draws, m.losses) < 0 or m.games < 1:
                raise ValueError(f"bad counts in match {m}")
            if m.first == m.second:
                raise ValueError(f"player {m.first} plays itself")

    @property
    def players(self) -> list[str]:
        seen = {}
        for m in self.matches:
            seen.setdefault(m.first, None)
            seen.setdefault(m.second, None)
        return list(seen)

    def games(self) -> dict[str, int]:
        out = {p: 0 for p in self.players}
        for m in self.matches:
            out[m.first] += m.games
            out[m.second] += m.games
        return out

    @classmethod
    def read_csv(cls, text: str) -> MatchSet:
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["first", "second", "wins", "draws", "losses"]:
            raise ValueError("match file header must be first,second,wins,draws,losses")
        return cls([Match(row["first"], row["second"], int(row["wins"]), int(row["draws"]),
                          int(row["losses"])) for row in reader])

    def write_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["first", "second", "wins", "draws", "losses"])
        for m in self.matches:
            w.writerow([m.first, m.second, m.wins, m.draws, m.losses])
        return out.getvalue()


@dataclass
class RatingVector:
    ratings: dict[str, float]
    anchor: str
    clamped: set[str] = field(default_factory=set)
    converged: bool = True
    iterations: int = 0

    def __getitem__(self, player: str) -> float:
        return self.ratings[player]

    def difference(self, f: str, g: str) -> float:
        return self.ratings[f] - self.ratings[g]

    def to_csv(self, games: dict[str, int]) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["player", "rating", "games"])
        for p, s in self.ratings.items():
            w.writerow([p, f"{s:.2f}", games.get(p, 0)])
        return out.getvalue()


def log_likelihood(ratings: dict[str, float] | RatingVector, ms: MatchSet) -> float:
    s = ratings.ratings if isinstance(ratings, RatingVector) else ratings
    return sum(match_log_likelihood(s[m.first] - s[m.second], m.wins, m.draws, m.losses)
               for m in ms.matches)


def _check_connected(ms: MatchSet, anchor: str) -> None:
    adj: dict[str, set[str]] = {p: set() for p in ms.players}
    if anchor not in adj:
        raise Disconnected(f"anchor {anchor!r} plays no matches")
    for m in ms.matches:
        adj[m.first].add(m.second)
        adj[m.second].add(m.first)
    seen = {anchor}
    todo = deque([anchor])
    while todo:
        for q in adj[todo.popleft()]:
            if q not in seen:
                seen.add(q)
                todo.append(q)
    missing = [p for p in adj if p not in seen]
    if missing:
        raise Disconnected(f"no path from {anchor!r} to {', '.join(missing)}")


def fit(ms: MatchSet, anchor: str | None = None, *, tolerance: float = TOLERANCE,
        max_iterations: int = MAX_ITERATIONS, clamp: float = RATING_CLAMP) -> RatingVector:
    """Newton ascent on the log-likelihood with the anchor held at 0.

    Each step is backtracked until the likelihood does not decrease.  Ratings
    that run into +-clamp are frozen there and reported in ``clamped``.
    """
    players = ms.players
    if anchor is None:
        anchor = players[0]
    _check_connected(ms, anchor)
    index = {p: i for i, p in enumerate(players)}
    pairs = [(index[m.first], index[m.second], m.wins, m.draws, m.losses) for m in ms.matches]
    s = np.zeros(len(players))
    frozen = np.zeros(len(players), dtype=bool)
    frozen[index[anchor]] = True

    def objective(x: np.ndarray) -> float:
        return sum(match_log_likelihood(x[f] - x[g], a, b, c) for f, g, a, b, c in pairs)

    current = objective(s)
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        grad = np.zeros(len(players))
        hess = np.zeros((len(players), len(players)))
        for f, g, a, b, c in pairs:
            g1, h1 = _derivatives(s[f] - s[g], a, b, c)
            grad[f] += g1
            grad[g] -= g1
            hess[f, f] += h1
            hess[g, g] += h1
            hess[f, g] -= h1
            hess[g, f] -= h1
        active = ~frozen
        step = np.zeros(len(players))
        ga, ha = grad[active], hess[np.ix_(active, active)]
        try:
            direction = np.linalg.solve(ha, -ga)
            if direction @ ga <= 0:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            direction = ga * 100.0
        step[active] = direction
        t = 1.0
        while True:
            trial = np.clip(s + t * step, -clamp, clamp)
            value = objective(trial)
            if value >= current or t < 1e-12:
                break
            t *= 0.5
        if value < current:
            converged = True
            break
        change = np.max(np.abs(trial - s)) if len(s) else 0.0
        s, current = trial, value
        hit = (np.abs(s) >= clamp) & ~frozen
        frozen |= hit
        if change < tolerance:
            converged = True
            break
    clamped = {players[i] for i in range(len(players)) if abs(s[i]) >= clamp}
    if not converged:
        warnings.warn(f"rating fit did not converge in {max_iterations} iterations", NonConvergence)
    return RatingVector({p: float(s[i]) for i, p in enumerate(players)}, anchor, clamped,
                        converged, it)


def fit_records(records: Iterable[tuple[str, str, int, int, int]], anchor: str | None = None) -> RatingVector:
    return fit(MatchSet([Match(*r) for r in records]), anchor)
