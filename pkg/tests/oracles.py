"""Independent reference implementations used only by the tests.

Nothing here imports the rules code under test: boards are plain lists of
strings ('.', 'X', 'O') and every group is found with a fresh flood fill.
"""

from __future__ import annotations

import math

from scipy import integrate, optimize


# -- Go rules -----------------------------------------------------------------

def _neighbours(i: int, n: int) -> list[int]:
    r, c = divmod(i, n)
    out = []
    if r > 0:
        out.append(i - n)
    if r < n - 1:
        out.append(i + n)
    if c > 0:
        out.append(i - 1)
    if c < n - 1:
        out.append(i + 1)
    return out


def _group(board: list[str], start: int, n: int) -> tuple[set[int], set[int]]:
    color = board[start]
    stones, libs, todo = {start}, set(), [start]
    while todo:
        p = todo.pop()
        for q in _neighbours(p, n):
            if board[q] == ".":
                libs.add(q)
            elif board[q] == color and q not in stones:
                stones.add(q)
                todo.append(q)
    return stones, libs


def apply_move(board: list[str], move: int, color: str, n: int) -> list[str] | None:
    """Board after ``color`` plays ``move``, or None if occupied or suicide."""
    if board[move] != ".":
        return None
    b = list(board)
    b[move] = color
    enemy = "O" if color == "X" else "X"
    for q in _neighbours(move, n):
        if b[q] == enemy:
            stones, libs = _group(b, q, n)
            if not libs:
                for s in stones:
                    b[s] = "."
    if not _group(b, move, n)[1]:
        return None
    return b


def brute_legal_moves(history: list[list[str]], color: str, n: int) -> set[int]:
    """Legal points (pass excluded) under positional superko over ``history``."""
    seen = {"".join(b) for b in history}
    out = set()
    for m in range(n * n):
        b = apply_move(history[-1], m, color, n)
        if b is not None and "".join(b) not in seen:
            out.add(m)
    return out


def brute_area(board: list[str], n: int) -> tuple[int, int]:
    black = board.count("X")
    white = board.count("O")
    done = set()
    for i in range(n * n):
        if board[i] != "." or i in done:
            continue
        region, border, todo = {i}, set(), [i]
        while todo:
            p = todo.pop()
            for q in _neighbours(p, n):
                if board[q] == ".":
                    if q not in region:
                        region.add(q)
                        todo.append(q)
                else:
                    border.add(board[q])
        done |= region
        if border == {"X"}:
            black += len(region)
        elif border == {"O"}:
            white += len(region)
    return black, white


def brute_score(board: list[str], n: int, komi: float) -> float:
    b, w = brute_area(board, n)
    return b - w - komi


# -- value model ----------------------------------------------------------------

def rho(alpha: float, beta: float, ks: float, x: float) -> float:
    z = beta * (alpha + ks + x)
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def interval_mean_quad(alpha: float, beta: float, ks: float, lo: float, hi: float) -> float:
    lo, hi = min(lo, hi), max(lo, hi)
    if hi - lo < 1e-12:
        return rho(alpha, beta, ks, 0.5 * (lo + hi))
    val, _ = integrate.quad(lambda x: rho(alpha, beta, ks, x), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / (hi - lo)


def bonus_root(alpha: float, beta: float, ks: float, target: float) -> float:
    """Bonus x with rho(x) == target, found by bracketing (no closed form)."""
    f = lambda x: rho(alpha, beta, ks, x) - target
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


# -- ratings ----------------------------------------------------------------------

def inner_grid(d: float, a: int, b: int, c: int, steps: int = 200001) -> float:
    """Draw probability maximising the match term, by dense grid search."""
    w = 1.0 / (1.0 + 10.0 ** (-d / 400.0))
    q_max = 2.0 * min(w, 1.0 - w)
    best, best_q = -math.inf, 0.0
    for k in range(steps):
        q = q_max * k / (steps - 1)
        p, r = w - q / 2, 1 - w - q / 2
        terms = []
        for cnt, prob in ((a, p), (b, q), (c, r)):
            if cnt:
                terms.append(cnt * math.log(prob) if prob > 0 else -math.inf)
        v = sum(terms)
        if v > best:
            best, best_q = v, q
    return best_q


def bradley_terry(players: list[str], matches: list[tuple[str, str, int, int]], anchor: str) -> dict[str, float]:
    """Draw-free Elo MLE by direct numerical optimisation of the binomial likelihood."""
    idx = {p: i for i, p in enumerate(q for q in players if q != anchor)}
    k = math.log(10) / 400

    def nll(x):
        s = lambda p: 0.0 if p == anchor else x[idx[p]]
        total = 0.0
        for f, g, wins, losses in matches:
            z = k * (s(f) - s(g))
            total += wins * math.log1p(math.exp(-z)) + losses * math.log1p(math.exp(z))
        return total

    res = optimize.minimize(nll, [0.0] * len(idx), method="BFGS", options={"gtol": 1e-10})
    out = {anchor: 0.0}
    out.update({p: float(res.x[i]) for p, i in idx.items()})
    return out
