"""Sigmoid winrate model over bonus points and the integral-mean value family.

A position's winrate for the player to move, given ``x`` additional bonus
points, is ``1 / (1 + exp(-beta * (alpha + k_s + x)))`` where ``k_s`` is the
komi signed from that player's point of view.  Agents replace the plain
winrate ``rho(0)`` by the mean of ``rho`` over a bonus interval
``[x_mu, x_lambda]`` fixed at the search root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEGENERATE_WIDTH = 1e-6


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def softplus(z: float) -> float:
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


def logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


@dataclass(frozen=True)
class SigmoidParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")


@dataclass(frozen=True)
class WinrateCurve:
    alpha: float
    beta: float
    signed_komi: float

    @classmethod
    def of(cls, params: SigmoidParams, signed_komi: float) -> WinrateCurve:
        return cls(params.alpha, params.beta, signed_komi)

    @property
    def shift(self) -> float:
        """alpha + k_s: predicted final lead of the player to move."""
        return self.alpha + self.signed_komi

    def opponent(self) -> WinrateCurve:
        return WinrateCurve(-self.alpha, self.beta, -self.signed_komi)

    def __call__(self, x: float = 0.0) -> float:
        return winrate(self, x)


@dataclass(frozen=True)
class AgentConfig:
    lam: float = 0.0
    mu: float = 0.0
    threshold: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.mu <= self.lam <= 1.0:
            raise ValueError(f"need 0 <= mu <= lambda <= 1, got lambda={self.lam} mu={self.mu}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")

    @property
    def is_plain(self) -> bool:
        return self.lam == 0.0 and self.mu == 0.0


@dataclass(frozen=True)
class BonusInterval:
    """Bonus interval, in points for ``owner`` (the colour to move where it was fixed)."""
    x_mu: float
    x_lambda: float
    owner: int

    @classmethod
    def from_curve(cls, curve: WinrateCurve, agent: AgentConfig, owner: int) -> BonusInterval:
        return cls(bonus_for_target(curve, agent.mu), bonus_for_target(curve, agent.lam), owner)


def winrate(curve: WinrateCurve, x: float = 0.0) -> float:
    return sigmoid(curve.beta * (curve.shift + x))


def bonus_for_target(curve: WinrateCurve, eta: float) -> float:
    """Bonus x_eta with rho(x_eta) = eta * 0.5 + (1 - eta) * rho(0)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if eta == 0.0:
        return 0.0
    if eta == 1.0:
        return -curve.shift
    z0 = curve.beta * curve.shift
    # target lies strictly between rho(0) and 0.5; work with the side below 0.5
    # so the logit stays accurate when rho(0) is within rounding of 1
    if z0 <= 0:
        t = eta * 0.5 + (1.0 - eta) * sigmoid(z0)
        return -curve.shift + logit(t) / curve.beta
    t = eta * 0.5 + (1.0 - eta) * sigmoid(-z0)
    return -curve.shift - logit(t) / curve.beta


def _softplus_diff(z1: float, z2: float) -> float:
    """softplus(z2) - softplus(z1) without cancellation when z2 is close to z1."""
    dz = z2 - z1
    if abs(dz) <= 30.0:
        return math.log1p(sigmoid(z1) * math.expm1(dz))
    return softplus(z2) - softplus(z1)


def interval_mean(curve: WinrateCurve, a: float, b: float) -> float:
    """Mean of rho over [a, b] (either order) in closed form."""
    if abs(b - a) < DEGENERATE_WIDTH:
        return winrate(curve, 0.5 * (a + b))
    if b < a:
        a, b = b, a
    beta = curve.beta
    s = curve.shift
    za = beta * (s + a)
    zb = beta * (s + b)
    mean = _softplus_diff(za, zb) / (beta * (b - a))
    return min(1.0, max(0.0, mean))


def value_nu(curve: WinrateCurve, interval: BonusInterval, same_player: bool) -> float:
    """Agent value of a node, from the node's player-to-move perspective.

    ``same_player`` says whether the node's player owns the interval.  If not,
    the owner's bonus x is the node player's bonus -x, so the interval is
    negated before averaging the node's own curve.
    """
    if same_player:
        a, b = interval.x_mu, interval.x_lambda
    else:
        a, b = -interval.x_lambda, -interval.x_mu
    if a == b:
        return winrate(curve, a)
    return interval_mean(curve, a, b)
