"""Residual policy / double-value network: weight files, inference and the training loss.

Weight file layout (plain text, ``SAIW1``)::

    SAIW1 <size> <blocks> <filters> <value_filters> <alpha_width> <beta_width>
    <one line of space-separated decimal floats per tensor, in layout() order>

Batch norm is stored already folded into a per-channel scale and bias.
Every float is written with ``repr`` so load -> save reproduces the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluation import EvalResult
from .features import PLANES, extract_features, transform_planes, untransform_policy
from .go import Position
from .value import SigmoidParams, sigmoid

MAGIC = "SAIW1"
# exp() argument is clipped so beta stays finite and strictly positive
BETA_LOG_CLIP = 30.0


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Header:
    size: int = 9
    blocks: int = 1
    filters: int = 8
    value_filters: int = 2
    alpha_width: int = 384
    beta_width: int = 256

    def layout(self) -> list[tuple[str, tuple[int, ...]]]:
        n2 = self.size * self.size
        k = self.filters
        out = [("input.conv", (k, PLANES, 3, 3)), ("input.scale", (k,)), ("input.bias", (k,))]
        for i in range(self.blocks):
            for j in (1, 2):
                out += [(f"block{i}.conv{j}", (k, k, 3, 3)), (f"block{i}.scale{j}", (k,)),
                        (f"block{i}.bias{j}", (k,))]
        out += [("policy.conv", (2, k, 1, 1)), ("policy.scale", (2,)), ("policy.bias", (2,)),
                ("policy.fc.weight", (n2 + 1, 2 * n2)), ("policy.fc.bias", (n2 + 1,))]
        vh = self.value_filters
        out += [("value.conv", (vh, k, 1, 1)), ("value.scale", (vh,)), ("value.bias", (vh,))]
        for head, width in (("alpha", self.alpha_width), ("beta", self.beta_width)):
            out += [(f"{head}.fc1.weight", (width, vh * n2)), (f"{head}.fc1.bias", (width,)),
                    (f"{head}.fc2.weight", (1, width)), (f"{head}.fc2.bias", (1,))]
        return out

    def line(self) -> str:
        return (f"{MAGIC} {self.size} {self.blocks} {self.filters} {self.value_filters} "
                f"{self.alpha_width} {self.beta_width}")


@dataclass
class NetworkWeights:
    header: Header
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.header.value_filters not in (2, 3):
            raise ShapeMismatch("value head must have 2 or 3 filters")
        for name, shape in self.header.layout():
            if name not in self.tensors:
                raise ShapeMismatch(f"missing tensor {name}")
            t = np.asarray(self.tensors[name], dtype=np.float64)
            if t.shape != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, got {t.shape}")
            self.tensors[name] = t

    @classmethod
    def zeros(cls, header: Header) -> NetworkWeights:
        tensors = {name: np.zeros(shape) for name, shape in header.layout()}
        return cls(header, tensors)

    @classmethod
    def random(cls, header: Header, seed: int = 0, scale: float = 0.1) -> NetworkWeights:
        rng = np.random.default_rng(seed)
        tensors = {}
        for name, shape in header.layout():
            if ".scale" in name:
                tensors[name] = 1.0 + scale * rng.standard_normal(shape)
            else:
                tensors[name] = scale * rng.standard_normal(shape)
        return cls(header, tensors)

    def dumps(self) -> str:
        lines = [self.header.line()]
        for name, _ in self.header.layout():
            lines.append(" ".join(repr(float(x)) for x in self.tensors[name].reshape(-1)))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> NetworkWeights:
        lines = text.splitlines()
        if not lines:
            raise ShapeMismatch("empty weight file")
        head = lines[0].split()
        if len(head) != 7 or head[0] != MAGIC:
            raise ShapeMismatch(f"bad header line {lines[0]!r}")
        header = Header(*(int(x) for x in head[1:]))
        layout = header.layout()
        if len(lines) - 1 != len(layout):
            raise ShapeMismatch(f"expected {len(layout)} tensor lines, got {len(lines) - 1}")
        tensors = {}
        for (name, shape), line in zip(layout, lines[1:]):
            values = np.array([float(x) for x in line.split()], dtype=np.float64)
            if values.size != math.prod(shape):
                raise ShapeMismatch(f"{name}: expected {math.prod(shape)} values, got {values.size}")
            tensors[name] = values.reshape(shape)
        return cls(header, tensors)

    @classmethod
    def load(cls, path: str | Path) -> NetworkWeights:
        return cls.loads(Path(path).read_text())


def _conv3x3(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    c, n, _ = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1)))
    cols = np.empty((c, 3, 3, n, n))
    for dy in range(3):
        for dx in range(3):
            cols[:, dy, dx] = xp[:, dy:dy + n, dx:dx + n]
    return (w.reshape(w.shape[0], -1) @ cols.reshape(c * 9, n * n)).reshape(-1, n, n)


def _conv1x1(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    c, n, _ = x.shape
    return (w.reshape(w.shape[0], c) @ x.reshape(c, n * n)).reshape(-1, n, n)


def _affine(x: np.ndarray, scale: np.ndarray, bias: np.ndarray) -> np.ndarray:
    return x * scale[:, None, None] + bias[:, None, None]


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    e = np.exp(logits - logits.max())
    return e / e.sum()


def forward_raw(w: NetworkWeights, features: np.ndarray) -> tuple[np.ndarray, float, float]:
    """(policy logits, alpha, beta pre-exponential) for one input."""
    t = w.tensors
    h = w.header
    if features.shape != (PLANES, h.size, h.size):
        raise ShapeMismatch(f"features shape {features.shape} does not match a {h.size}x{h.size} net")
    x = _relu(_affine(_conv3x3(features.astype(np.float64), t["input.conv"]),
                      t["input.scale"], t["input.bias"]))
    for i in range(h.blocks):
        y = _relu(_affine(_conv3x3(x, t[f"block{i}.conv1"]), t[f"block{i}.scale1"], t[f"block{i}.bias1"]))
        y = _affine(_conv3x3(y, t[f"block{i}.conv2"]), t[f"block{i}.scale2"], t[f"block{i}.bias2"])
        x = _relu(x + y)
    p = _relu(_affine(_conv1x1(x, t["policy.conv"]), t["policy.scale"], t["policy.bias"]))
    logits = t["policy.fc.weight"] @ p.reshape(-1) + t["policy.fc.bias"]
    v = _relu(_affine(_conv1x1(x, t["value.conv"]), t["value.scale"], t["value.bias"])).reshape(-1)
    heads = []
    for head in ("alpha", "beta"):
        hidden = _relu(t[f"{head}.fc1.weight"] @ v + t[f"{head}.fc1.bias"])
        heads.append(float((t[f"{head}.fc2.weight"] @ hidden + t[f"{head}.fc2.bias"])[0]))
    return logits, heads[0], heads[1]


def forward(w: NetworkWeights, features: np.ndarray) -> EvalResult:
    logits, alpha, beta_raw = forward_raw(w, features)
    beta = math.exp(min(max(beta_raw, -BETA_LOG_CLIP), BETA_LOG_CLIP))
    return EvalResult(softmax(logits), SigmoidParams(alpha, beta))


class NetworkEvaluator:
    name = "net"

    def __init__(self, weights: NetworkWeights):
        self.weights = weights

    def evaluate(self, pos: Position, symmetry: int = 0) -> EvalResult:
        if pos.size != self.weights.header.size:
            raise ShapeMismatch(f"net is for {self.weights.header.size}x{self.weights.header.size}, "
                                f"position is {pos.size}x{pos.size}")
        planes = extract_features(pos)
        if symmetry:
            planes = np.ascontiguousarray(transform_planes(planes, symmetry))
        result = forward(self.weights, planes)
        if symmetry:
            result = EvalResult(untransform_policy(result.policy, pos.size, symmetry), result.params)
        return result


# -- loss -------------------------------------------------------------------

def _cross_entropy(target: np.ndarray, policy: np.ndarray) -> float:
    mask = target > 0
    with np.errstate(divide="ignore"):
        return float(-(target[mask] * np.log(policy[mask])).sum())


def loss(z: float, visit_proportions: np.ndarray, result: EvalResult, l2_term: float = 0.0,
         signed_komi: float = 0.0) -> float:
    """Regularisation + policy cross-entropy + squared error of rho(0) against the result.

    ``z`` is the game result for the player to move (1 win, 0 loss, 0.5 draw).
    """
    pi = np.asarray(visit_proportions, dtype=np.float64)
    rho = sigmoid(result.beta * (result.alpha + signed_komi))
    return l2_term + _cross_entropy(pi, result.policy) + (z - rho) ** 2


def loss_from_logits(z: float, visit_proportions: np.ndarray, logits: np.ndarray, alpha: float,
                     beta: float, l2_term: float = 0.0, signed_komi: float = 0.0) -> float:
    return loss(z, visit_proportions, EvalResult(softmax(logits), SigmoidParams(alpha, beta)),
                l2_term, signed_komi)


def loss_gradients(z: float, visit_proportions: np.ndarray, logits: np.ndarray, alpha: float,
                   beta: float, signed_komi: float = 0.0) -> dict[str, np.ndarray | float]:
    """Analytic gradient of the loss w.r.t. policy logits, alpha and beta."""
    pi = np.asarray(visit_proportions, dtype=np.float64)
    p = softmax(logits)
    shift = alpha + signed_komi
    rho = sigmoid(beta * shift)
    common = -2.0 * (z - rho) * rho * (1.0 - rho)
    return {"logits": p * pi.sum() - pi, "alpha": common * beta, "beta": common * shift}
