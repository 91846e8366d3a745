"""Regenerate the network golden files with an independent torch forward pass.

    python3 tests/golden/make_golden.py

Needs torch; the test suite itself only reads the files written here.
"""

import json
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from saigo.features import extract_features
from saigo.go import Position, from_gtp
from saigo.network import Header, NetworkWeights

HERE = Path(__file__).parent
MOVES = ["E5", "C3", "G7", "D4", "pass", "F3", "C7"]


def torch_forward(w: NetworkWeights, planes: np.ndarray):
    t = {k: torch.tensor(v, dtype=torch.float64) for k, v in w.tensors.items()}

    x = torch.tensor(planes, dtype=torch.float64).unsqueeze(0)

    def affine(x, scale, bias):
        return x * t[scale].view(1, -1, 1, 1) + t[bias].view(1, -1, 1, 1)

    x = F.relu(affine(F.conv2d(x, t["input.conv"], padding=1), "input.scale", "input.bias"))
    for i in range(w.header.blocks):
        y = F.relu(affine(F.conv2d(x, t[f"block{i}.conv1"], padding=1), f"block{i}.scale1", f"block{i}.bias1"))
        y = affine(F.conv2d(y, t[f"block{i}.conv2"], padding=1), f"block{i}.scale2", f"block{i}.bias2")
        x = F.relu(x + y)
    p = F.relu(affine(F.conv2d(x, t["policy.conv"]), "policy.scale", "policy.bias")).flatten(1)
    logits = F.linear(p, t["policy.fc.weight"], t["policy.fc.bias"])[0]
    v = F.relu(affine(F.conv2d(x, t["value.conv"]), "value.scale", "value.bias")).flatten(1)
    heads = []
    for head in ("alpha", "beta"):
        h = F.relu(F.linear(v, t[f"{head}.fc1.weight"], t[f"{head}.fc1.bias"]))
        heads.append(F.linear(h, t[f"{head}.fc2.weight"], t[f"{head}.fc2.bias"])[0, 0])
    return torch.softmax(logits, 0).numpy(), float(heads[0]), float(torch.exp(heads[1]))


def main():
    header = Header(size=9, blocks=1, filters=8, value_filters=2, alpha_width=16, beta_width=16)
    weights = NetworkWeights.random(header, seed=20191010, scale=0.2)
    weights.save(HERE / "net-9x9-1x8.txt")
    pos = Position.empty(9, 7.5)
    for m in MOVES:
        pos = pos.play(from_gtp(m, 9))
    planes = extract_features(pos)
    policy, alpha, beta = torch_forward(weights, planes)
    (HERE / "net-9x9-1x8.expected.json").write_text(json.dumps({
        "moves": MOVES, "komi": 7.5, "policy": [float(x) for x in policy],
        "alpha": alpha, "beta": beta}, indent=1) + "\n")


if __name__ == "__main__":
    main()
