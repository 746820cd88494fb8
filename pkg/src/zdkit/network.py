"""Reduction of a networked game to focal-node vs fictitious opponent.

Every node of an undirected graph plays a fixed symmetric two-player base
game against each neighbor and collects the sum of edge payoffs.  From the
focal node's viewpoint the rest of the network acts as a single fictitious
opponent whose strategies are the multisets of neighbor actions, i.e. count
vectors (d_1, ..., d_k) summing to the node degree.  The reduced game is an
ordinary two-player game, so the whole design pipeline applies to it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

import numpy as np

from .design import ZDAssignment, design_extortion, design_pinning
from .errors import DimensionError, DomainError, ValidationError
from .games import GameSpec


@dataclass(frozen=True)
class NetworkGame:
    """Simple undirected graph plus the symmetric base game payoff matrix.

    base_payoff[a-1][b-1] is the payoff of a player choosing a against an
    opponent choosing b.
    """

    nodes: tuple
    edges: tuple
    base_payoff: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.base_payoff, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionError(f"base payoff must be square (k >= 2), got {m.shape}")
        nodes = tuple(self.nodes)
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at node {u!r}")
            if u not in nodes or v not in nodes:
                raise ValidationError(f"edge ({u!r}, {v!r}) references unknown node")
            key = frozenset((u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(key)
        m.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "base_payoff", m)

    @property
    def k(self) -> int:
        return self.base_payoff.shape[0]

    def neighbors(self, node) -> tuple:
        out = []
        for u, v in self.edges:
            if u == node:
                out.append(v)
            elif v == node:
                out.append(u)
        return tuple(out)

    def degree(self, node) -> int:
        return len(self.neighbors(node))

    @classmethod
    def from_json(cls, doc: dict) -> "NetworkGame":
        for key in ("nodes", "edges", "base_game"):
            if key not in doc:
                raise ValidationError(f"network file missing required field '{key}'")
        base = doc["base_game"]
        m = np.array(base["payoff_bimatrix"], dtype=float)
        if "k" in base and int(base["k"]) != m.shape[0]:
            raise ValidationError(
                f"base_game.k = {base['k']} but payoff matrix is {m.shape[0]}x{m.shape[1]}"
            )
        return cls(nodes=tuple(doc["nodes"]), edges=tuple(map(tuple, doc["edges"])),
                   base_payoff=m)

    @classmethod
    def load(cls, path) -> "NetworkGame":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [list(e) for e in self.edges],
            "base_game": {
                "k": self.k,
                "payoff_bimatrix": [list(r) for r in self.base_payoff],
            },
        }


def opponent_strategy_set(k: int, degree: int) -> list:
    """All neighbor-action count vectors for a node of the given degree.

    Ordered with the count of strategy 1 decreasing first, then strategy 2,
    and so on; for k = 2 this gives (d,0), (d-1,1), ..., (0,d).
    """
    if degree < 1:
        raise DomainError("degree must be >= 1")
    if k < 2:
        raise DomainError("base game needs k >= 2 strategies")

    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for d in range(remaining, -1, -1):
            for rest in rec(remaining - d, slots - 1):
                yield (d,) + rest

    out = list(rec(degree, k))
    assert len(out) == comb(degree + k - 1, k - 1)
    return out


@dataclass(frozen=True)
class FOPGame:
    """Two-player reduction: focal node (player 1) vs fictitious opponent."""

    focal: object
    game: GameSpec
    aggregate_profiles: tuple  # the opponent's count vectors, in order

    @property
    def opponent_size(self) -> int:
        return len(self.aggregate_profiles)


def reduce_to_fop(net: NetworkGame, node) -> FOPGame:
    """Build the reduced game for one node against its aggregated neighbors.

    Profiles are ordered with the focal action varying slowest.  The focal
    payoff for (a, counts) is sum_j counts[j] * payoff(a, j); the opponent
    payoff is the total the neighbors collect, sum_j counts[j] * payoff(j, a).
    """
    if node not in net.nodes:
        raise DomainError(f"unknown node {node!r}")
    deg = net.degree(node)
    if deg < 1:
        raise DomainError(f"node {node!r} has no neighbors")
    k = net.k
    counts = opponent_strategy_set(k, deg)
    m = len(counts)
    pay = net.base_payoff
    v_focal = np.empty(k * m)
    v_fop = np.empty(k * m)
    for a in range(k):
        for t, d in enumerate(counts):
            idx = a * m + t
            d = np.asarray(d, dtype=float)
            v_focal[idx] = d @ pay[a, :]
            v_fop[idx] = d @ pay[:, a]
    game = GameSpec(k=(k, m), payoffs=np.vstack([v_focal, v_fop]))
    return FOPGame(focal=node, game=game, aggregate_profiles=tuple(counts))


def fop_pinning(fop: FOPGame, value: float, mu: float, row: int = 1) -> ZDAssignment:
    """Pin the fictitious opponent's expected payoff to a constant."""
    return design_pinning(fop.game, i=1, target=2, value=value, mu=mu, row=row)


def fop_extortion(fop: FOPGame, reference: float, factor: float, mu: float,
                  row: int = 1) -> ZDAssignment:
    """Extort the fictitious opponent: E[c_focal] - r = factor * (E[c_fop] - r)."""
    return design_extortion(fop.game, i=1, reference=reference,
                            targets={2: factor}, mus={2: mu}, rows={2: row})
