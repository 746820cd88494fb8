"""Finite games in payoff-vector form and the profile index machinery.

A game with n players and k_i strategies each has kappa = prod(k_i) joint
profiles, arranged in alphabetic order with the LAST player's index varying
fastest: (1,..,1), (1,..,2), ..., (k_1,..,k_n).  That ordering is the single
source of truth for every other module.  Each player's payoff function is a
row vector of length kappa, so c_i(x) = V_i . x for a profile distribution x.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import DimensionError, DomainError, ValidationError
from .stp import DEFAULT_TOL


@dataclass(frozen=True)
class ProfileIndexer:
    """Bijection between strategy tuples and profile indices 1..kappa.

    kappa_lower[i-1] is the product of strategy counts of players before i
    (1 for i = 1); kappa_upper[i] is the product of counts of players after
    i (1 for i = n, and 0 by convention at position 0).
    """

    k: tuple
    kappa: int = field(init=False)
    kappa_lower: tuple = field(init=False)
    kappa_upper: tuple = field(init=False)

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if not k or any(v < 2 for v in k):
            raise DomainError(f"strategy counts must all be >= 2, got {k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kappa", prod(k))
        n = len(k)
        lower = tuple(prod(k[:i]) for i in range(n))
        upper = (0,) + tuple(prod(k[i:]) for i in range(1, n)) + (1,)
        object.__setattr__(self, "kappa_lower", lower)
        object.__setattr__(self, "kappa_upper", upper)

    @property
    def n(self) -> int:
        return len(self.k)

    def encode(self, strategies) -> int:
        """Profile index (1-based) of a strategy tuple."""
        s = tuple(int(v) for v in strategies)
        if len(s) != self.n:
            raise DimensionError(f"expected {self.n} strategies, got {len(s)}")
        idx = 0
        for i, (si, ki) in enumerate(zip(s, self.k), start=1):
            if not 1 <= si <= ki:
                raise DomainError(f"strategy {si} of player {i} outside 1..{ki}")
            idx += (si - 1) * self.kappa_upper[i]
        return idx + 1

    def decode(self, index: int) -> tuple:
        """Strategy tuple of a profile index (1-based)."""
        if not 1 <= index <= self.kappa:
            raise DomainError(f"profile index {index} outside 1..{self.kappa}")
        v = index - 1
        out = []
        for ki in reversed(self.k):
            out.append(v % ki + 1)
            v //= ki
        return tuple(reversed(out))

    def _check_pair(self, i: int, j: int):
        if not 1 <= i <= self.n:
            raise DomainError(f"player {i} outside 1..{self.n}")
        if not 1 <= j <= self.k[i - 1]:
            raise DomainError(f"strategy {j} of player {i} outside 1..{self.k[i - 1]}")

    def phi(self, i: int, j: int) -> tuple:
        """Sorted indices of all profiles where player i plays strategy j."""
        self._check_pair(i, j)
        return tuple(
            s for s in range(1, self.kappa + 1) if self.decode(s)[i - 1] == j
        )

    def phi_arithmetic(self, i: int, j: int) -> tuple:
        """Same set via the closed-form index arithmetic (cross-check path)."""
        self._check_pair(i, j)
        up = self.kappa_upper[i]
        block = self.k[i - 1] * up
        out = []
        for alpha in range(1, self.kappa_lower[i - 1] + 1):
            base = (alpha - 1) * block + (j - 1) * up
            out.extend(base + beta for beta in range(1, up + 1))
        return tuple(sorted(out))

    def xi(self, i: int, j: int) -> np.ndarray:
        """0/1 indicator row of length kappa over phi(i, j)."""
        row = np.zeros(self.kappa)
        row[[s - 1 for s in self.phi(i, j)]] = 1.0
        return row


def kappa_params(k) -> ProfileIndexer:
    return ProfileIndexer(tuple(k))


@dataclass(frozen=True)
class GameSpec:
    """A finite game: strategy counts plus one payoff row vector per player."""

    k: tuple
    payoffs: np.ndarray  # shape (n, kappa)
    labels: tuple | None = None

    def __post_init__(self):
        indexer = ProfileIndexer(tuple(self.k))
        object.__setattr__(self, "k", indexer.k)
        p = np.asarray(self.payoffs, dtype=float)
        if p.shape != (indexer.n, indexer.kappa):
            raise DimensionError(
                f"payoffs must be {indexer.n} x {indexer.kappa}, got {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise DomainError("payoff entries must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "payoffs", p)

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def indexer(self) -> ProfileIndexer:
        return ProfileIndexer(self.k)

    @property
    def kappa(self) -> int:
        return prod(self.k)

    def payoff_vector(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.n:
            raise DomainError(f"player {i} outside 1..{self.n}")
        return self.payoffs[i - 1]

    def to_json(self) -> dict:
        doc = {
            "players": self.n,
            "strategy_counts": list(self.k),
            "payoffs": [list(row) for row in self.payoffs],
        }
        if self.labels is not None:
            doc["labels"] = [list(names) for names in self.labels]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "GameSpec":
        for key in ("players", "strategy_counts", "payoffs"):
            if key not in doc:
                raise ValidationError(f"game file missing required field '{key}'")
        k = doc["strategy_counts"]
        if int(doc["players"]) != len(k):
            raise DomainError(
                f"players = {doc['players']} but {len(k)} strategy counts given"
            )
        labels = doc.get("labels")
        if labels is not None:
            labels = tuple(tuple(names) for names in labels)
        return cls(k=tuple(k), payoffs=np.array(doc["payoffs"], dtype=float),
                   labels=labels)

    @classmethod
    def load(cls, path) -> "GameSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


def payoff_eval(game: GameSpec, i: int, x, tol: float = DEFAULT_TOL) -> float:
    """Expected payoff V_i . x of player i under profile distribution x."""
    v = game.payoff_vector(i)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != game.kappa:
        raise DimensionError(
            f"distribution length {x.shape[0]} != kappa {game.kappa}"
        )
    if np.any(x < -tol) or abs(x.sum() - 1.0) > max(tol, 1e-6):
        raise DomainError("x is not a profile distribution")
    return float(v @ x)
