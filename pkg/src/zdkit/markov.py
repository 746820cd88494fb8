"""Strategy update rules, the profile transition matrix, and its Markov analysis.

Each player's memory-one rule is a column-stochastic k_i x kappa matrix whose
column r is the distribution of the player's next strategy given that the
current joint profile is r.  Multiplying all rules together (column-wise
Kronecker / Khatri-Rao) yields the kappa x kappa transition matrix L of the
profile chain x(t+1) = L x(t).  The analysis side provides primitivity with a
witness exponent, the stationary distribution, the rank defect of L - I, the
adjugate for validation, and power limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import (
    AnalysisError,
    CapacityError,
    DimensionError,
    DomainError,
    ValidationError,
)
from .stp import DEFAULT_TOL, khatri_rao

# strict-positivity threshold for primitivity checks
POSITIVITY_TOL = 1e-12


@dataclass(frozen=True)
class StrategyRule:
    """Memory-one mixed rule of one player: k_i x kappa, column-stochastic."""

    player: int
    matrix: np.ndarray

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def kappa(self) -> int:
        return self.matrix.shape[1]


def build_rule(player: int, probs, tol: float = DEFAULT_TOL) -> StrategyRule:
    """Validate a probability table (rows = strategies, cols = profiles)."""
    m = np.asarray(probs, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2:
        raise DimensionError(f"rule must be a 2-D matrix with >= 2 rows, got {m.shape}")
    if np.any(m < -tol) or np.any(m > 1 + tol):
        bad = int(np.argwhere((m < -tol) | (m > 1 + tol))[0][1]) + 1
        raise ValidationError(
            f"player {player} rule has probabilities outside [0,1] at profile {bad}"
        )
    sums = m.sum(axis=0)
    off = np.abs(sums - 1.0) > tol
    if np.any(off):
        r = int(np.argwhere(off)[0][0]) + 1
        raise ValidationError(
            f"player {player} rule column for profile {r} sums to {sums[r - 1]:.6g}, not 1"
        )
    m = m.copy()
    m.setflags(write=False)
    return StrategyRule(player=player, matrix=m)


@dataclass(frozen=True)
class TransitionMatrix:
    """The profile-chain transition matrix and the rules it came from."""

    matrix: np.ndarray
    provenance: tuple = ()

    @property
    def kappa(self) -> int:
        return self.matrix.shape[0]


def build_pee(rules) -> TransitionMatrix:
    """Khatri-Rao product of all players' rules, in player order."""
    rules = list(rules)
    if not rules:
        raise DimensionError("need at least one rule")
    kappa = rules[0].matrix.shape[1]
    for r in rules:
        if r.matrix.shape[1] != kappa:
            raise DimensionError(
                f"rule of player {r.player} has {r.matrix.shape[1]} profile "
                f"columns, expected {kappa}"
            )
    L = reduce(khatri_rao, (r.matrix for r in rules))
    if L.shape != (kappa, kappa):
        raise DimensionError(
            f"rules yield a {L.shape} matrix; strategy counts do not multiply "
            f"to the shared profile count {kappa}"
        )
    return TransitionMatrix(matrix=L, provenance=tuple(r.player for r in rules))


def _matrix_of(L) -> np.ndarray:
    if isinstance(L, TransitionMatrix):
        return L.matrix
    m = np.asarray(L, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_primitive(L, tol: float = POSITIVITY_TOL):
    """Whether some power of L is strictly positive; returns (flag, witness).

    Checks powers up to the Wielandt bound (kappa-1)^2 + 1 on the positivity
    pattern only, which is exact for nonnegative matrices.
    """
    m = _matrix_of(L)
    kappa = m.shape[0]
    pattern = m > tol
    bound = (kappa - 1) ** 2 + 1
    power = pattern.copy()
    for s in range(1, bound + 1):
        if power.all():
            return True, s
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return False, None


def nullspace_stationary(L) -> np.ndarray:
    """Fixed vector of L from the SVD null space of L - I, normalized to sum 1."""
    m = _matrix_of(L)
    kappa = m.shape[0]
    _, _, vt = np.linalg.svd(m - np.eye(kappa))
    u = vt[-1]
    total = u.sum()
    if abs(total) < 1e-12:
        raise AnalysisError("null-space vector has zero mass; defect likely > 1")
    return u / total


def power_iteration_stationary(L, tol: float = 1e-14, max_iter: int = 200000):
    """Fixed vector via repeated application of L (independent oracle)."""
    m = _matrix_of(L)
    x = np.full(m.shape[0], 1.0 / m.shape[0])
    for it in range(max_iter):
        y = m @ x
        y /= y.sum()
        if np.max(np.abs(y - x)) < tol:
            return y, it + 1
        x = y
    raise AnalysisError(f"power iteration did not converge in {max_iter} steps")


def stationary_distribution(L, tol: float = 1e-10) -> np.ndarray:
    """Unique positive stationary distribution of a primitive chain."""
    primitive, _ = is_primitive(L)
    if not primitive:
        raise AnalysisError("chain is not primitive; stationary vector not unique")
    u = nullspace_stationary(L)
    m = _matrix_of(L)
    if np.min(u) <= 0 or np.max(np.abs(m @ u - u)) > tol:
        raise AnalysisError("null-space solve failed the fixed-point check")
    return u


def rank_defect(L) -> int:
    """kappa minus the numerical rank of L - I (singular-value threshold)."""
    m = _matrix_of(L)
    kappa = m.shape[0]
    sv = np.linalg.svd(m - np.eye(kappa), compute_uv=False)
    thresh = kappa * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    return kappa - int(np.sum(sv > thresh))


def adjugate(M, cap: int = 64) -> np.ndarray:
    """Adjugate (transpose of the cofactor matrix) of a small dense matrix."""
    m = np.asarray(M, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"adjugate needs a square matrix, got {m.shape}")
    n = m.shape[0]
    if n > cap:
        raise CapacityError(
            f"adjugate cap is {cap} (got {n}); use rank_defect / "
            f"nullspace_stationary for large chains"
        )
    if n == 1:
        return np.array([[1.0]])
    cof = np.empty((n, n))
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = m[np.ix_(rows != i, rows != j)]
            cof[i, j] = (-1.0) ** (i + j) * np.linalg.det(minor)
    return cof.T


@dataclass(frozen=True)
class PowerLimit:
    converged: bool
    matrix: np.ndarray | None
    steps: int


def power_limit(L, max_t: int = 1 << 20, tol: float = 1e-12) -> PowerLimit:
    """Limit of L^t by repeated squaring, testing L^t ~ L^{t+1}.

    Comparing t against t+1 (rather than t against 2t) is what catches
    periodic chains, whose even powers alone can look convergent.
    """
    if max_t < 1:
        raise DomainError("max_t must be >= 1")
    m = _matrix_of(L)
    P = m.copy()
    t = 1
    with np.errstate(over="ignore", invalid="ignore"):
        while t <= max_t:
            if not np.all(np.isfinite(P)):
                break  # powers blow up (columns not true distributions)
            if np.max(np.abs(P @ m - P)) < tol:
                return PowerLimit(converged=True, matrix=P, steps=t)
            P = P @ P
            t *= 2
    return PowerLimit(converged=False, matrix=None, steps=t)


@dataclass(frozen=True)
class MarkovReport:
    """Summary of the chain analysis used by the design-verification pipeline."""

    primitive: bool
    witness_s: int | None
    rank_defect: int
    stationary: np.ndarray | None
    limit_converged: bool

    def to_json(self) -> dict:
        return {
            "primitive": self.primitive,
            "witness_s": self.witness_s,
            "rank_defect": self.rank_defect,
            "stationary": None if self.stationary is None else list(self.stationary),
            "limit_converged": self.limit_converged,
        }


def analyze(L, max_t: int = 1 << 20, tol: float = 1e-10) -> MarkovReport:
    primitive, witness = is_primitive(L)
    defect = rank_defect(L)
    limit = power_limit(L, max_t=max_t)
    u = stationary_distribution(L, tol=tol) if primitive else None
    return MarkovReport(
        primitive=primitive,
        witness_s=witness,
        rank_defect=defect,
        stationary=u,
        limit_converged=limit.converged,
    )
