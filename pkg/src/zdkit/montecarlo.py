"""Monte-Carlo simulation of the profile chain, independent of the eigen-solver.

The chain is sampled state by state from the columns of the transition
matrix with a seeded generator (numpy PCG64), so runs are reproducible from
(seed, inputs) alone.  The first tenth of each run is discarded as burn-in
before empirical statistics are taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .games import GameSpec
from .markov import _matrix_of


@dataclass(frozen=True)
class Trajectory:
    seed: int
    length: int
    states: np.ndarray  # visited profile indices (1-based), post burn-in
    empirical: np.ndarray  # distribution over 1..kappa
    expected_payoffs: tuple | None  # per player, if a game was supplied

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "T": self.length,
            "empirical": list(self.empirical),
            "expected_payoffs": None if self.expected_payoffs is None
            else list(self.expected_payoffs),
        }


def simulate(L, x0: int, steps: int, seed: int,
             game: GameSpec | None = None,
             burn_in: int | None = None) -> Trajectory:
    """Sample a trajectory of the profile chain starting from profile x0."""
    m = _matrix_of(L)
    kappa = m.shape[0]
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if not 1 <= x0 <= kappa:
        raise DomainError(f"initial profile {x0} outside 1..{kappa}")
    sums = m.sum(axis=0)
    if np.any(m < -1e-12) or np.any(np.abs(sums - 1.0) > 1e-9):
        bad = int(np.argmax(np.abs(sums - 1.0))) + 1
        raise ValidationError(f"column {bad} of L is not a probability distribution")
    if burn_in is None:
        burn_in = steps // 10

    cum = np.cumsum(m, axis=0)
    cum[-1, :] = 1.0  # guard against rounding in the last bin
    rng = np.random.default_rng(seed)
    draws = rng.random(steps)
    states = np.empty(steps, dtype=np.int64)
    s = x0 - 1
    for t in range(steps):
        s = int(np.searchsorted(cum[:, s], draws[t], side="right"))
        states[t] = s
    kept = states[burn_in:]
    counts = np.bincount(kept, minlength=kappa)
    empirical = counts / counts.sum()
    payoffs = None
    if game is not None:
        payoffs = tuple(float(v) for v in game.payoffs @ empirical)
    return Trajectory(seed=seed, length=steps, states=kept + 1,
                      empirical=empirical, expected_payoffs=payoffs)


def compare_empirical_vs_exact(traj: Trajectory, u, payoff_vectors=None,
                               z: float = 3.0) -> dict:
    """Per-profile and per-player deviations of a trajectory from the exact chain.

    Profile deviations are judged against z binomial standard errors at the
    effective sample size; payoff gaps are reported both absolute and
    relative to the exact value.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != traj.empirical.shape[0]:
        raise DomainError(
            f"exact distribution has {u.shape[0]} entries, trajectory has "
            f"{traj.empirical.shape[0]}"
        )
    n = traj.states.shape[0]
    dev = traj.empirical - u
    sigma = np.sqrt(np.maximum(u * (1.0 - u), 1e-300) / n)
    within = np.abs(dev) <= z * sigma
    report = {
        "T": traj.length,
        "seed": traj.seed,
        "empirical": list(traj.empirical),
        "exact": list(u),
        "profile_deviation": list(dev),
        "z_threshold": z,
        "pass": bool(within.all()),
    }
    if payoff_vectors is not None:
        V = np.asarray(payoff_vectors, dtype=float)
        exact_pay = V @ u
        emp_pay = V @ traj.empirical
        gaps = emp_pay - exact_pay
        report["payoff_gaps"] = list(gaps)
        report["payoff_relative_gaps"] = [
            float(abs(g) / max(abs(e), 1e-300)) for g, e in zip(gaps, exact_pay)
        ]
    return report
