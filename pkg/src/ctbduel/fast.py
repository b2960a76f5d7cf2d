"""CTB for decomposable initial scores, using pairwise win counts only.

When every cell's initial score is a sum of per-pair priors r[i, j] over
the winning spaces containing it, the best score among cells ranking arm k
first has a closed form, so selection costs O(N^2) per step regardless of
how many cells exist.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .cells import membership_of
from .errors import ConfigurationError, InvalidPairError


class PairState:
    """``wins[i, j]`` counts duels arm i won against arm j."""

    def __init__(self, n_arms: int, priors=None):
        if n_arms < 2:
            raise ConfigurationError("need at least 2 arms")
        self.wins = np.zeros((n_arms, n_arms), dtype=np.int64)
        if priors is None:
            priors = np.zeros((n_arms, n_arms))
        priors = np.array(priors, dtype=np.float64)
        if priors.shape != (n_arms, n_arms):
            raise ConfigurationError(f"prior matrix must be {n_arms}x{n_arms}, got {priors.shape}")
        np.fill_diagonal(priors, 0.0)
        self.priors = priors
        self.t = 0

    @property
    def n_arms(self) -> int:
        return self.wins.shape[0]

    def duels(self, i: int, j: int) -> int:
        return int(self.wins[i, j] + self.wins[j, i])


def record_duel(state: PairState, first: int, second: int, outcome: int) -> PairState:
    if first == second:
        raise InvalidPairError(f"arm {first} cannot duel itself")
    if outcome == 0:
        state.wins[first, second] += 1
    else:
        state.wins[second, first] += 1
    state.t += 1
    return state


def best_cell_values(state: PairState) -> np.ndarray:
    """f(k, t) for every arm k.

    f(k) = sum_j (q[k, j] + r[k, j])
           + sum over pairs {i, j} not containing k of max(q[i, j] + r[i, j], q[j, i] + r[j, i])
    """
    return kernels.ip_values(state.wins, state.priors)


def best_cell_value(state: PairState, k: int) -> float:
    return float(best_cell_values(state)[k])


def select_arms_fast(state: PairState):
    """argmax_k f(k), then argmax over the other arms; lowest index wins ties."""
    f = best_cell_values(state)
    first = int(np.argmax(f))
    f[first] = -np.inf
    return first, int(np.argmax(f))


def reconstruct_score(state: PairState, bits, m0: float = 0.0) -> float:
    """m0 plus the wins credited to the cell with sign vector ``bits``."""
    total = float(m0)
    for i, j in membership_of(bits, state.n_arms):
        total += state.wins[i, j]
    return total


def decomposed_init(bits, priors) -> float:
    """Initial score sum of r[i, j] over the cell's winning spaces."""
    priors = np.asarray(priors)
    return float(sum(priors[i, j] for i, j in membership_of(bits, priors.shape[0])))


def load_prior_matrix(path) -> np.ndarray:
    """Read a whitespace-separated N x N real matrix."""
    mat = np.loadtxt(path, dtype=float, ndmin=2)
    if mat.shape[0] != mat.shape[1]:
        raise ConfigurationError(f"prior matrix in {path} is not square: {mat.shape}")
    return mat


class FastCTBPolicy:
    """CTB-2 (or any decomposable-prior CTB) as a harness policy."""

    def __init__(self, n_arms: int, priors=None):
        self.state = PairState(n_arms, priors)

    def select(self, t: int):
        return select_arms_fast(self.state)

    def update(self, first: int, second: int, outcome: int) -> None:
        record_duel(self.state, first, second, outcome)
