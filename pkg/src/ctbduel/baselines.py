"""Baseline dueling-bandit policies: RUCB and Winner Stays (weak-regret variant).

Both only see duel outcomes. Ties are broken uniformly at random from the
policy's own seeded stream.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def _random_argmax(values, rng, exclude=None):
    values = np.asarray(values, dtype=float).copy()
    if exclude is not None:
        values[exclude] = -np.inf
    top = np.flatnonzero(values == values.max())
    return int(top[0]) if len(top) == 1 else int(rng.choice(top))


class RucbState:
    def __init__(self, n_arms: int, alpha: float = 0.51):
        if alpha <= 0.5:
            raise ConfigurationError(f"RUCB alpha must exceed 0.5, got {alpha}")
        self.wins = np.zeros((n_arms, n_arms), dtype=np.int64)
        self.alpha = alpha
        self.hypothesized_best: set = set()

    @property
    def n_arms(self) -> int:
        return self.wins.shape[0]


def rucb_upper(wins, alpha: float, t: int) -> np.ndarray:
    """Optimistic estimates u[i, j] of P(i beats j); 1 for unplayed pairs, 1/2 on the diagonal."""
    n = wins.shape[0]
    plays = wins + wins.T
    with np.errstate(divide="ignore", invalid="ignore"):
        u = wins / plays + np.sqrt(alpha * np.log(t) / plays)
    u[plays == 0] = 1.0
    u[np.diag_indices(n)] = 0.5
    return u


def rucb_step(state: RucbState, t: int, rng: np.random.Generator):
    """One RUCB arm choice at time t >= 1.

    Candidates are arms whose upper bound against every other arm is at
    least 1/2. The champion is drawn from them, with probability 1/2 on a
    surviving hypothesized-best arm; the challenger maximizes the upper
    bound of beating the champion over the remaining arms.
    """
    n = state.n_arms
    u = rucb_upper(state.wins, state.alpha, t)
    cands = np.flatnonzero(np.all(u >= 0.5, axis=1))
    if len(cands) == 0:
        first = int(rng.integers(n))
    else:
        state.hypothesized_best &= set(cands.tolist())
        if len(cands) == 1:
            state.hypothesized_best = {int(cands[0])}
            first = int(cands[0])
        else:
            best = sorted(state.hypothesized_best)
            others = [int(c) for c in cands if int(c) not in state.hypothesized_best]
            if best and (not others or rng.random() < 0.5):
                first = best[0]
            else:
                first = int(rng.choice(others))
    second = _random_argmax(u[:, first], rng, exclude=first)
    return first, second


class RucbPolicy:
    def __init__(self, n_arms: int, rng, alpha: float = 0.51):
        self.state = RucbState(n_arms, alpha)
        self.rng = rng

    def select(self, t: int):
        return rucb_step(self.state, t, self.rng)

    def update(self, first: int, second: int, outcome: int) -> None:
        winner, loser = (first, second) if outcome == 0 else (second, first)
        self.state.wins[winner, loser] += 1


class WsState:
    """Per-arm wins-minus-losses and the previous duel's winner."""

    def __init__(self, n_arms: int):
        self.scores = np.zeros(n_arms, dtype=np.int64)
        self.incumbent = None

    @property
    def n_arms(self) -> int:
        return len(self.scores)


def ws_step(state: WsState, rng: np.random.Generator):
    first = state.incumbent if state.incumbent is not None else int(rng.integers(state.n_arms))
    second = _random_argmax(state.scores, rng, exclude=first)
    return first, second


def ws_record(state: WsState, first: int, second: int, outcome: int) -> WsState:
    winner, loser = (first, second) if outcome == 0 else (second, first)
    state.scores[winner] += 1
    state.scores[loser] -= 1
    state.incumbent = winner
    return state


class WsPolicy:
    def __init__(self, n_arms: int, rng):
        self.state = WsState(n_arms)
        self.rng = rng

    def select(self, t: int):
        return ws_step(self.state, self.rng)

    def update(self, first: int, second: int, outcome: int) -> None:
        ws_record(self.state, first, second, outcome)
