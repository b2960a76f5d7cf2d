"""Comparing The Best with an explicit score per candidate cell.

Scores are kept as an integer increment count plus a real offset (the
initial score, possibly -inf), so that the increments stay exact.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .bayes import prior_to_scores
from .cells import CellTable
from .errors import ConfigurationError, DegenerateCandidateError, InvalidPairError

VARIANTS = ("ctb-1", "ctb-2-explicit", "ctb-3")


class ScoreTable:
    """Per-cell scores m_i(t) = init[i] + inc[i] after t duels."""

    def __init__(self, init):
        self.init = np.array(init, dtype=np.float64)
        self.inc = np.zeros(len(self.init), dtype=np.int64)
        self.t = 0

    @property
    def scores(self) -> np.ndarray:
        return self.init + self.inc

    def copy(self) -> "ScoreTable":
        other = ScoreTable(self.init)
        other.inc = self.inc.copy()
        other.t = self.t
        return other


def init_scores(table: CellTable, variant: str = "ctb-1", prior=None, q=None) -> ScoreTable:
    """Initial scores for a CTB variant.

    ctb-1 and ctb-2-explicit start every tabled cell at 0 (they differ only
    in which table they are given); ctb-3 maps prior cell masses to scores
    with ``prior_to_scores``.
    """
    if variant in ("ctb-1", "ctb-2-explicit"):
        return ScoreTable(np.zeros(len(table)))
    if variant == "ctb-3":
        if q is None:
            raise ConfigurationError("ctb-3 needs q")
        masses = table.prior if prior is None else np.asarray(prior, dtype=float)
        return ScoreTable(prior_to_scores(masses, q))
    raise ConfigurationError(f"unknown CTB variant {variant!r}; expected one of {VARIANTS}")


def select_arms(scores: ScoreTable, table: CellTable):
    """Best arm of the top cell, then best arm of the top cell disagreeing with it.

    Ties between cells of equal score go to the cell whose best arm has the
    smaller index. Raises DegenerateCandidateError when no finite cell names
    a second best arm.
    """
    first, second = kernels.ctb_select(scores.scores, table.best, table.n_arms)
    if first < 0:
        raise DegenerateCandidateError("no cell has a finite score")
    if second < 0:
        raise DegenerateCandidateError(f"every finite cell names arm {first} as best", arm=first)
    return first, second


def update(scores: ScoreTable, table: CellTable, first: int, second: int, outcome: int) -> ScoreTable:
    """Credit every cell inside the winner's winning space; mutates and returns ``scores``."""
    if first == second:
        raise InvalidPairError(f"arm {first} cannot duel itself")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    winner, loser = (first, second) if outcome == 0 else (second, first)
    kernels.ctb_update(scores.inc, table.column(winner, loser), 0 if winner < loser else 1)
    scores.t += 1
    return scores


def replay_scores(init, table: CellTable, history) -> np.ndarray:
    """Recompute m_i(t) from a duel history [(first, second, outcome), ...]."""
    inc = np.zeros(len(table), dtype=np.int64)
    for first, second, outcome in history:
        winner, loser = (first, second) if outcome == 0 else (second, first)
        inc += table.winner_side(winner, loser)
    return np.asarray(init, dtype=float) + inc


class CTBPolicy:
    """Explicit-table CTB as a harness policy.

    When every finite cell agrees on the best arm, that arm is dueled
    against the runner-up of the top-scoring cell.
    """

    def __init__(self, table: CellTable, variant: str = "ctb-1", q=None, prior=None):
        self.table = table
        self.variant = variant
        self.state = init_scores(table, variant, prior=prior, q=q)

    def select(self, t: int):
        try:
            return select_arms(self.state, self.table)
        except DegenerateCandidateError as err:
            if err.arm is None:
                raise
            scores = self.state.scores
            top = int(np.argmax(scores))
            return err.arm, int(self.table.second[top])

    def update(self, first: int, second: int, outcome: int) -> None:
        update(self.state, self.table, first, second, outcome)
