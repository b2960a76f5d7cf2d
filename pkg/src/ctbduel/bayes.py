"""Cell-level posterior under a constant-correctness likelihood, and Thompson sampling."""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logsumexp

from .cells import CellTable
from .errors import ConfigurationError, RenormalizationError


def _check_q(q):
    if not 0.5 < q < 1.0:
        raise ConfigurationError(f"q must lie in (0.5, 1), got {q}")


def prior_to_scores(prior, q: float) -> np.ndarray:
    """Initial CTB scores log p0 / log(q / (1 - q)); zero mass maps to -inf.

    Adding the per-cell win counts to these scores orders cells exactly as
    the posterior masses do.
    """
    _check_q(q)
    prior = np.asarray(prior, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(prior) / np.log(q / (1.0 - q))


class CellPosterior:
    """Posterior masses over the cells of a table.

    ``inc`` counts, per cell, how many duels were won by a winning space
    containing the cell (m_i(t) - m_i(0) in score terms).
    """

    def __init__(self, prior, q=None):
        if q is not None:
            _check_q(q)
        prior = np.array(prior, dtype=float)
        total = prior.sum()
        if total <= 0:
            raise RenormalizationError("prior has no mass")
        self.prior = prior / total
        self.masses = self.prior.copy()
        self.q = q
        self.t = 0
        self.inc = np.zeros(len(prior), dtype=np.int64)


def constant_likelihoods(table: CellTable, winner: int, loser: int, q: float) -> np.ndarray:
    side = table.winner_side(winner, loser)
    return np.where(side, q, 1.0 - q)


def bradley_terry_likelihoods(table: CellTable, features, winner: int, loser: int) -> np.ndarray:
    """Probability that ``winner`` beats ``loser`` with theta at each cell's representative."""
    if table.representatives is None:
        raise ConfigurationError("Bradley-Terry likelihoods need cell representatives")
    diff = np.asarray(features[winner]) - np.asarray(features[loser])
    return expit(table.representatives @ diff)


def update_posterior(post: CellPosterior, table: CellTable, first: int, second: int, outcome: int, likelihoods=None) -> CellPosterior:
    """Multiply masses by the likelihood of the observed winner and renormalize.

    Without ``likelihoods`` the constant-q model is used: q for cells on
    the winner's side, 1 - q elsewhere.
    """
    winner, loser = (first, second) if outcome == 0 else (second, first)
    side = table.winner_side(winner, loser)
    if likelihoods is None:
        if post.q is None:
            raise ConfigurationError("constant-q update needs q")
        likelihoods = np.where(side, post.q, 1.0 - post.q)
    new = post.masses * likelihoods
    total = new.sum()
    if not total > 0:
        raise RenormalizationError("posterior mass underflowed to zero")
    post.masses = new / total
    post.inc += side
    post.t += 1
    return post


def posterior_closed_form(prior, q: float, t: int, inc) -> np.ndarray:
    """Normalized p0 * q**inc * (1 - q)**(t - inc), computed in log space."""
    prior = np.asarray(prior, dtype=float)
    inc = np.asarray(inc)
    if np.any(inc > t) or np.any(inc < 0):
        raise ValueError("increment counts must lie in [0, t]")
    with np.errstate(divide="ignore"):
        logw = np.log(prior) + inc * np.log(q) + (t - inc) * np.log1p(-q)
    if np.all(logw == -np.inf):
        raise RenormalizationError("prior has no mass")
    return np.exp(logw - logsumexp(logw))


def thompson_step(post: CellPosterior, table: CellTable, rng: np.random.Generator):
    """Sample a cell by posterior mass; return its best and second-best arms."""
    cdf = np.cumsum(post.masses)
    row = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    row = min(row, len(cdf) - 1)
    return int(table.best[row]), int(table.second[row])


class ThompsonPolicy:
    """Thompson sampling over cells.

    ``likelihood="constant"`` uses q for the winning side and 1 - q
    otherwise; ``"bradley-terry"`` evaluates the logistic win probability at
    each cell's representative point.
    """

    def __init__(self, table: CellTable, rng, likelihood: str = "constant", q: float = 0.8, features=None, prior=None):
        if likelihood not in ("constant", "bradley-terry"):
            raise ConfigurationError(f"unknown likelihood {likelihood!r}")
        if likelihood == "bradley-terry" and features is None:
            raise ConfigurationError("Bradley-Terry likelihood needs arm features")
        self.table = table
        self.rng = rng
        self.likelihood = likelihood
        self.features = None if features is None else np.asarray(features, dtype=float)
        self.post = CellPosterior(table.prior if prior is None else prior, q if likelihood == "constant" else None)

    def select(self, t: int):
        return thompson_step(self.post, self.table, self.rng)

    def update(self, first: int, second: int, outcome: int) -> None:
        lik = None
        if self.likelihood == "bradley-terry":
            winner, loser = (first, second) if outcome == 0 else (second, first)
            lik = bradley_terry_likelihoods(self.table, self.features, winner, loser)
        update_posterior(self.post, self.table, first, second, outcome, lik)
