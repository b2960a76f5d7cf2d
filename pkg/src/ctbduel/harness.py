"""Duel loop, weak-regret accounting, replications, and the regret-bound checks."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .arms import Instance, PreferenceOracle, generate_instance
from .baselines import RucbPolicy, WsPolicy
from .bayes import ThompsonPolicy
from .cells import CellTable, enumerate_cells
from .ctb import CTBPolicy
from .errors import AggregationError, ConfigurationError, DegenerateCandidateError, DomainError, InvalidPairError
from .fast import FastCTBPolicy, load_prior_matrix

REGRET_MODES = ("binary-weak", "utility-weak")
WORKERS_ENV = "CTBDUEL_WORKERS"


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key), reproducible in isolation."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass
class RegretSeries:
    """One replication's duels. Arms are in the oracle's labels (0 = best)."""

    first: np.ndarray
    second: np.ndarray
    outcome: np.ndarray
    instant: np.ndarray
    mode: str

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.instant)

    @property
    def horizon(self) -> int:
        return len(self.instant)


def weak_regret(oracle: PreferenceOracle, first: int, second: int, mode: str) -> float:
    best = oracle.best_arm
    if mode == "binary-weak":
        return 0.0 if best in (first, second) else 1.0
    u = oracle.utilities
    if u is None:
        raise ConfigurationError("utility-weak regret needs oracle utilities")
    return float(u[best] - max(u[first], u[second]))


def run_replication(policy, oracle: PreferenceOracle, horizon: int, regret_mode: str = "binary-weak", seed=0, labels=None) -> RegretSeries:
    """Run ``horizon`` duels of ``policy`` against ``oracle``.

    ``labels[k]`` is the oracle arm that the policy knows as arm k (identity
    by default). Outcomes draw from a generator built from ``seed``.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be at least 1")
    if regret_mode not in REGRET_MODES:
        raise ConfigurationError(f"unknown regret mode {regret_mode!r}")
    rng = as_generator(seed)
    labels = np.arange(oracle.n_arms) if labels is None else np.asarray(labels)
    first = np.empty(horizon, dtype=np.int64)
    second = np.empty(horizon, dtype=np.int64)
    outcome = np.empty(horizon, dtype=np.int64)
    instant = np.empty(horizon)
    for t in range(1, horizon + 1):
        try:
            a, b = policy.select(t)
        except DegenerateCandidateError as err:
            raise DegenerateCandidateError(f"t={t}: {err}", arm=err.arm) from err
        if a == b:
            raise InvalidPairError(f"t={t}: policy paired arm {a} with itself")
        ea, eb = int(labels[a]), int(labels[b])
        y = oracle.sample_winner(ea, eb, rng)
        policy.update(a, b, y)
        first[t - 1], second[t - 1], outcome[t - 1] = ea, eb, y
        instant[t - 1] = weak_regret(oracle, ea, eb, regret_mode)
    return RegretSeries(first, second, outcome, instant, regret_mode)


@dataclass
class CheckpointStats:
    t: int
    mean: float
    stderr: float
    n: int


def aggregate(series, checkpoints) -> list:
    """Mean and standard error of cumulative regret at each checkpoint."""
    series = list(series)
    if not series:
        raise AggregationError("nothing to aggregate")
    horizons = {s.horizon for s in series}
    if len(horizons) != 1:
        raise AggregationError(f"mixed horizons: {sorted(horizons)}")
    cum = np.array([s.cumulative for s in series])
    out = []
    for t in checkpoints:
        if not 1 <= t <= cum.shape[1]:
            raise AggregationError(f"checkpoint {t} outside [1, {cum.shape[1]}]")
        col = cum[:, t - 1]
        se = float(col.std(ddof=1) / math.sqrt(len(col))) if len(col) > 1 else 0.0
        out.append(CheckpointStats(int(t), float(col.mean()), se, len(col)))
    return out


@dataclass(frozen=True)
class BoundInputs:
    n_arms: int
    m_prime: int
    p: float
    delta: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        if not 0.5 < self.p <= 1.0:
            raise DomainError(f"p must lie in (0.5, 1], got {self.p}")
        if self.delta > 0:
            raise DomainError(f"delta must be <= 0, got {self.delta}")
        if self.lam <= 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.n_arms < 2 or self.m_prime < 1:
            raise DomainError("need n_arms >= 2 and m_prime >= 1")


def theorem1_bound(inputs: BoundInputs) -> float:
    """(N-1)(N-2)/2 * M' * (p - delta (2p - 1)) / (2p - 1)^2 * lambda."""
    n, p = inputs.n_arms, inputs.p
    per_pair = (p - inputs.delta * (2 * p - 1)) / (2 * p - 1) ** 2
    return (n - 1) * (n - 2) / 2 * inputs.m_prime * per_pair * inputs.lam


def bound_inputs_for(instance: Instance, table: CellTable, init, regret_mode: str = "binary-weak") -> BoundInputs:
    """Bound inputs for CTB with initial scores ``init`` on an oracle-labelled table.

    delta is taken over the finite-score cells only.
    """
    init = np.asarray(init, dtype=float)
    true_row = table.find(np.zeros(table.bits.shape[1], dtype=np.uint8))
    if true_row is None or not np.isfinite(init[true_row]):
        raise DomainError("the true cell must be tabled with a finite initial score")
    finite = np.isfinite(init)
    delta = float(np.min(init[true_row] - init[finite]))
    if regret_mode == "binary-weak":
        lam = 1.0
    else:
        u = instance.utilities
        lam = float(u.max() - u.min())
    return BoundInputs(instance.n_arms, int(finite.sum()), instance.oracle.p, min(delta, 0.0), lam)


def lemma1_closed_form(p: float, level: int) -> float:
    """Expected number of times t >= 0 with Z(t) <= level, for a +/-1 walk rising w.p. p."""
    if not 0.5 < p <= 1.0:
        raise DomainError(f"p must lie in (0.5, 1], got {p}")
    return (p + level * (2 * p - 1)) / (2 * p - 1) ** 2


@dataclass
class Lemma1Check:
    p: float
    level: int
    estimate: float
    stderr: float
    closed_form: float

    @property
    def z(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == self.closed_form else math.inf
        return (self.estimate - self.closed_form) / self.stderr


def lemma1_mc_levels(p: float, max_level: int, walks: int = 100_000, horizon: int = 10_000, seed: int = 0) -> list:
    """Monte Carlo occupation estimates for every level 0..max_level from one set of walks."""
    if not 0.5 < p <= 1.0:
        raise DomainError(f"p must lie in (0.5, 1], got {p}")
    if max_level < 0 or walks < 2 or horizon < 1:
        raise DomainError("need max_level >= 0, walks >= 2 and horizon >= 1")
    counts = kernels.occupation_counts(p, max_level, walks, horizon, np.random.PCG64(seed))
    mean = counts.mean(axis=0)
    se = counts.std(axis=0, ddof=1) / math.sqrt(walks)
    return [Lemma1Check(p, s, float(mean[s]), float(se[s]), lemma1_closed_form(p, s)) for s in range(max_level + 1)]


def lemma1_mc_check(p: float, level: int, walks: int = 100_000, horizon: int = 10_000, seed: int = 0) -> Lemma1Check:
    return lemma1_mc_levels(p, level, walks, horizon, seed)[level]


# --- experiment replications -------------------------------------------------


def policy_table(features, rng) -> CellTable:
    """Candidate cells a policy builds from the arm features it sees."""
    from .arms import ArmSet

    arms = ArmSet(features)
    if arms.dim == 2:
        return enumerate_cells(arms, backend="angular-sweep")
    return enumerate_cells(arms, backend="permutation-lp", rng=rng)


def build_policy(alg, features, rng, table_fn, prior_matrix=None):
    """Instantiate the policy described by an ``AlgorithmSpec``.

    ``table_fn`` returns the shared cell table (built lazily, once per replication).
    """
    n = len(features)
    if alg.id == "ctb-1":
        return CTBPolicy(table_fn(), "ctb-1")
    if alg.id == "ctb-2":
        return FastCTBPolicy(n, prior_matrix)
    if alg.id == "ctb-3":
        return CTBPolicy(table_fn(), "ctb-3", q=alg.q)
    if alg.id == "thompson":
        if alg.likelihood == "bradley-terry":
            return ThompsonPolicy(table_fn(), rng, "bradley-terry", features=features)
        return ThompsonPolicy(table_fn(), rng, "constant", q=alg.q)
    if alg.id == "rucb":
        return RucbPolicy(n, rng, alpha=alg.alpha)
    if alg.id == "ws-w":
        return WsPolicy(n, rng)
    raise ConfigurationError(f"unknown algorithm {alg.id!r}")


def replicate(config, r: int) -> list:
    """Replication ``r`` of every algorithm in ``config``, on one shared instance.

    All algorithms face the same instance, the same arm presentation order
    and the same outcome stream.
    """
    instance = generate_instance(config.instance, stream(config.seed, r, 0))
    order = stream(config.seed, r, 1).permutation(instance.n_arms)
    features = instance.arms.features[order]
    cache = {}

    def table_fn():
        if "table" not in cache:
            cache["table"] = policy_table(features, stream(config.seed, r, 4))
        return cache["table"]

    out = []
    for a, alg in enumerate(config.algorithms):
        priors = None
        if alg.prior_matrix is not None:
            mat = load_prior_matrix(alg.prior_matrix)
            if mat.shape[0] != instance.n_arms:
                raise ConfigurationError(f"algorithms[{a}].prior_matrix: expected {instance.n_arms} arms")
            priors = mat[np.ix_(order, order)]
        policy = build_policy(alg, features, stream(config.seed, r, 3, a), table_fn, priors)
        out.append(run_replication(policy, instance.oracle, config.horizon, config.regret_mode, stream(config.seed, r, 2), labels=order))
    return out


def _replicate_packed(args):
    return replicate(*args)


def worker_count(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def iter_replications(config, workers: Optional[int] = None):
    """Yield (r, per-algorithm series) in replication order."""
    workers = worker_count(workers)
    jobs = [(config, r) for r in range(config.replications)]
    if workers == 1:
        for r, job in enumerate(jobs):
            yield r, _replicate_packed(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from enumerate(pool.map(_replicate_packed, jobs))


def run_experiment(config, workers: Optional[int] = None) -> dict:
    """All replications, as {algorithm id: [RegretSeries, ...]}."""
    results = {alg.id: [] for alg in config.algorithms}
    for _, per_alg in iter_replications(config, workers):
        for alg, series in zip(config.algorithms, per_alg):
            results[alg.id].append(series)
    return results
