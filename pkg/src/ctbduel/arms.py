"""Arms, utilities, preference oracles and problem-instance generation.

Arm indices are 0-based throughout the Python API. Generated instances are
relabeled so that arm 0 has the highest utility, arm 1 the next, and so on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, ndtr

from .errors import ConfigurationError, InvalidPairError

# minimum pairwise utility gap accepted at construction
UTILITY_GAP = 1e-12

ORACLE_KINDS = ("constant-p", "bradley-terry", "probit", "explicit-matrix")
SETTINGS = ("setting-1", "setting-2", "custom")


def linear_utility(theta, arm):
    return float(np.dot(theta, arm))


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ArmSet:
    """N >= 2 arms with pairwise-distinct d-dimensional feature vectors."""

    features: np.ndarray

    def __post_init__(self):
        feats = _frozen(self.features)
        if feats.ndim != 2:
            raise ConfigurationError("features must be an (N, d) array")
        if feats.shape[0] < 2:
            raise ConfigurationError(f"need at least 2 arms, got {feats.shape[0]}")
        if np.unique(feats, axis=0).shape[0] != feats.shape[0]:
            raise ConfigurationError("arm feature vectors must be pairwise distinct")
        object.__setattr__(self, "features", feats)

    @property
    def n_arms(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def permuted(self, order) -> "ArmSet":
        """Arm set whose k-th arm is arm ``order[k]`` of this one."""
        return ArmSet(self.features[np.asarray(order)])


@dataclass(frozen=True, eq=False)
class UtilityModel:
    """Preference vector theta plus a utility function u(theta, arm).

    ``func=None`` means the linear utility theta . arm.
    """

    theta: np.ndarray
    func: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(np.atleast_1d(self.theta)))

    @property
    def kind(self) -> str:
        return "linear" if self.func is None else "custom"

    def __call__(self, arm) -> float:
        return utility(self, arm)

    def utilities(self, arms: ArmSet) -> np.ndarray:
        if self.func is None:
            _check_dims(self.theta, arms.features[0])
            return arms.features @ self.theta
        return np.array([float(self.func(self.theta, a)) for a in arms.features])


def _check_dims(theta, arm):
    if np.shape(theta) != np.shape(arm):
        raise ConfigurationError(
            f"dimension mismatch: theta has shape {np.shape(theta)}, arm has {np.shape(arm)}"
        )


def utility(model: UtilityModel, arm) -> float:
    arm = np.asarray(arm, dtype=float)
    if model.func is None:
        _check_dims(model.theta, arm)
        return linear_utility(model.theta, arm)
    return float(model.func(model.theta, arm))


def utilities_at(point, features, func=None) -> np.ndarray:
    """Utilities of every arm when the preference vector is ``point``."""
    point = np.asarray(point, dtype=float)
    if func is None:
        _check_dims(point, features[0])
        return np.asarray(features) @ point
    return np.array([float(func(point, a)) for a in features])


def bradley_terry_prob(u_i, u_j) -> float:
    """exp(u_i) / (exp(u_i) + exp(u_j)), evaluated stably."""
    return float(expit(u_i - u_j))


def probit_prob(u_i, u_j) -> float:
    return float(ndtr(u_i - u_j))


def _mirrored(upper_fn, n):
    """Build a win matrix from a function giving p_ij for i < j.

    The entry >= 0.5 is stored as computed and its partner as 1 - x, which
    is exact for x in [0.5, 1], so p_ij + p_ji == 1 holds bitwise.
    """
    mat = np.full((n, n), 0.5)
    for i in range(n):
        for j in range(i + 1, n):
            x = upper_fn(i, j)
            if x >= 0.5:
                mat[i, j], mat[j, i] = x, 1.0 - x
            else:
                y = 1.0 - x
                mat[j, i], mat[i, j] = y, 1.0 - y
    return mat


@dataclass(frozen=True, eq=False)
class PreferenceOracle:
    """The simulated environment: true win probabilities p_ij.

    ``matrix[i, j]`` is the probability that arm i beats arm j. When
    ``utilities`` is given, the matrix is checked for consistency with the
    total order they induce.
    """

    kind: str
    matrix: np.ndarray
    utilities: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ORACLE_KINDS:
            raise ConfigurationError(f"unknown oracle kind {self.kind!r}")
        mat = np.array(self.matrix, dtype=float)
        n = mat.shape[0]
        if mat.ndim != 2 or mat.shape != (n, n) or n < 2:
            raise ConfigurationError("win matrix must be square with N >= 2")
        off = ~np.eye(n, dtype=bool)
        if np.any((mat[off] < 0) | (mat[off] > 1)):
            raise ConfigurationError("win probabilities must lie in [0, 1]")
        if np.max(np.abs(mat + mat.T - 1)[off]) > 1e-12:
            raise ConfigurationError("win matrix violates p_ij + p_ji = 1")
        mat = _mirrored(lambda i, j: mat[i, j], n)
        if np.any(mat[off] == 0.5):
            i, j = np.argwhere((mat == 0.5) & off)[0]
            raise ConfigurationError(f"p[{i},{j}] = 0.5: arms are not strictly ordered")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if self.utilities is not None:
            u = _frozen(self.utilities)
            if u.shape != (n,):
                raise ConfigurationError("one utility per arm required")
            object.__setattr__(self, "utilities", u)
            check_order_consistency(mat, u)

    @classmethod
    def constant(cls, utilities, p: float) -> "PreferenceOracle":
        """The better arm of every pair wins with probability ``p``."""
        if not 0.5 < p <= 1.0:
            raise ConfigurationError(f"constant-p oracle needs p in (0.5, 1], got {p}")
        u = np.asarray(utilities, dtype=float)
        mat = _mirrored(lambda i, j: p if u[i] > u[j] else 1.0 - p, len(u))
        return cls("constant-p", mat, u, {"p": p})

    @classmethod
    def bradley_terry(cls, utilities) -> "PreferenceOracle":
        u = np.asarray(utilities, dtype=float)
        mat = _mirrored(lambda i, j: bradley_terry_prob(u[i], u[j]), len(u))
        return cls("bradley-terry", mat, u)

    @classmethod
    def probit(cls, utilities) -> "PreferenceOracle":
        u = np.asarray(utilities, dtype=float)
        mat = _mirrored(lambda i, j: probit_prob(u[i], u[j]), len(u))
        return cls("probit", mat, u)

    @classmethod
    def explicit(cls, matrix, utilities=None) -> "PreferenceOracle":
        return cls("explicit-matrix", matrix, utilities)

    @property
    def n_arms(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> float:
        """min over pairs of max(p_ij, p_ji); above 0.5 by construction."""
        iu = np.triu_indices(self.n_arms, 1)
        return float(np.min(np.maximum(self.matrix[iu], self.matrix.T[iu])))

    @property
    def best_arm(self) -> int:
        """The arm that beats every other arm with probability > 0.5."""
        wins = (self.matrix > 0.5).sum(axis=1)
        return int(np.argmax(wins))

    def win_prob(self, i: int, j: int) -> float:
        if i == j:
            raise InvalidPairError(f"arm {i} cannot duel itself")
        return float(self.matrix[i, j])

    def sample_winner(self, first: int, second: int, rng: np.random.Generator) -> int:
        """Return 0 if ``first`` wins, 1 if ``second`` wins; uses one uniform draw."""
        p = self.win_prob(first, second)
        return 0 if rng.random() < p else 1

    def permuted(self, order) -> "PreferenceOracle":
        order = np.asarray(order)
        u = None if self.utilities is None else self.utilities[order]
        return PreferenceOracle(self.kind, self.matrix[np.ix_(order, order)], u, dict(self.params))


def true_win_prob(oracle: PreferenceOracle, i: int, j: int) -> float:
    return oracle.win_prob(i, j)


def sample_winner(oracle: PreferenceOracle, first: int, second: int, rng) -> int:
    return oracle.sample_winner(first, second, rng)


def check_order_consistency(matrix, utilities):
    """Raise unless p_ij > 0.5 exactly when u_i > u_j, over all pairs."""
    u = np.asarray(utilities)
    n = len(u)
    for i in range(n):
        for j in range(n):
            if i != j and (matrix[i, j] > 0.5) != (u[i] > u[j]):
                raise ConfigurationError(
                    f"win matrix disagrees with utility order on pair ({i}, {j})"
                )


@dataclass(frozen=True)
class InstanceSpec:
    """Which problem to generate.

    ``setting-1``: arms and theta uniform on the unit circle, constant-p oracle.
    ``setting-2``: all arms but one on the negative-quadrant arc, the last arm
    and theta on the positive-quadrant arc, Bradley-Terry oracle.
    ``custom``: ``generation`` (circle or sphere) and ``oracle`` as given.
    """

    setting: str = "setting-1"
    n_arms: int = 20
    dim: int = 2
    generation: str = "circle"
    oracle: str = "constant-p"
    p: float = 0.8

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ConfigurationError(f"unknown setting {self.setting!r}")
        if self.n_arms < 2:
            raise ConfigurationError("n_arms must be at least 2")
        if self.setting == "custom":
            if self.generation not in ("circle", "sphere"):
                raise ConfigurationError(f"unknown generation {self.generation!r}")
            if self.generation == "circle" and self.dim != 2:
                raise ConfigurationError("circle generation requires dim = 2")
            if self.oracle not in ("constant-p", "bradley-terry", "probit"):
                raise ConfigurationError(f"unsupported oracle {self.oracle!r} for generation")
        if self.oracle_kind == "constant-p" and not 0.5 < self.p <= 1.0:
            raise ConfigurationError(f"p must lie in (0.5, 1], got {self.p}")

    @property
    def oracle_kind(self) -> str:
        return {"setting-1": "constant-p", "setting-2": "bradley-terry"}.get(self.setting, self.oracle)

    @property
    def feature_dim(self) -> int:
        return 2 if self.setting != "custom" else self.dim


@dataclass(frozen=True, eq=False)
class Instance:
    arms: ArmSet
    model: UtilityModel
    oracle: PreferenceOracle

    @property
    def n_arms(self) -> int:
        return self.arms.n_arms

    @property
    def utilities(self) -> np.ndarray:
        return self.oracle.utilities


def _on_arc(rng, n, low, high):
    ang = rng.uniform(low, high, size=n)
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _on_sphere(rng, n, dim):
    x = rng.standard_normal((n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _draw(spec: InstanceSpec, rng):
    n = spec.n_arms
    if spec.setting == "setting-1" or (spec.setting == "custom" and spec.generation == "circle"):
        return _on_arc(rng, n, 0.0, 2 * np.pi), _on_arc(rng, 1, 0.0, 2 * np.pi)[0]
    if spec.setting == "setting-2":
        rest = _on_arc(rng, n - 1, np.pi, 1.5 * np.pi)
        good = _on_arc(rng, 1, 0.0, 0.5 * np.pi)
        theta = _on_arc(rng, 1, 0.0, 0.5 * np.pi)[0]
        return np.vstack([rest, good]), theta
    return _on_sphere(rng, n, spec.dim), _on_sphere(rng, 1, spec.dim)[0]


def _build_oracle(kind, utilities, p):
    if kind == "constant-p":
        return PreferenceOracle.constant(utilities, p)
    if kind == "bradley-terry":
        return PreferenceOracle.bradley_terry(utilities)
    return PreferenceOracle.probit(utilities)


def generate_instance(spec: InstanceSpec, rng: np.random.Generator, max_retries: int = 100) -> Instance:
    """Draw arms and theta, relabel arms by decreasing utility, attach the oracle."""
    for _ in range(max_retries):
        feats, theta = _draw(spec, rng)
        if np.unique(feats, axis=0).shape[0] != len(feats):
            continue
        u = feats @ theta
        order = np.argsort(-u, kind="stable")
        u = u[order]
        if np.min(u[:-1] - u[1:]) <= UTILITY_GAP:
            continue
        arms = ArmSet(feats[order])
        model = UtilityModel(theta)
        return Instance(arms, model, _build_oracle(spec.oracle_kind, u, spec.p))
    raise ConfigurationError(f"could not draw distinct utilities in {max_retries} attempts")


def instance_to_record(inst: Instance) -> str:
    """Plain-text (JSON) record of an instance with a linear utility."""
    if inst.model.kind != "linear":
        raise ConfigurationError("only linear-utility instances can be serialized")
    rec = {
        "features": inst.arms.features.tolist(),
        "theta": inst.model.theta.tolist(),
        "utility": "linear",
        "oracle": inst.oracle.kind,
        "params": dict(inst.oracle.params),
    }
    if inst.oracle.kind == "explicit-matrix":
        rec["params"]["matrix"] = inst.oracle.matrix.tolist()
    return json.dumps(rec)


def instance_from_record(text: str) -> Instance:
    rec = json.loads(text)
    arms = ArmSet(rec["features"])
    model = UtilityModel(rec["theta"])
    u = model.utilities(arms)
    kind = rec["oracle"]
    if kind == "explicit-matrix":
        oracle = PreferenceOracle.explicit(rec["params"]["matrix"], u)
    else:
        oracle = _build_oracle(kind, u, rec["params"].get("p", 0.8))
    return Instance(arms, model, oracle)
