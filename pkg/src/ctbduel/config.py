"""Experiment configuration: a YAML (or JSON) file with a fixed key set.

Unknown keys are errors. Example::

    name: fig2a
    instance: {setting: setting-1}
    algorithms:
      - {id: ctb-1}
      - {id: ctb-3, q: 0.8}
      - {id: thompson, q: 0.8}
      - {id: ws-w}
    horizon: 500
    replications: 200
    seed: 1
    regret_mode: binary-weak
    output_dir: results/fig2a
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

import yaml

from .arms import InstanceSpec
from .errors import ConfigurationError

ALGORITHM_IDS = ("ctb-1", "ctb-2", "ctb-3", "thompson", "rucb", "ws-w")
REGRET_MODES = ("binary-weak", "utility-weak")
DEFAULT_CHECKPOINTS = (100, 200, 300, 400, 500)


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    q: Optional[float] = None
    alpha: float = 0.51
    likelihood: Optional[str] = None
    prior_matrix: Optional[str] = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    instance: InstanceSpec
    algorithms: tuple
    horizon: int = 500
    replications: int = 200
    seed: int = 0
    regret_mode: str = "binary-weak"
    checkpoints: Optional[tuple] = None
    output_dir: str = "results"

    def __post_init__(self):
        if self.checkpoints is None:
            cps = tuple(t for t in DEFAULT_CHECKPOINTS if t <= self.horizon) or (self.horizon,)
            object.__setattr__(self, "checkpoints", cps)
        validate(self)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = [asdict(a) for a in self.algorithms]
        d["checkpoints"] = list(self.checkpoints)
        return d


def _check_keys(raw, cls, where):
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{where}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigurationError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def validate(cfg: ExperimentConfig) -> None:
    if not _is_int(cfg.horizon) or cfg.horizon < 1:
        raise ConfigurationError(f"horizon: must be an integer >= 1, got {cfg.horizon!r}")
    if not _is_int(cfg.replications) or cfg.replications < 1:
        raise ConfigurationError(f"replications: must be an integer >= 1, got {cfg.replications!r}")
    if not _is_int(cfg.seed) or cfg.seed < 0:
        raise ConfigurationError(f"seed: must be a non-negative integer, got {cfg.seed!r}")
    if cfg.regret_mode not in REGRET_MODES:
        raise ConfigurationError(f"regret_mode: expected one of {REGRET_MODES}, got {cfg.regret_mode!r}")
    if not cfg.algorithms:
        raise ConfigurationError("algorithms: at least one algorithm is required")
    for t in cfg.checkpoints:
        if not _is_int(t) or not 1 <= t <= cfg.horizon:
            raise ConfigurationError(f"checkpoints: {t!r} outside [1, {cfg.horizon}]")
    ids = [a.id for a in cfg.algorithms]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"algorithms: duplicate ids in {ids}")
    for k, a in enumerate(cfg.algorithms):
        where = f"algorithms[{k}]"
        if a.id not in ALGORITHM_IDS:
            raise ConfigurationError(f"{where}.id: expected one of {ALGORITHM_IDS}, got {a.id!r}")
        if a.q is not None and not 0.5 < a.q < 1.0:
            raise ConfigurationError(f"{where}.q: must lie in (0.5, 1), got {a.q}")
        if a.id == "ctb-3" and a.q is None:
            raise ConfigurationError(f"{where}.q: required for ctb-3")
        if a.id == "thompson":
            if a.likelihood not in (None, "constant", "bradley-terry"):
                raise ConfigurationError(f"{where}.likelihood: expected constant or bradley-terry")
            if a.likelihood != "bradley-terry" and a.q is None:
                raise ConfigurationError(f"{where}.q: required unless likelihood is bradley-terry")
        if a.id == "rucb" and a.alpha <= 0.5:
            raise ConfigurationError(f"{where}.alpha: must exceed 0.5")
        if a.prior_matrix is not None and a.id != "ctb-2":
            raise ConfigurationError(f"{where}.prior_matrix: only ctb-2 takes a prior matrix")


def config_from_dict(raw: dict) -> ExperimentConfig:
    _check_keys(raw, ExperimentConfig, "config")
    for key in ("name", "instance", "algorithms"):
        if key not in raw:
            raise ConfigurationError(f"{key}: required")
    inst_raw = raw["instance"]
    _check_keys(inst_raw, InstanceSpec, "instance")
    try:
        instance = InstanceSpec(**inst_raw)
    except (TypeError, ConfigurationError) as err:
        raise ConfigurationError(f"instance: {err}") from None
    algs = []
    if not isinstance(raw["algorithms"], list):
        raise ConfigurationError("algorithms: expected a list")
    for k, a in enumerate(raw["algorithms"]):
        _check_keys(a, AlgorithmSpec, f"algorithms[{k}]")
        if "id" not in a:
            raise ConfigurationError(f"algorithms[{k}].id: required")
        algs.append(AlgorithmSpec(**a))
    rest = {k: v for k, v in raw.items() if k not in ("instance", "algorithms")}
    if rest.get("checkpoints") is not None:
        rest["checkpoints"] = tuple(rest["checkpoints"])
    return ExperimentConfig(instance=instance, algorithms=tuple(algs), **rest)


def loads(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigurationError(f"config does not parse: {err}") from None
    return config_from_dict(raw)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return loads(fh.read())


def dumps(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
