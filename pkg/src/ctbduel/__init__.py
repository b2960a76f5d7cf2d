"""Dueling bandits over utility-induced cells: Comparing The Best and baselines."""

from .arms import ArmSet, Instance, InstanceSpec, PreferenceOracle, UtilityModel, generate_instance
from .cells import CellTable, classify, enumerate_cells
from .harness import RegretSeries, aggregate, run_experiment, run_replication, theorem1_bound
from .kernels import BACKEND

__all__ = [
    "ArmSet",
    "BACKEND",
    "CellTable",
    "Instance",
    "InstanceSpec",
    "PreferenceOracle",
    "RegretSeries",
    "UtilityModel",
    "aggregate",
    "classify",
    "enumerate_cells",
    "generate_instance",
    "run_experiment",
    "run_replication",
    "theorem1_bound",
]

__version__ = "0.1.0"
