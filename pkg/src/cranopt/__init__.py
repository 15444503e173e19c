"""Joint cloud/radio energy minimization for C-RAN with co-located mobile clones."""

from . import algorithms, cloud, conic, experiments, ran, scenario
from .algorithms import (
    JointSolution,
    RanSolution,
    joint_energy_minimization,
    ran_power_minimization,
    split_deadline_baseline,
)
from .experiments import SolutionRecord, SweepSpec, emit_records, run_single, run_sweep
from .scenario import SystemConfig, Task, default_config, generate_channels, load_config

__all__ = [
    "algorithms",
    "cloud",
    "conic",
    "experiments",
    "ran",
    "scenario",
    "JointSolution",
    "RanSolution",
    "joint_energy_minimization",
    "ran_power_minimization",
    "split_deadline_baseline",
    "SolutionRecord",
    "SweepSpec",
    "emit_records",
    "run_single",
    "run_sweep",
    "SystemConfig",
    "Task",
    "default_config",
    "generate_channels",
    "load_config",
]
__version__ = "0.1.0"
