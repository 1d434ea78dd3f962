"""Config loading, experiment runners and the command-line interface."""

from .config import ScenarioConfig, load, loads
from .runner import compare, run_equilibrium, run_training, sweep

__all__ = ["ScenarioConfig", "load", "loads", "compare", "run_equilibrium", "run_training", "sweep"]
