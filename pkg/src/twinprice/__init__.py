"""Bandwidth pricing game for vehicular twin migration.

A monopolist service provider prices bandwidth; vehicular users buy it to
migrate their digital twins, trading immersion (driven by migration
freshness) against cost.  The package provides the analytic Stackelberg
solution, a windowed environment for the repeated game, a clipped policy
gradient learner for the price, simple baseline pricers and a CLI harness.
"""

from .channel import ChannelParams, aotm, rate_factor, transmission_rate
from .equilibrium import ConstraintBinding, EquilibriumSolution, best_response, solve, unconstrained_price
from .game import GameState, MspConfig, VmuProfile, immersion, msp_utility, vmu_utility

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "aotm", "rate_factor", "transmission_rate",
    "ConstraintBinding", "EquilibriumSolution", "best_response", "solve", "unconstrained_price",
    "GameState", "MspConfig", "VmuProfile", "immersion", "msp_utility", "vmu_utility",
]
