"""Players of the bandwidth pricing game and their utilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams
from .errors import DomainError, InvalidParameterError

__all__ = [
    "VmuProfile",
    "MspConfig",
    "GameState",
    "immersion",
    "vmu_utility",
    "msp_utility",
]


@dataclass(frozen=True)
class VmuProfile:
    """A follower: immersion coefficient and twin size (in 100 MB units)."""

    alpha: float
    data_size: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidParameterError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if not (self.data_size > 0 and math.isfinite(self.data_size)):
            raise InvalidParameterError(
                f"data_size must be finite and > 0, got {self.data_size!r}"
            )


@dataclass(frozen=True)
class MspConfig:
    """The leader: unit cost, bandwidth cap and price cap."""

    cost: float = 5.0
    max_bandwidth: float = 0.5
    max_price: float = 50.0

    def __post_init__(self) -> None:
        if not self.cost > 0:
            raise InvalidParameterError(f"cost must be > 0, got {self.cost!r}")
        if not self.max_price >= self.cost:
            raise InvalidParameterError(
                f"max_price ({self.max_price!r}) must be >= cost ({self.cost!r})"
            )
        if not self.max_bandwidth > 0:
            raise InvalidParameterError(
                f"max_bandwidth must be > 0, got {self.max_bandwidth!r}"
            )


@dataclass(frozen=True)
class GameState:
    """One round's outcome: posted price and the followers' demands.

    A demand of exactly 0 marks a follower that opted out at this price.
    """

    price: float
    demands: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(not b >= 0 for b in self.demands):
            raise DomainError(f"demands must be non-negative, got {self.demands!r}")

    @property
    def total_demand(self) -> float:
        return float(sum(self.demands))


def immersion(profile: VmuProfile, b: float, ch: ChannelParams) -> float:
    """``alpha * ln(1 + 1/AoTM)`` for a follower that bought ``b``."""
    if not b > 0:
        raise DomainError(f"bandwidth must be > 0, got {b!r}")
    return profile.alpha * math.log1p(ch.factor * b / profile.data_size)


def vmu_utility(profile: VmuProfile, b: float, p: float, ch: ChannelParams) -> float:
    if not p > 0:
        raise DomainError(f"price must be > 0, got {p!r}")
    return immersion(profile, b, ch) - p * b


def msp_utility(p: float, demands: Sequence[float] | np.ndarray, cfg: MspConfig) -> float:
    """Leader profit ``(p - C) * sum(b)``."""
    if p < cfg.cost:
        raise DomainError(f"price {p!r} is below the unit cost {cfg.cost!r}")
    return (p - cfg.cost) * float(np.sum(demands))
