"""Partially observed repeated pricing game seen by the leader agent.

Each round the leader posts a price, the followers best-respond, and the
leader earns a binary reward: 1 if this round's profit is at least the best
profit seen so far in the episode, 0 otherwise.  The leader only observes a
sliding window of the last ``L`` (price, demand-vector) pairs.

When aggregate demand at a low trial price exceeds ``B_max``, demands are
rationed proportionally so that they sum to exactly ``B_max``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .channel import ChannelParams
from .equilibrium import best_responses
from .game import GameState, MspConfig, VmuProfile

__all__ = [
    "Observation",
    "EpisodeState",
    "PricingEnv",
    "TrajectoryWriter",
    "trajectory_header",
]


@dataclass(frozen=True)
class Observation:
    """Window of past rounds, oldest first."""

    prices: tuple[float, ...]
    demands: tuple[tuple[float, ...], ...]

    def __len__(self) -> int:
        return len(self.prices)

    @property
    def dim(self) -> int:
        return len(self.prices) * (1 + len(self.demands[0]))

    def flat(self, max_price: float = 1.0, max_bandwidth: float = 1.0) -> np.ndarray:
        """``[p_1, b_1..., p_2, b_2..., ...]`` scaled by the given maxima."""
        rows = [(p / max_price, *(b / max_bandwidth for b in bs))
                for p, bs in zip(self.prices, self.demands)]
        return np.asarray(rows, dtype=float).ravel()


@dataclass(frozen=True)
class EpisodeState:
    round: int
    state: GameState
    best_utility: float
    observation: Observation
    msp_utility: float = 0.0
    clamped_actions: int = 0


@dataclass
class PricingEnv:
    """Repeated leader/follower pricing game with ``K`` rounds per episode."""

    profiles: Sequence[VmuProfile]
    channel: ChannelParams = field(default_factory=ChannelParams)
    msp: MspConfig = field(default_factory=MspConfig)
    window: int = 4
    rounds: int = 100

    def __post_init__(self) -> None:
        if len(self.profiles) == 0:
            raise ValueError("at least one follower is required")
        if self.window < 1 or self.rounds < 1:
            raise ValueError("window and rounds must be >= 1")
        self._alpha = np.array([v.alpha for v in self.profiles], dtype=float)
        self._data = np.array([v.data_size for v in self.profiles], dtype=float)
        self._state: EpisodeState | None = None

    @property
    def n_vmus(self) -> int:
        return len(self.profiles)

    @property
    def obs_dim(self) -> int:
        return self.window * (1 + self.n_vmus)

    @property
    def state(self) -> EpisodeState:
        if self._state is None:
            raise RuntimeError("call reset() first")
        return self._state

    def settle(self, price: float) -> np.ndarray:
        """Follower demands at ``price`` after proportional rationing."""
        b = best_responses(price, self._alpha, self._data, self.channel.factor)
        total = b.sum()
        if total > self.msp.max_bandwidth:
            b = b * (self.msp.max_bandwidth / total)
        return b

    def profit(self, price: float, demands: np.ndarray) -> float:
        return (price - self.msp.cost) * float(demands.sum())

    def normalize(self, obs: Observation) -> np.ndarray:
        return obs.flat(self.msp.max_price, self.msp.max_bandwidth)

    def reset(self, seed: int | None = None) -> EpisodeState:
        """Start an episode with ``L`` uniformly random seed rounds in the window."""
        rng = np.random.default_rng(seed)
        prices = rng.uniform(self.msp.cost, self.msp.max_price, size=self.window)
        demands = [self.settle(p) for p in prices]
        utils = [self.profit(p, b) for p, b in zip(prices, demands)]
        obs = Observation(
            prices=tuple(float(p) for p in prices),
            demands=tuple(tuple(float(x) for x in b) for b in demands),
        )
        self._state = EpisodeState(
            round=0,
            state=GameState(obs.prices[-1], obs.demands[-1]),
            best_utility=float(max(utils)),
            observation=obs,
            msp_utility=float(utils[-1]),
        )
        return self._state

    def step(self, price: float) -> tuple[EpisodeState, int]:
        st = self.state
        if st.round >= self.rounds:
            raise RuntimeError(f"episode finished after {self.rounds} rounds; call reset()")
        clamped = st.clamped_actions
        lo, hi = self.msp.cost, self.msp.max_price
        if not lo <= price <= hi:
            price = min(max(price, lo), hi)
            clamped += 1
        price = float(price)
        b = self.settle(price)
        u_s = self.profit(price, b)
        reward = 1 if u_s >= st.best_utility else 0
        demands = tuple(float(x) for x in b)
        obs = Observation(
            prices=st.observation.prices[1:] + (price,),
            demands=st.observation.demands[1:] + (demands,),
        )
        self._state = EpisodeState(
            round=st.round + 1,
            state=GameState(price, demands),
            best_utility=max(st.best_utility, u_s),
            observation=obs,
            msp_utility=u_s,
            clamped_actions=clamped,
        )
        return self._state, reward

    @property
    def done(self) -> bool:
        return self.state.round >= self.rounds


def trajectory_header(n_vmus: int) -> list[str]:
    return (["episode", "round", "price"]
            + [f"demand_{i + 1}" for i in range(n_vmus)]
            + ["msp_utility", "best_utility", "reward"])


class TrajectoryWriter:
    """Writes one CSV row per played round."""

    def __init__(self, fh: IO[str], n_vmus: int):
        self._w = csv.writer(fh)
        self._w.writerow(trajectory_header(n_vmus))

    def write(self, episode: int, st: EpisodeState, reward: int) -> None:
        self._w.writerow(
            [episode, st.round, repr(st.state.price), *map(repr, st.state.demands),
             repr(st.msp_utility), repr(st.best_utility), reward]
        )
