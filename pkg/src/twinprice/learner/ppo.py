"""Clipped-surrogate policy optimisation pieces: GAE, clipping, update step."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DomainError, InvalidParameterError, NumericalError
from . import _backend
from .network import Adam, PolicyNetwork, _log_sigmoid_jacobian

log = logging.getLogger(__name__)

MAX_RATIO = 1e3


@dataclass
class PpoHyperparams:
    """Learner configuration.

    ``batch_size`` is the mini-batch size sampled from the episode buffer;
    ``gamma``, ``gae_lambda``, ``clip_epsilon`` and ``value_coef`` have no
    reference values and use common defaults.  ``learning_rate`` defaults to
    3e-4: at 1e-5 the 25k Adam steps of a 500-episode run barely move the
    policy away from its initialisation.
    """

    episodes: int = 500
    rounds: int = 100
    window: int = 4
    batch_size: int = 20
    epochs_per_update: int = 10
    learning_rate: float = 3e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_epsilon: float = 0.2
    value_coef: float = 0.5
    entropy_coef: float = 0.0
    hidden_sizes: tuple[int, int] = (64, 64)
    log_std_init: float = -0.5
    adam_betas: tuple[float, float] = (0.9, 0.999)
    normalize_advantages: bool = True

    def __post_init__(self) -> None:
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        self.adam_betas = tuple(float(b) for b in self.adam_betas)
        if len(self.hidden_sizes) != 2 or min(self.hidden_sizes) < 1:
            raise InvalidParameterError("hidden_sizes must be two positive layer widths")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidParameterError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise InvalidParameterError(f"gae_lambda must lie in [0, 1], got {self.gae_lambda!r}")
        if not self.clip_epsilon > 0:
            raise InvalidParameterError("clip_epsilon must be > 0")
        if not self.value_coef > 0:
            raise InvalidParameterError("value_coef must be > 0")
        if not self.learning_rate > 0:
            raise InvalidParameterError("learning_rate must be > 0")
        for name in ("episodes", "rounds", "window", "batch_size", "epochs_per_update"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be >= 1")
        # The buffer holds one episode.
        if self.batch_size > self.rounds:
            raise InvalidParameterError("batch_size cannot exceed the buffer capacity (rounds)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        d["adam_betas"] = list(self.adam_betas)
        return d


@dataclass
class Transition:
    observation: np.ndarray
    action: float
    reward: float
    next_observation: np.ndarray
    log_prob: float
    value: float
    pre_squash: float = field(default=0.0)


@dataclass
class UpdateStats:
    steps: int = 0
    skipped: int = 0
    policy_objective: float = math.nan
    value_loss: float = math.nan
    mean_ratio: float = math.nan
    clip_fraction: float = math.nan
    history: list = field(default_factory=list)


def clip_ratio(r: float | np.ndarray, eps: float) -> float | np.ndarray:
    """``1-eps`` below the band, ``1+eps`` above it, ``r`` inside."""
    return np.minimum(np.maximum(r, 1.0 - eps), 1.0 + eps)


def clipped_objective(ratio: np.ndarray, adv: np.ndarray, eps: float) -> np.ndarray:
    """Per-sample pessimistic surrogate ``min(r*A, clip(r)*A)``."""
    return np.minimum(ratio * adv, clip_ratio(ratio, eps) * adv)


def gae_advantages(
    rewards: Sequence[float],
    values: Sequence[float],
    terminal_value: float,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Generalised advantage estimates and value targets for one trajectory.

    ``values[k]`` is the critic's estimate at step ``k``; ``terminal_value``
    bootstraps the state after the last step.  With ``lam=1`` the advantage is
    the discounted reward-to-go plus the discounted terminal value minus the
    baseline.  Returns ``(advantages, advantages + values)``.
    """
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    if rewards.shape != values.shape or rewards.ndim != 1:
        raise DomainError(
            f"rewards and values must be 1-D of equal length, got {rewards.shape} and {values.shape}"
        )
    n = rewards.size
    adv = np.empty(n)
    next_v = float(terminal_value)
    running = 0.0
    for k in range(n - 1, -1, -1):
        delta = rewards[k] + gamma * next_v - values[k]
        running = delta + gamma * lam * running
        adv[k] = running
        next_v = values[k]
    return adv, adv + values


@dataclass
class Batch:
    """Arrays for an update; ``log_prob`` is the price-space log-density at sampling."""

    obs: np.ndarray
    pre_squash: np.ndarray
    log_prob: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return self.obs.shape[0]

    @classmethod
    def from_transitions(cls, trs: Sequence[Transition], advantages, returns) -> "Batch":
        return cls(
            obs=np.ascontiguousarray([t.observation for t in trs], dtype=float),
            pre_squash=np.array([t.pre_squash for t in trs], dtype=float),
            log_prob=np.array([t.log_prob for t in trs], dtype=float),
            advantages=np.asarray(advantages, dtype=float),
            returns=np.asarray(returns, dtype=float),
        )


def gaussian_log_prob_old(net: PolicyNetwork, batch: Batch) -> np.ndarray:
    """Strip the squashing Jacobian from the stored price-space log-densities."""
    return (batch.log_prob + math.log(net.high - net.low)
            + _log_sigmoid_jacobian(batch.pre_squash))


def loss_and_grad(net: PolicyNetwork, batch: Batch, hp: PpoHyperparams, idx=None, kernel=None):
    k = kernel or _backend.kernel
    logp_old = gaussian_log_prob_old(net, batch)
    if idx is None:
        idx = np.arange(len(batch))
    adv = batch.advantages[idx]
    if hp.normalize_advantages and adv.size > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    return k.loss_and_grad(
        net.theta, *net.dims,
        np.ascontiguousarray(batch.obs[idx]),
        np.ascontiguousarray(batch.pre_squash[idx]),
        np.ascontiguousarray(logp_old[idx]),
        np.ascontiguousarray(adv),
        np.ascontiguousarray(batch.returns[idx]),
        hp.clip_epsilon, hp.value_coef, hp.entropy_coef,
    )


def ppo_update(
    net: PolicyNetwork,
    batch: Batch,
    hp: PpoHyperparams,
    optimizer: Adam,
    rng: np.random.Generator,
) -> UpdateStats:
    """``epochs_per_update`` gradient steps, each on a random mini-batch.

    Modifies ``net.theta`` in place.  A mini-batch whose importance ratio
    exceeds ``MAX_RATIO`` is skipped.
    """
    if len(batch) == 0:
        raise DomainError("cannot update on an empty batch")
    stats = UpdateStats()
    size = min(hp.batch_size, len(batch))
    for _ in range(hp.epochs_per_update):
        idx = np.sort(rng.choice(len(batch), size=size, replace=False))
        loss, grad, s = loss_and_grad(net, batch, hp, idx)
        if not (math.isfinite(loss) and np.all(np.isfinite(grad))):
            raise NumericalError(f"non-finite loss {loss!r} during update")
        if s[3] > MAX_RATIO:
            log.warning("importance ratio %.3g exceeds %.0g; skipping mini-batch", s[3], MAX_RATIO)
            stats.skipped += 1
            continue
        optimizer.step(net.theta, grad)
        stats.steps += 1
        stats.history.append((loss, *s))
    if stats.history:
        last = stats.history[-1]
        stats.policy_objective, stats.value_loss, stats.mean_ratio = last[1], last[2], last[3]
        stats.clip_fraction = last[5]
    return stats
