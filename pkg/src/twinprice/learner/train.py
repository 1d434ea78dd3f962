"""Training loop and checkpoint/curve serialisation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..env import PricingEnv
from ..errors import ConfigError, NumericalError
from .network import Adam, PolicyNetwork
from .ppo import Batch, PpoHyperparams, Transition, gae_advantages, ppo_update

CHECKPOINT_VERSION = 1
CURVE_COLUMNS = ["episode", "return", "mean_msp_utility", "final_price",
                 "mean_price", "mean_total_bandwidth", "mean_vmu_utility"]


@dataclass
class LearningCurve:
    returns: list[float] = field(default_factory=list)
    mean_msp_utility: list[float] = field(default_factory=list)
    final_price: list[float] = field(default_factory=list)
    mean_price: list[float] = field(default_factory=list)
    mean_total_bandwidth: list[float] = field(default_factory=list)
    mean_vmu_utility: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.returns)

    def append(self, **row) -> None:
        for k, v in row.items():
            getattr(self, k).append(float(v))

    def tail_mean(self, name: str, n: int) -> float:
        return float(np.mean(getattr(self, name)[-n:]))

    _fields = ("returns", "mean_msp_utility", "final_price", "mean_price",
               "mean_total_bandwidth", "mean_vmu_utility")

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CURVE_COLUMNS)
            for i in range(len(self)):
                w.writerow([i] + [repr(getattr(self, c)[i]) for c in self._fields])


@dataclass
class TrainingResult:
    curve: LearningCurve
    network: PolicyNetwork
    buffer_size: int
    updates: int
    skipped_updates: int


def vmu_utilities(env: PricingEnv, price: float, demands: np.ndarray) -> np.ndarray:
    """Follower utilities at settled demands; 0 for followers that opted out."""
    pos = demands > 0
    out = np.zeros_like(demands)
    out[pos] = (env._alpha[pos] * np.log1p(env.channel.factor * demands[pos] / env._data[pos])
                - price * demands[pos])
    return out


def train(env: PricingEnv, hp: PpoHyperparams, seed: int, update: bool = True,
          on_step=None) -> TrainingResult:
    """Run ``hp.episodes`` episodes of ``hp.rounds`` rounds, updating every ``batch_size`` rounds.

    The replay buffer is cleared at the start of each episode.  At each update
    point, advantages are computed over the buffered part of the episode,
    bootstrapped with the critic's value of the latest observation, and
    ``epochs_per_update`` gradient steps are taken on random mini-batches.
    ``on_step(episode, state, reward)`` is called after every round if given.
    """
    if env.window != hp.window or env.rounds != hp.rounds:
        raise ConfigError("environment window/rounds disagree with the hyperparameters")
    init_ss, act_ss, batch_ss, env_ss = np.random.SeedSequence(seed).spawn(4)
    act_rng = np.random.default_rng(act_ss)
    batch_rng = np.random.default_rng(batch_ss)
    env_rng = np.random.default_rng(env_ss)
    net = PolicyNetwork.initialize(env.obs_dim, env.msp.cost, env.msp.max_price,
                                   np.random.default_rng(init_ss), hp.hidden_sizes, hp.log_std_init)
    opt = Adam(net.n_params, hp.learning_rate, hp.adam_betas)
    curve = LearningCurve()
    n_updates = n_skipped = 0
    buffer: list[Transition] = []

    for ep in range(hp.episodes):
        st = env.reset(int(env_rng.integers(2**63)))
        obs = env.normalize(st.observation)
        buffer = []
        ret = 0.0
        prices, utils, totals, vmu = [], [], [], []
        for k in range(hp.rounds):
            price, logp, value, u = net.act(obs, act_rng)
            st, reward = env.step(price)
            if on_step is not None:
                on_step(ep, st, reward)
            next_obs = env.normalize(st.observation)
            buffer.append(Transition(obs, st.state.price, reward, next_obs, logp, value, u))
            ret += reward
            demands = np.asarray(st.state.demands)
            prices.append(st.state.price)
            utils.append(st.msp_utility)
            totals.append(demands.sum())
            vmu.append(vmu_utilities(env, st.state.price, demands).mean())
            obs = next_obs

            if update and (k + 1) % hp.batch_size == 0:
                _, values = net.forward(np.asarray([t.observation for t in buffer]))
                terminal = float(net.forward(next_obs)[1][0])
                adv, targ = gae_advantages([t.reward for t in buffer], values, terminal,
                                           hp.gamma, hp.gae_lambda)
                try:
                    stats = ppo_update(net, Batch.from_transitions(buffer, adv, targ), hp, opt, batch_rng)
                except NumericalError as exc:
                    raise NumericalError(f"episode {ep}, round {k}: {exc}") from exc
                n_updates += stats.steps
                n_skipped += stats.skipped

        curve.append(returns=ret, mean_msp_utility=np.mean(utils), final_price=prices[-1],
                     mean_price=np.mean(prices), mean_total_bandwidth=np.mean(totals),
                     mean_vmu_utility=np.mean(vmu))
        if not math.isfinite(curve.mean_msp_utility[-1]):
            raise NumericalError(f"non-finite utility in episode {ep}")

    return TrainingResult(curve, net, len(buffer), n_updates, n_skipped)


def save_checkpoint(path: str | Path, net: PolicyNetwork, hp: PpoHyperparams) -> None:
    """JSON text checkpoint: version header, hyperparameters, layout, parameters."""
    doc = {
        "format": "twinprice-checkpoint",
        "version": CHECKPOINT_VERSION,
        "hyperparams": hp.to_dict(),
        "input_dim": net.input_dim,
        "hidden": list(net.hidden),
        "low": net.low,
        "high": net.high,
        "theta": [float(x) for x in net.theta],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_checkpoint(path: str | Path) -> tuple[PolicyNetwork, PpoHyperparams]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "twinprice-checkpoint":
        raise ConfigError(f"{path}: not a checkpoint file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ConfigError(f"{path}: unsupported checkpoint version {doc.get('version')!r}")
    hp = PpoHyperparams(**doc["hyperparams"])
    net = PolicyNetwork(np.asarray(doc["theta"], dtype=float), int(doc["input_dim"]),
                        tuple(doc["hidden"]), float(doc["low"]), float(doc["high"]))
    return net, hp
