"""Reference pricing schemes: uniform random and greedy best-of-history."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .env import PricingEnv
from .game import MspConfig

__all__ = ["random_price", "greedy_price", "run_baseline_episode"]


def random_price(rng: np.random.Generator, cfg: MspConfig) -> float:
    return float(rng.uniform(cfg.cost, cfg.max_price))


def greedy_price(
    history: Sequence[tuple[float, float]],
    rng: np.random.Generator,
    cfg: MspConfig,
    explore_eps: float = 0.1,
) -> float:
    """Replay the most profitable past price, exploring uniformly with prob. ``explore_eps``.

    ``history`` holds ``(price, msp_utility)`` pairs.  Ties go to the earliest
    entry; an empty history falls back to a uniform draw.
    """
    if not history or rng.random() < explore_eps:
        return random_price(rng, cfg)
    best_p, best_u = history[0]
    for p, u in history[1:]:
        if u > best_u:
            best_p, best_u = p, u
    return float(best_p)


def run_baseline_episode(
    env: PricingEnv,
    scheme: str,
    rng: np.random.Generator,
    env_seed: int,
    explore_eps: float = 0.1,
    writer=None,
    episode: int = 0,
) -> dict:
    """Play one episode with ``scheme`` in ``{"random", "greedy"}``.

    The greedy history starts with the randomly seeded rounds of the window,
    which the leader observed like any other past round.
    """
    st = env.reset(env_seed)
    history = []
    if scheme == "greedy":
        for p in st.observation.prices:
            history.append((p, env.profit(p, env.settle(p))))
    ret, prices, utils, totals, vmu = 0, [], [], [], []
    from .learner.train import vmu_utilities

    for _ in range(env.rounds):
        if scheme == "random":
            p = random_price(rng, env.msp)
        elif scheme == "greedy":
            p = greedy_price(history, rng, env.msp, explore_eps)
        else:
            raise ValueError(f"unknown baseline scheme {scheme!r}")
        st, reward = env.step(p)
        history.append((st.state.price, st.msp_utility))
        ret += reward
        d = np.asarray(st.state.demands)
        prices.append(st.state.price)
        utils.append(st.msp_utility)
        totals.append(d.sum())
        vmu.append(vmu_utilities(env, st.state.price, d).mean())
        if writer is not None:
            writer.write(episode, st, reward)
    return {
        "return": float(ret),
        "mean_msp_utility": float(np.mean(utils)),
        "final_price": prices[-1],
        "mean_price": float(np.mean(prices)),
        "mean_total_bandwidth": float(np.mean(totals)),
        "mean_vmu_utility": float(np.mean(vmu)),
    }
