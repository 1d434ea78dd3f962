"""Compare the compiled and numpy learner kernels.

    python benchmarks/bench_kernels.py [--repeat 2000] [--episodes 50]

Reports per-call times for the single-observation forward pass and the
minibatch loss/gradient, plus wall time for a short training run per backend.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from twinprice.learner import PolicyNetwork
from twinprice.learner._backend import get_kernel

TRAIN_SNIPPET = """
import time
from twinprice import ChannelParams, MspConfig, VmuProfile
from twinprice.env import PricingEnv
from twinprice.learner import BACKEND, PpoHyperparams, train
hp = PpoHyperparams(episodes={episodes})
env = PricingEnv([VmuProfile(5, 2), VmuProfile(5, 1)], ChannelParams(), MspConfig(), hp.window, hp.rounds)
t = time.perf_counter()
train(env, hp, seed=1)
print(BACKEND, time.perf_counter() - t)
"""


def kernel_times(name: str, repeat: int) -> dict[str, float]:
    k = get_kernel(name)
    rng = np.random.default_rng(0)
    net = PolicyNetwork.initialize(12, 5.0, 50.0, rng)
    d, h1, h2 = net.dims
    x1 = rng.random(d)
    xb = rng.random((20, d))
    u = rng.standard_normal(20)
    lp, adv, ret = rng.standard_normal(20), rng.standard_normal(20), rng.standard_normal(20)
    fwd = timeit.timeit(lambda: k.forward_one(net.theta, d, h1, h2, x1), number=repeat)
    lg = timeit.timeit(lambda: k.loss_and_grad(net.theta, d, h1, h2, xb, u, lp, adv, ret, 0.2, 0.5, 0.0),
                       number=repeat)
    return {"forward_one_us": 1e6 * fwd / repeat, "loss_and_grad_us": 1e6 * lg / repeat}


def train_time(backend: str, episodes: int) -> str:
    env = dict(os.environ, TWINPRICE_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", TRAIN_SNIPPET.format(episodes=episodes)],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--episodes", type=int, default=50)
    args = ap.parse_args()

    names = ["python"]
    try:
        get_kernel("cython")
        names.append("cython")
    except ImportError:
        print("compiled kernel not built; timing the numpy backend only")

    print(f"{'backend':>8} {'forward_one (us)':>18} {'loss_and_grad (us)':>20} {'train (s)':>10}")
    for name in names:
        t = kernel_times(name, args.repeat)
        resolved, secs = train_time(name, args.episodes).split()
        print(f"{resolved:>8} {t['forward_one_us']:18.2f} {t['loss_and_grad_us']:20.2f} {float(secs):10.2f}")


if __name__ == "__main__":
    main()
