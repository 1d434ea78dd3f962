"""Brute-force reference computations, independent of the package's solvers."""

import math

import numpy as np

LN2 = math.log(2.0)


def factor_from_db(tx_dbm=40.0, gain_db=-20.0, dist=500.0, eps=2.0, noise_dbm=-150.0):
    snr = 10 ** ((tx_dbm + gain_db - noise_dbm) / 10) * dist ** (-eps)
    return math.log(1 + snr) / LN2


def leader_profit_grid(alphas, datas, factor, cost, p_max, cap, n=10_000):
    """Leader profit on an ``n``-point price grid with followers maximising
    ``alpha*ln(1+r*b/D) - p*b`` by their first-order condition.  Prices at
    which total demand breaks the cap are infeasible (``-inf``)."""
    prices = np.linspace(cost, p_max, n)
    profit = np.empty(n)
    for i, p in enumerate(prices):
        total = 0.0
        for a, d in zip(alphas, datas):
            # Stationary point of a strictly concave function of b, clipped at 0.
            total += max(0.0, a / p - d / factor)
        profit[i] = (p - cost) * total if total <= cap + 1e-12 else -math.inf
    return prices, profit


def follower_utility_grid(alpha, data, factor, price, b_max, n=10_000):
    grid = np.linspace(b_max / n, b_max, n)
    return grid, alpha * np.log1p(factor * grid / data) - price * grid
