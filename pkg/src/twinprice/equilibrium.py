"""Analytic Stackelberg solution of the pricing game.

Followers play the closed-form best response ``max(0, alpha/p - D/r)``.  The
leader's profit ``(p - C) * sum_n b_n(p)`` is smooth and strictly concave on
every price interval over which the set of active followers is fixed, so the
exact constrained maximiser is found by checking the stationary point of each
piece, clipped to the feasible interval ``[max(C, p_cap), p_max]`` where
``p_cap`` is the lowest price whose total demand fits under ``B_max``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams
from .errors import DomainError
from .game import MspConfig, VmuProfile, vmu_utility

__all__ = [
    "ConstraintBinding",
    "EquilibriumSolution",
    "best_response",
    "best_responses",
    "total_demand",
    "leader_utility",
    "unconstrained_price",
    "cap_clearing_price",
    "solve",
]

BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 200


class ConstraintBinding(str, enum.Enum):
    NONE = "none"
    BANDWIDTH_CAP = "bandwidth_cap"
    PRICE_CAP = "price_cap"


@dataclass(frozen=True)
class EquilibriumSolution:
    price: float
    demands: tuple[float, ...]
    msp_utility: float
    vmu_utilities: tuple[float, ...]
    constraint_binding: ConstraintBinding
    infeasible: bool = False
    degenerate: bool = False

    @property
    def total_demand(self) -> float:
        return float(sum(self.demands))

    @property
    def inactive(self) -> tuple[bool, ...]:
        return tuple(b == 0.0 for b in self.demands)


def best_response(p: float, profile: VmuProfile, ch: ChannelParams) -> float:
    """Utility-maximising demand at price ``p``; 0 means the follower opts out."""
    if not p > 0:
        raise DomainError(f"price must be > 0, got {p!r}")
    b = profile.alpha / p - profile.data_size / ch.factor
    return b if b > 0 else 0.0


def _arrays(profiles: Sequence[VmuProfile]) -> tuple[np.ndarray, np.ndarray]:
    if len(profiles) == 0:
        raise DomainError("at least one follower profile is required")
    alpha = np.array([v.alpha for v in profiles], dtype=float)
    data = np.array([v.data_size for v in profiles], dtype=float)
    return alpha, data


def best_responses(
    p: float | np.ndarray, alpha: np.ndarray, data: np.ndarray, factor: float
) -> np.ndarray:
    """Vectorised best responses.  ``p`` may be a scalar or a price grid."""
    p = np.asarray(p, dtype=float)
    b = alpha / p[..., None] - data / factor
    return np.maximum(b, 0.0)


def total_demand(p: float, profiles: Sequence[VmuProfile], ch: ChannelParams) -> float:
    return sum(best_response(p, v, ch) for v in profiles)


def leader_utility(
    p: float | np.ndarray, profiles: Sequence[VmuProfile], ch: ChannelParams, cost: float
) -> float | np.ndarray:
    """Leader profit at ``p`` with every follower best-responding (no cap)."""
    alpha, data = _arrays(profiles)
    out = (np.asarray(p, dtype=float) - cost) * best_responses(p, alpha, data, ch.factor).sum(-1)
    return float(out) if np.ndim(out) == 0 else out


def unconstrained_price(
    profiles: Sequence[VmuProfile], ch: ChannelParams, cost: float
) -> float:
    """Stationary point ``sqrt(C * r * sum(alpha) / sum(D))`` of the leader profit."""
    alpha, data = _arrays(profiles)
    if not cost > 0:
        raise DomainError(f"cost must be > 0, got {cost!r}")
    return math.sqrt(cost * ch.factor * alpha.sum() / data.sum())


def cap_clearing_price(
    alpha: np.ndarray, data: np.ndarray, factor: float, cap: float, lo: float, hi: float
) -> float:
    """Smallest price in ``[lo, hi]`` whose total demand does not exceed ``cap``.

    Total demand is strictly decreasing while positive, so plain bisection
    brackets the crossing.  Returns the upper end of the final bracket, which
    is always feasible, refined by the closed form over the active set.
    """
    def excess(p: float) -> float:
        return float(best_responses(p, alpha, data, factor).sum()) - cap

    if excess(lo) <= 0:
        return lo
    if excess(hi) > 0:
        raise DomainError(f"total demand exceeds the cap even at price {hi!r}")
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    # Closed form on the bracket's active set: sum(alpha)/p - sum(D)/r = cap.
    active = alpha * factor / data > hi
    exact = alpha[active].sum() / (cap + data[active].sum() / factor)
    if lo - BISECTION_TOL <= exact <= hi + BISECTION_TOL:
        return float(exact)
    return hi


def _piece_stationary(alpha_a: float, data_a: float, factor: float, cost: float) -> float:
    return math.sqrt(cost * factor * alpha_a / data_a)


def solve(
    profiles: Sequence[VmuProfile], ch: ChannelParams, cfg: MspConfig
) -> EquilibriumSolution:
    """Stackelberg equilibrium under the bandwidth and price caps."""
    alpha, data = _arrays(profiles)
    r = ch.factor
    cost, p_max, cap = cfg.cost, cfg.max_price, cfg.max_bandwidth

    def finish(p: float, binding: ConstraintBinding, **flags) -> EquilibriumSolution:
        demands = tuple(float(b) for b in best_responses(p, alpha, data, r))
        vmu = tuple(
            vmu_utility(v, b, p, ch) if b > 0 else 0.0 for v, b in zip(profiles, demands)
        )
        return EquilibriumSolution(
            price=float(p),
            demands=demands,
            msp_utility=(p - cost) * sum(demands),
            vmu_utilities=vmu,
            constraint_binding=binding,
            **flags,
        )

    if best_responses(p_max, alpha, data, r).sum() > cap:
        return finish(p_max, ConstraintBinding.PRICE_CAP, infeasible=True)

    p_cap = cap_clearing_price(alpha, data, r, cap, cost, p_max)
    lo = max(cost, p_cap)

    # Follower n is active strictly below its opt-out price alpha_n * r / D_n.
    thresholds = alpha * r / data
    knots = sorted({lo, p_max, *(float(t) for t in thresholds if lo < t < p_max)})

    def profit(p: float) -> float:
        return (p - cost) * float(best_responses(p, alpha, data, r).sum())

    best_p, best_u, best_stationary = lo, profit(lo), math.nan
    for a, b in zip(knots[:-1], knots[1:]):
        active = thresholds > 0.5 * (a + b)
        if not active.any():
            continue
        s = _piece_stationary(alpha[active].sum(), data[active].sum(), r, cost)
        cand = min(max(s, a), b)
        u = profit(cand)
        if u > best_u:
            best_p, best_u, best_stationary = cand, u, s

    if best_u <= 0.0:
        return finish(lo, ConstraintBinding.NONE, degenerate=True)
    if math.isnan(best_stationary):
        # Optimum at the left end of the feasible interval.
        active = thresholds > lo
        best_stationary = _piece_stationary(alpha[active].sum(), data[active].sum(), r, cost)

    if best_p == lo and lo > cost and best_stationary < lo:
        binding = ConstraintBinding.BANDWIDTH_CAP
    elif best_p == p_max and best_stationary > p_max:
        binding = ConstraintBinding.PRICE_CAP
    else:
        binding = ConstraintBinding.NONE
    return finish(best_p, binding)
