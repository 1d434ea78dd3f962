import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinprice.channel import ChannelParams
from twinprice.env import PricingEnv, TrajectoryWriter, trajectory_header
from twinprice.equilibrium import solve
from twinprice.game import MspConfig, VmuProfile


@pytest.fixture
def env(two_vmus, ch, msp):
    return PricingEnv(two_vmus, ch, msp, window=4, rounds=100)


def test_reset_deterministic(env):
    assert env.reset(3) == env.reset(3)
    assert env.reset(3) != env.reset(4)


def test_reset_window(env, msp):
    st = env.reset(11)
    assert len(st.observation) == 4
    assert st.observation.dim == 12 == env.obs_dim
    assert env.normalize(st.observation).shape == (12,)
    assert all(msp.cost <= p <= msp.max_price for p in st.observation.prices)
    utils = [env.profit(p, np.asarray(b)) for p, b in zip(st.observation.prices, st.observation.demands)]
    assert st.best_utility == max(utils)
    assert st.round == 0


def test_normalized_observation_in_unit_box(env):
    for seed in range(20):
        x = env.normalize(env.reset(seed).observation)
        assert np.all(x >= 0) and np.all(x <= 1)


def test_optimal_price_always_rewarded(env, two_vmus, ch, msp):
    p_star = solve(two_vmus, ch, msp).price
    for seed in range(30):
        env.reset(seed)
        _, r = env.step(p_star)
        assert r == 1


def test_repeat_price_tie_rewarded(env):
    env.reset(0)
    env.step(30.0)
    st, r = env.step(30.0)
    assert r == 1
    assert st.msp_utility == st.best_utility


def test_price_at_cost_gives_zero(env, msp):
    st0 = env.reset(0)
    st, r = env.step(msp.cost)
    assert st.msp_utility == 0.0
    assert r == (1 if st0.best_utility == 0.0 else 0)


def test_rationing_at_low_price(env, msp):
    env.reset(0)
    st, _ = env.step(6.0)
    assert sum(st.state.demands) == pytest.approx(msp.max_bandwidth, rel=1e-12)
    assert st.msp_utility == pytest.approx((6.0 - msp.cost) * msp.max_bandwidth)
    # Proportional: the ratio of demands equals that of the unrationed best responses.
    raw = np.array([5 / 6.0 - 2 / ChannelParams().factor, 5 / 6.0 - 1 / ChannelParams().factor])
    assert st.state.demands[0] / st.state.demands[1] == pytest.approx(raw[0] / raw[1])


def test_clamping_recorded(env, msp):
    env.reset(0)
    st, _ = env.step(msp.max_price + 10)
    assert st.state.price == msp.max_price
    st, _ = env.step(msp.cost - 1)
    assert st.state.price == msp.cost
    assert st.clamped_actions == 2


def test_episode_length_enforced(two_vmus):
    env = PricingEnv(two_vmus, window=2, rounds=3)
    env.reset(0)
    for _ in range(3):
        env.step(20.0)
    assert env.done
    with pytest.raises(RuntimeError):
        env.step(20.0)


def test_shift_register(env):
    env.reset(1)
    seq = [10.0, 20.0, 30.0, 40.0, 50.0, 15.0, 25.0]
    for i, p in enumerate(seq):
        st, _ = env.step(p)
        expected = seq[max(0, i - 3): i + 1]
        assert st.observation.prices[-len(expected):] == tuple(expected)
        assert st.observation.demands[-1] == tuple(env.settle(p))
    assert st.observation.prices == tuple(seq[-4:])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(5.0, 50.0), min_size=1, max_size=60), st.integers(0, 2**32 - 1))
def test_best_utility_monotone_and_reward_rule(prices, seed):
    env = PricingEnv([VmuProfile(5.0, 2.0), VmuProfile(5.0, 1.0)], window=4, rounds=100)
    st = env.reset(seed)
    best = st.best_utility
    for p in prices:
        prev_best = best
        st, r = env.step(p)
        assert st.best_utility >= prev_best
        assert r == (1 if st.msp_utility >= prev_best else 0)
        best = st.best_utility
        assert best == max(prev_best, st.msp_utility)


@pytest.mark.parametrize("n", [2, 6])
def test_reward_one_at_oracle_optimum_after_suboptimal_rounds(n):
    profiles = [VmuProfile(5.0, 1.0)] * n
    env = PricingEnv(profiles, window=4, rounds=100)
    sol = solve(profiles, env.channel, env.msp)
    rng = np.random.default_rng(n)
    for seed in range(10):
        env.reset(seed)
        for p in rng.uniform(5, 50, 5):
            env.step(float(p))
        st, r = env.step(sol.price)
        assert st.msp_utility == pytest.approx(sol.msp_utility, rel=1e-9)
        assert r == 1


def test_all_opt_out_gives_zero():
    env = PricingEnv([VmuProfile(0.5, 3.0)], msp=MspConfig(cost=5.0, max_price=50.0), window=2, rounds=5)
    env.reset(0)
    st, r = env.step(45.0)
    assert st.state.demands == (0.0,)
    assert st.msp_utility == 0.0
    assert r == 1  # best so far is also 0


def test_trajectory_csv(env):
    buf = io.StringIO()
    w = TrajectoryWriter(buf, env.n_vmus)
    env.reset(0)
    for p in (20.0, 30.0):
        st, r = env.step(p)
        w.write(0, st, r)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == trajectory_header(2) == [
        "episode", "round", "price", "demand_1", "demand_2", "msp_utility", "best_utility", "reward"]
    assert len(rows) == 3
    assert float(rows[2][2]) == 30.0
