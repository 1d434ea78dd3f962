"""Experiment orchestration: analytic solutions, training runs, sweeps."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..baselines import run_baseline_episode
from ..env import PricingEnv, TrajectoryWriter
from ..equilibrium import EquilibriumSolution, solve
from ..errors import ConfigError, TwinPriceError
from ..learner import LearningCurve, save_checkpoint, train
from .config import ScenarioConfig

log = logging.getLogger(__name__)

SWEEP_VERSION = 1
SWEEP_COLUMNS = ["axis", "axis_value", "scheme", "price", "total_bandwidth_scaled",
                 "total_bandwidth", "msp_utility", "mean_vmu_utility", "seed", "error"]
DEFAULT_SEEDS = (1, 2, 3, 4, 5, 6, 7)
AXES = {"cost": (5, 6, 7, 8, 9), "vmus": (1, 2, 3, 4, 5, 6)}
BANDWIDTH_SCALE = 100.0


def make_env(cfg: ScenarioConfig) -> PricingEnv:
    return PricingEnv(cfg.vmus, cfg.channel, cfg.msp, cfg.ppo.window, cfg.ppo.rounds)


def run_equilibrium(cfg: ScenarioConfig) -> tuple[EquilibriumSolution, dict]:
    sol = solve(cfg.vmus, cfg.channel, cfg.msp)
    report = {
        "price": sol.price,
        "demands": list(sol.demands),
        "total_bandwidth": sol.total_demand,
        "total_bandwidth_scaled": BANDWIDTH_SCALE * sol.total_demand,
        "msp_utility": sol.msp_utility,
        "vmu_utilities": list(sol.vmu_utilities),
        "mean_vmu_utility": float(np.mean(sol.vmu_utilities)),
        "constraint_binding": sol.constraint_binding.value,
        "infeasible": sol.infeasible,
        "degenerate": sol.degenerate,
        "inactive": list(sol.inactive),
    }
    if sol.infeasible:
        log.warning("bandwidth cap cannot be met even at the price cap")
    return sol, report


def baseline_curve(cfg: ScenarioConfig, scheme: str, seed: int, episodes: int,
                   writer: TrajectoryWriter | None = None) -> LearningCurve:
    """Play ``episodes`` episodes of a non-learning scheme."""
    env = make_env(cfg)
    env_ss, act_ss = np.random.SeedSequence(seed).spawn(2)
    env_rng = np.random.default_rng(env_ss)
    rng = np.random.default_rng(act_ss)
    curve = LearningCurve()
    for ep in range(episodes):
        r = run_baseline_episode(env, scheme, rng, int(env_rng.integers(2**63)),
                                 cfg.explore_eps, writer, ep)
        curve.append(returns=r["return"], **{k: v for k, v in r.items() if k != "return"})
    return curve


def run_training(cfg: ScenarioConfig, outdir: str | Path, scheme: str | None = None,
                 seed: int | None = None, trajectory: bool = False) -> LearningCurve:
    """Train (or, for baselines, just play) and write curves and a checkpoint to ``outdir``.

    Files: ``learning_curve.csv`` (all columns), ``return_curve.csv`` (episode
    vs return), ``utility_curve.csv`` (episode vs mean MSP utility, with the
    analytic optimum), ``checkpoint.json`` for ``drl`` and optionally
    ``trajectory.csv``.
    """
    scheme = scheme or cfg.scheme
    seed = cfg.seed if seed is None else seed
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    traj_fh = open(out / "trajectory.csv", "w", newline="") if trajectory else None
    writer = TrajectoryWriter(traj_fh, len(cfg.vmus)) if traj_fh else None
    try:
        if scheme == "drl":
            res = train(make_env(cfg), cfg.ppo, seed,
                        on_step=writer.write if writer else None)
            curve = res.curve
            save_checkpoint(out / "checkpoint.json", res.network, cfg.ppo)
        elif scheme in ("greedy", "random"):
            curve = baseline_curve(cfg, scheme, seed, cfg.ppo.episodes, writer)
        else:
            raise ConfigError(f"scheme {scheme!r} has no training curve; use 'equilibrium'")
    finally:
        if traj_fh:
            traj_fh.close()

    optimum = solve(cfg.vmus, cfg.channel, cfg.msp).msp_utility
    curve.write_csv(out / "learning_curve.csv")
    with open(out / "return_curve.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["episode", "return"])
        w.writerows((i, repr(r)) for i, r in enumerate(curve.returns))
    with open(out / "utility_curve.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["episode", "mean_msp_utility", "equilibrium_msp_utility"])
        w.writerows((i, repr(u), repr(optimum)) for i, u in enumerate(curve.mean_msp_utility))
    return curve


@dataclass(frozen=True)
class Job:
    cfg: ScenarioConfig
    axis: str
    value: float
    scheme: str
    seed: int | None


def scenario_for(template: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis == "cost":
        msp = template.msp
        return template.replace(msp=type(msp)(float(value), msp.max_bandwidth, msp.max_price))
    if axis == "vmus":
        return template.replace(vmus=[template.vmus[0]] * int(value))
    if axis == "base":
        return template
    raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {sorted(AXES)}")


def evaluate(job: Job) -> dict:
    """One sweep row; failures are recorded in the ``error`` column."""
    row = {"axis": job.axis, "axis_value": job.value, "scheme": job.scheme,
           "seed": "" if job.seed is None else job.seed, "error": ""}
    try:
        cfg = job.cfg
        if job.scheme == "analytic":
            _, rep = run_equilibrium(cfg)
            vals = (rep["price"], rep["total_bandwidth"], rep["msp_utility"], rep["mean_vmu_utility"])
        else:
            n = cfg.eval_episodes
            if job.scheme == "drl":
                curve = train(make_env(cfg), cfg.ppo, job.seed).curve
            else:
                curve = baseline_curve(cfg, job.scheme, job.seed, n)
            vals = (curve.tail_mean("mean_price", n), curve.tail_mean("mean_total_bandwidth", n),
                    curve.tail_mean("mean_msp_utility", n), curve.tail_mean("mean_vmu_utility", n))
    except (TwinPriceError, ValueError, ArithmeticError) as exc:
        log.error("sweep row %s=%s %s seed=%s failed: %s", job.axis, job.value, job.scheme, job.seed, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
        vals = (math.nan,) * 4
    price, total, u_s, vmu = vals
    row.update(price=price, total_bandwidth=total, total_bandwidth_scaled=BANDWIDTH_SCALE * total,
               msp_utility=u_s, mean_vmu_utility=vmu)
    return row


def _aggregate(rows: list[dict]) -> list[dict]:
    """Mean/min/max rows over seeds for each stochastic (axis value, scheme)."""
    out = []
    keys = []
    for r in rows:
        k = (r["axis"], r["axis_value"], r["scheme"])
        if r["scheme"] != "analytic" and k not in keys:
            keys.append(k)
    metrics = ("price", "total_bandwidth", "total_bandwidth_scaled", "msp_utility", "mean_vmu_utility")
    for k in keys:
        group = [r for r in rows if (r["axis"], r["axis_value"], r["scheme"]) == k and not r["error"]]
        if not group:
            continue
        for stat, fn in (("mean", np.mean), ("min", np.min), ("max", np.max)):
            agg = {"axis": k[0], "axis_value": k[1], "scheme": k[2], "seed": stat, "error": ""}
            agg.update({m: float(fn([g[m] for g in group])) for m in metrics})
            out.append(agg)
    return out


def sweep(template: ScenarioConfig, axis: str, schemes: Sequence[str],
          values: Iterable | None = None, seeds: Sequence[int] = DEFAULT_SEEDS,
          jobs: int = 1) -> list[dict]:
    """Rows for every (axis value, scheme, seed); analytic rows carry no seed."""
    if values is None:
        if axis not in AXES:
            raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {sorted(AXES)}")
        values = AXES[axis]
    work = []
    for v in values:
        cfg = scenario_for(template, axis, v)
        for scheme in schemes:
            if scheme == "analytic":
                work.append(Job(cfg, axis, v, scheme, None))
            else:
                work.extend(Job(cfg, axis, v, scheme, s) for s in seeds)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(evaluate, work))
    else:
        rows = [evaluate(j) for j in work]
    return rows + _aggregate(rows)


def compare(cfg: ScenarioConfig, schemes: Sequence[str] = ("analytic", "drl", "greedy", "random"),
            seeds: Sequence[int] = DEFAULT_SEEDS, jobs: int = 1) -> list[dict]:
    return sweep(cfg, "base", schemes, values=[0], seeds=seeds, jobs=jobs)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_sweep_csv(rows: list[dict], path: str | Path) -> None:
    """Versioned CSV; the first line is a ``#`` comment naming the schema version."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# twinprice-sweep v{SWEEP_VERSION}\n")
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in SWEEP_COLUMNS])


def read_sweep_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != f"# twinprice-sweep v{SWEEP_VERSION}":
            raise ConfigError(f"{path}: unsupported sweep file header {first!r}")
        return list(csv.DictReader(fh))


def summary_rows(rows: list[dict]) -> list[dict]:
    """Analytic rows plus seed means, in sweep order."""
    return [r for r in rows if r["scheme"] == "analytic" or r["seed"] == "mean"]
