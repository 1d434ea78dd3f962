"""Scenario configuration: YAML on disk, validated dataclasses in memory.

Grammar (all sections optional except ``vmus``)::

    seed: 7                 # integer
    scheme: drl             # drl | greedy | random | analytic
    max_vmus: 6
    eval_episodes: 50       # episodes averaged for greedy/random and DRL tails
    explore_eps: 0.1        # greedy exploration probability
    channel:
      transmit_power_dbm: 40
      unit_gain_db: -20
      distance_m: 500
      path_loss_exp: 2
      noise_power_dbm: -150
    msp:
      cost: 5
      max_bandwidth: 0.5    # 100 MHz units (50 MHz)
      max_price: 50
    vmus:                   # one entry per follower; data_size in 100 MB units
      - {alpha: 5, data_size: 2}
      - {alpha: 5, data_size: 1}
    ppo:                    # any PpoHyperparams field
      episodes: 500
      learning_rate: 3.0e-4
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from ..channel import ChannelParams
from ..errors import ConfigError
from ..game import MspConfig, VmuProfile
from ..learner import PpoHyperparams

SCHEMES = ("drl", "greedy", "random", "analytic")


@dataclass
class ScenarioConfig:
    vmus: list[VmuProfile]
    channel: ChannelParams = field(default_factory=ChannelParams)
    msp: MspConfig = field(default_factory=MspConfig)
    ppo: PpoHyperparams = field(default_factory=PpoHyperparams)
    seed: int = 7
    scheme: str = "drl"
    max_vmus: int = 6
    eval_episodes: int = 50
    explore_eps: float = 0.1

    def __post_init__(self) -> None:
        if not 1 <= len(self.vmus) <= self.max_vmus:
            raise ConfigError(
                f"vmus: need between 1 and {self.max_vmus} followers, got {len(self.vmus)}"
            )
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme: expected one of {SCHEMES}, got {self.scheme!r}")
        if self.eval_episodes < 1:
            raise ConfigError("eval_episodes: must be >= 1")
        if not 0.0 <= self.explore_eps <= 1.0:
            raise ConfigError("explore_eps: must lie in [0, 1]")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        ch = {f.name: getattr(self.channel, f.name) for f in fields(ChannelParams) if f.init}
        return {
            "seed": self.seed,
            "scheme": self.scheme,
            "max_vmus": self.max_vmus,
            "eval_episodes": self.eval_episodes,
            "explore_eps": self.explore_eps,
            "channel": ch,
            "msp": dataclasses.asdict(self.msp),
            "vmus": [dataclasses.asdict(v) for v in self.vmus],
            "ppo": self.ppo.to_dict(),
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False))


def _section(cls, raw: Any, name: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(raw).__name__}")
    allowed = {f.name for f in fields(cls) if f.init}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"{name}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def from_dict(raw: Any) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a mapping")
    top = {"seed", "scheme", "max_vmus", "eval_episodes", "explore_eps",
           "channel", "msp", "vmus", "ppo"}
    unknown = set(raw) - top
    if unknown:
        raise ConfigError(f"top level: unknown field(s) {sorted(unknown)}")
    vmus_raw = raw.get("vmus")
    if not isinstance(vmus_raw, list):
        raise ConfigError("vmus: expected a list of {alpha, data_size} mappings")
    vmus = [_section(VmuProfile, v, f"vmus[{i}]") for i, v in enumerate(vmus_raw)]
    kwargs = {k: raw[k] for k in ("seed", "scheme", "max_vmus", "eval_episodes", "explore_eps")
              if k in raw}
    for key, typ in (("seed", int), ("max_vmus", int), ("eval_episodes", int)):
        if key in kwargs and (not isinstance(kwargs[key], int) or isinstance(kwargs[key], bool)):
            raise ConfigError(f"{key}: expected an integer, got {kwargs[key]!r}")
    return ScenarioConfig(
        vmus=vmus,
        channel=_section(ChannelParams, raw.get("channel"), "channel"),
        msp=_section(MspConfig, raw.get("msp"), "msp"),
        ppo=_section(PpoHyperparams, raw.get("ppo"), "ppo"),
        **kwargs,
    )


def loads(text: str, source: str = "<string>") -> ScenarioConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{source}: YAML syntax error at {where}: {getattr(exc, 'problem', exc)}") from exc
    try:
        return from_dict(raw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return loads(text, str(path))
