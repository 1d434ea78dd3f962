"""Radio link model: OFDMA transmission rate and Age of Twin Migration (AoTM).

Unit convention
---------------
The rate factor ``log2(1 + SNR)`` is dimensionless, so the rate of a VMU is
``b * rate_factor`` in whatever unit ``b`` is measured in.  The pricing game
only has a sensible interior solution when ``D / rate_factor`` is comparable
to ``alpha / p``.  With the reference settings (alpha = 5, p in [5, 50],
rate_factor ~ 38.54) that ratio is O(0.1), which rules out measuring the twin
size in MB (D = 200 would give D / rate_factor ~ 5 and a negative demand at
every admissible price).

Measuring twin data in units of 100 MB (a 200 MB twin is ``D = 2.0``) and
bandwidth in units of 100 MHz (a 50 MHz cap is ``B_max = 0.5``) makes every
reported operating point consistent:

* two VMUs (alpha = 5, 5; D = 2, 1) at C = 5 give
  ``p* = sqrt(C * r * sum(alpha) / sum(D)) = sqrt(5 * 38.54 * 10 / 3) ~ 25.35``
  and at C = 9, ``p* ~ 34.0``;
* total demand ``sum(alpha) / p - sum(D) / r`` is 0.282 at C = 6 and 0.234 at
  C = 8, i.e. 28.2 and 23.4 once multiplied by 100;
* six identical VMUs (alpha = 5, D = 1) over-subscribe ``B_max = 0.5`` at the
  unconstrained price, and clearing the cap gives
  ``p = 30 / (0.5 + 6 / r) ~ 45.75`` and ``U_s = (p - 5) * 0.5 ~ 20.38``.

Reported bandwidth figures are therefore ``100 * b``.  AoTM itself is the
dimensionless ratio ``D / (b * r)`` under this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, InvalidParameterError

__all__ = [
    "ChannelParams",
    "rate_factor",
    "transmission_rate",
    "aotm",
    "db_to_linear",
    "dbm_to_milliwatt",
]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_milliwatt(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Link between the source and destination roadside units.

    Defaults are the reference settings: 40 dBm transmit power, -20 dB unit
    channel gain, 500 m separation, path-loss exponent 2 and -150 dBm noise.
    Linear SNR and the rate factor are computed once at construction.
    """

    transmit_power_dbm: float = 40.0
    unit_gain_db: float = -20.0
    distance_m: float = 500.0
    path_loss_exp: float = 2.0
    noise_power_dbm: float = -150.0
    snr: float = field(init=False, repr=False, compare=False)
    factor: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.distance_m > 0:
            raise InvalidParameterError(f"distance_m must be > 0, got {self.distance_m!r}")
        if not self.path_loss_exp >= 0:
            raise InvalidParameterError(
                f"path_loss_exp must be >= 0, got {self.path_loss_exp!r}"
            )
        try:
            snr = (
                dbm_to_milliwatt(self.transmit_power_dbm)
                * db_to_linear(self.unit_gain_db)
                * self.distance_m ** (-self.path_loss_exp)
                / dbm_to_milliwatt(self.noise_power_dbm)
            )
        except (OverflowError, ZeroDivisionError) as exc:
            raise InvalidParameterError(f"channel parameters overflow: {exc}") from exc
        factor = math.log1p(snr) / math.log(2.0) if math.isfinite(snr) else math.inf
        if not (math.isfinite(factor) and factor > 0):
            raise InvalidParameterError(
                f"rate factor is not a finite positive number (snr={snr!r})"
            )
        object.__setattr__(self, "snr", snr)
        object.__setattr__(self, "factor", factor)


def rate_factor(ch: ChannelParams) -> float:
    """Spectral efficiency ``log2(1 + SNR)`` of the link."""
    return ch.factor


def transmission_rate(b: float, ch: ChannelParams) -> float:
    if not b > 0:
        raise DomainError(f"bandwidth must be > 0, got {b!r}")
    return b * ch.factor


def aotm(data_size: float, rate: float) -> float:
    """Age of Twin Migration: time to push ``data_size`` through ``rate``."""
    if not data_size > 0:
        raise DomainError(f"data size must be > 0, got {data_size!r}")
    if not rate > 0:
        raise DomainError(f"rate must be > 0, got {rate!r}")
    return data_size / rate
