"""Actor-critic network with a shared tanh trunk and a squashed Gaussian policy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import ModuleType

import numpy as np

from . import _backend, _pykernel
from ..errors import NumericalError

LOG_SQRT_2PI = _pykernel.LOG_SQRT_2PI


def _log_sigmoid_jacobian(u: float | np.ndarray) -> float | np.ndarray:
    """``log(sigmoid(u) * (1 - sigmoid(u)))`` computed without overflow."""
    a = np.abs(u)
    return -a - 2.0 * np.log1p(np.exp(-a))


def _sigmoid(u: float) -> float:
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


@dataclass
class PolicyNetwork:
    """Parameters and shape of the policy/value approximator.

    The pre-squash action ``u ~ N(mu(o), exp(log_std)^2)`` is mapped onto the
    price interval by ``low + (high - low) * sigmoid(u)``.  ``log_std`` is a
    single state-independent parameter stored as the last entry of ``theta``.
    """

    theta: np.ndarray
    input_dim: int
    hidden: tuple[int, int]
    low: float
    high: float

    @classmethod
    def initialize(cls, input_dim: int, low: float, high: float, rng: np.random.Generator,
                   hidden: tuple[int, int] = (64, 64), log_std: float = -0.5) -> "PolicyNetwork":
        h1, h2 = hidden
        parts = [
            _orthogonal(rng, input_dim, h1, math.sqrt(2.0)), np.zeros(h1),
            _orthogonal(rng, h1, h2, math.sqrt(2.0)), np.zeros(h2),
            _orthogonal(rng, h2, 1, 0.01).ravel(), np.zeros(1),
            _orthogonal(rng, h2, 1, 1.0).ravel(), np.zeros(1),
            np.array([log_std]),
        ]
        theta = np.ascontiguousarray(np.concatenate([p.ravel() for p in parts]))
        return cls(theta, input_dim, (h1, h2), float(low), float(high))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.input_dim, self.hidden[0], self.hidden[1]

    @property
    def log_std(self) -> float:
        return float(self.theta[-1])

    @property
    def n_params(self) -> int:
        return self.theta.size

    def copy(self) -> "PolicyNetwork":
        return PolicyNetwork(self.theta.copy(), self.input_dim, self.hidden, self.low, self.high)

    def forward(self, x: np.ndarray, kernel: ModuleType | None = None):
        k = kernel or _backend.kernel
        x = np.ascontiguousarray(np.atleast_2d(x), dtype=float)
        return k.forward(self.theta, *self.dims, x)

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[1]

    def squash(self, u: float) -> float:
        return self.low + (self.high - self.low) * _sigmoid(u)

    def log_prob(self, u: float | np.ndarray, mu: float | np.ndarray) -> float | np.ndarray:
        """Log-density of the price ``squash(u)`` given the pre-squash mean ``mu``."""
        ls = self.log_std
        z = (u - mu) / math.exp(ls)
        return (-0.5 * z * z - ls - LOG_SQRT_2PI
                - math.log(self.high - self.low) - _log_sigmoid_jacobian(u))

    def act(self, x: np.ndarray, rng: np.random.Generator) -> tuple[float, float, float, float]:
        """Sample a price for one normalised observation.

        Returns ``(price, log_prob, value, u)`` where ``u`` is the pre-squash
        sample, kept so the density can be re-evaluated without inverting the
        sigmoid.
        """
        x = np.ascontiguousarray(x, dtype=float)
        mu, v = _backend.kernel.forward_one(self.theta, *self.dims, x)
        if not (math.isfinite(mu) and math.isfinite(v)):
            raise NumericalError(f"network produced non-finite output mu={mu!r} v={v!r}")
        u = mu + math.exp(self.log_std) * rng.standard_normal()
        price = min(max(self.squash(u), self.low), self.high)
        return price, float(self.log_prob(u, mu)), v, u

    def mean_price(self, x: np.ndarray) -> float:
        mu, _ = _backend.kernel.forward_one(self.theta, *self.dims, np.ascontiguousarray(x, dtype=float))
        return self.squash(mu)


def _orthogonal(rng: np.random.Generator, n_in: int, n_out: int, gain: float) -> np.ndarray:
    a = rng.standard_normal((max(n_in, n_out), min(n_in, n_out)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if n_in < n_out:
        q = q.T
    return gain * q[:n_in, :n_out]


class Adam:
    """Adaptive moment estimation over a flat parameter vector (in place)."""

    def __init__(self, n: int, lr: float, betas: tuple[float, float] = (0.9, 0.999),
                 eps: float = 1e-8):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.m = np.zeros(n)
        self.v = np.zeros(n)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m *= self.b1
        self.m += (1.0 - self.b1) * grad
        self.v *= self.b2
        self.v += (1.0 - self.b2) * grad * grad
        m_hat = self.m / (1.0 - self.b1 ** self.t)
        v_hat = self.v / (1.0 - self.b2 ** self.t)
        theta -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
