"""Pure numpy kernels for the shared-trunk actor-critic network.

Flat parameter layout (float64, row-major)::

    W1 (d, h1) | b1 (h1) | W2 (h1, h2) | b2 (h2) | w_mu (h2) | b_mu | w_v (h2) | b_v | log_std

This module is the fallback for the compiled kernel and must stay numerically
interchangeable with it.
"""

from __future__ import annotations

import math

import numpy as np

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def n_params(d: int, h1: int, h2: int) -> int:
    return d * h1 + h1 + h1 * h2 + h2 + h2 + 1 + h2 + 1 + 1


def unpack(theta: np.ndarray, d: int, h1: int, h2: int):
    i = 0
    out = []
    for shape in ((d, h1), (h1,), (h1, h2), (h2,), (h2,), (), (h2,), (), ()):
        size = int(np.prod(shape)) if shape else 1
        chunk = theta[i:i + size]
        out.append(chunk.reshape(shape) if shape else chunk[0])
        i += size
    return out


def forward(theta, d, h1, h2, x):
    """Policy mean (pre-squash) and value for a batch ``x`` of shape (B, d)."""
    W1, b1, W2, b2, wmu, bmu, wv, bv, _ = unpack(theta, d, h1, h2)
    z1 = np.tanh(x @ W1 + b1)
    z2 = np.tanh(z1 @ W2 + b2)
    return z2 @ wmu + bmu, z2 @ wv + bv


def forward_one(theta, d, h1, h2, x):
    mu, v = forward(theta, d, h1, h2, x[None, :])
    return float(mu[0]), float(v[0])


def loss_and_grad(theta, d, h1, h2, x, u, logp_old, adv, ret,
                  clip_eps, value_coef, entropy_coef):
    """PPO-clip loss to be minimised and its gradient.

    ``u`` are pre-squash actions and ``logp_old`` their Gaussian log-density
    under the sampling parameters.  The squashing Jacobian is identical under
    old and new parameters, so it cancels in the ratio and is left out.

    Returns ``(loss, grad, stats)`` with
    ``stats = [policy_objective, value_loss, mean_ratio, max_ratio, clip_frac]``.
    """
    W1, b1, W2, b2, wmu, bmu, wv, bv, log_std = unpack(theta, d, h1, h2)
    n = x.shape[0]
    z1 = np.tanh(x @ W1 + b1)
    z2 = np.tanh(z1 @ W2 + b2)
    mu = z2 @ wmu + bmu
    v = z2 @ wv + bv

    inv_var = math.exp(-2.0 * log_std)
    diff = u - mu
    logp = -0.5 * diff * diff * inv_var - log_std - LOG_SQRT_2PI
    ratio = np.exp(logp - logp_old)
    lo, hi = 1.0 - clip_eps, 1.0 + clip_eps
    clipped = np.minimum(np.maximum(ratio, lo), hi)
    surr1 = ratio * adv
    surr2 = clipped * adv
    obj = np.minimum(surr1, surr2)
    # Gradient flows only through the unclipped branch when it is the minimum.
    live = surr1 <= surr2
    g_logp = np.where(live, -surr1, 0.0) / n

    verr = v - ret
    value_loss = float(np.mean(verr * verr))
    entropy = log_std + 0.5 + LOG_SQRT_2PI
    loss = -float(obj.mean()) + value_coef * value_loss - entropy_coef * entropy

    g_mu = g_logp * diff * inv_var
    g_logstd = float(np.sum(g_logp * (diff * diff * inv_var - 1.0))) - entropy_coef
    g_v = (2.0 * value_coef / n) * verr

    g_z2 = np.outer(g_mu, wmu) + np.outer(g_v, wv)
    g_a2 = g_z2 * (1.0 - z2 * z2)
    g_z1 = g_a2 @ W2.T
    g_a1 = g_z1 * (1.0 - z1 * z1)

    grad = np.concatenate([
        (x.T @ g_a1).ravel(), g_a1.sum(0),
        (z1.T @ g_a2).ravel(), g_a2.sum(0),
        g_mu @ z2, [g_mu.sum()],
        g_v @ z2, [g_v.sum()],
        [g_logstd],
    ])
    stats = np.array([
        float(obj.mean()), value_loss, float(ratio.mean()), float(ratio.max()),
        float(np.mean(np.abs(ratio - 1.0) > clip_eps)),
    ])
    return loss, grad, stats
