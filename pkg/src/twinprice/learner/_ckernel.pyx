# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the shared-trunk actor-critic network.

Same flat parameter layout and return conventions as ``_pykernel``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport tanh, exp, log, M_PI, fabs
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

cdef double LOG_SQRT_2PI = 0.5 * log(2.0 * M_PI)


cdef void _trunk(const double* th, Py_ssize_t d, Py_ssize_t h1, Py_ssize_t h2,
                 const double* x, double* z1, double* z2,
                 double* mu, double* v) noexcept nogil:
    # Row-major weights; accumulate in axpy order so the inner loop is contiguous.
    cdef Py_ssize_t i, j
    cdef const double* W1 = th
    cdef const double* b1 = th + d * h1
    cdef const double* W2 = b1 + h1
    cdef const double* b2 = W2 + h1 * h2
    cdef const double* wmu = b2 + h2
    cdef const double* wv = wmu + h2 + 1
    cdef double xi, m, vv
    for j in range(h1):
        z1[j] = b1[j]
    for i in range(d):
        xi = x[i]
        for j in range(h1):
            z1[j] += xi * W1[i * h1 + j]
    for j in range(h1):
        z1[j] = tanh(z1[j])
    for j in range(h2):
        z2[j] = b2[j]
    for i in range(h1):
        xi = z1[i]
        for j in range(h2):
            z2[j] += xi * W2[i * h2 + j]
    m = wmu[h2]
    vv = wv[h2]
    for j in range(h2):
        z2[j] = tanh(z2[j])
        m += z2[j] * wmu[j]
        vv += z2[j] * wv[j]
    mu[0] = m
    v[0] = vv


def forward_one(const double[::1] theta, Py_ssize_t d, Py_ssize_t h1, Py_ssize_t h2,
                const double[::1] x):
    cdef double[::1] z1 = np.empty(h1)
    cdef double[::1] z2 = np.empty(h2)
    cdef double mu, v
    _trunk(&theta[0], d, h1, h2, &x[0], &z1[0], &z2[0], &mu, &v)
    return mu, v


def forward(const double[::1] theta, Py_ssize_t d, Py_ssize_t h1, Py_ssize_t h2,
            const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], k
    cdef double[::1] z1 = np.empty(h1)
    cdef double[::1] z2 = np.empty(h2)
    mu_arr = np.empty(n)
    v_arr = np.empty(n)
    cdef double[::1] mu = mu_arr
    cdef double[::1] v = v_arr
    for k in range(n):
        _trunk(&theta[0], d, h1, h2, &x[k, 0], &z1[0], &z2[0], &mu[k], &v[k])
    return mu_arr, v_arr


cdef inline void _mm(bint ta, bint tb, int M, int N, int K,
                     const double* A, const double* B, double* C, double beta) noexcept nogil:
    # Row-major C (M x N) = op(A) @ op(B) + beta * C, mapped onto column-major dgemm.
    cdef char ca = b'T' if ta else b'N'
    cdef char cb = b'T' if tb else b'N'
    cdef int lda = M if ta else K
    cdef int ldb = K if tb else N
    cdef int ldc = N
    cdef double one = 1.0
    dgemm(&cb, &ca, &N, &M, &K, &one, <double*>B, &ldb, <double*>A, &lda, &beta, C, &ldc)


def loss_and_grad(const double[::1] theta, Py_ssize_t d, Py_ssize_t h1, Py_ssize_t h2,
                  const double[:, ::1] x, const double[::1] u, const double[::1] logp_old,
                  const double[::1] adv, const double[::1] ret,
                  double clip_eps, double value_coef, double entropy_coef):
    cdef Py_ssize_t n = x.shape[0], k, i, j
    cdef Py_ssize_t P = theta.shape[0]
    cdef Py_ssize_t oW1 = 0, ob1 = d * h1, oW2 = ob1 + h1, ob2 = oW2 + h1 * h2
    cdef Py_ssize_t omu = ob2 + h2, obmu = omu + h2, ov = obmu + 1, obv = ov + h2
    cdef Py_ssize_t ols = obv + 1
    grad_arr = np.zeros(P)
    cdef double[::1] g = grad_arr
    cdef double[:, ::1] Z1 = np.empty((n, h1))
    cdef double[:, ::1] Z2 = np.empty((n, h2))
    cdef double[::1] gmu = np.empty(n)
    cdef double[::1] gv = np.empty(n)
    cdef const double* th = &theta[0]
    cdef double* gp = &g[0]
    cdef double* z1 = &Z1[0, 0]
    cdef double* z2 = &Z2[0, 0]
    cdef double log_std = theta[ols]
    cdef double inv_var = exp(-2.0 * log_std)
    cdef double lo = 1.0 - clip_eps, hi = 1.0 + clip_eps
    cdef double mu, v, diff, logp, ratio, clipped, s1, s2, obj_sum = 0.0
    cdef double verr, vl_sum = 0.0, r_sum = 0.0, r_max = -1.0, n_clip = 0.0
    cdef double g_logp, g_ls = 0.0, inv_n = 1.0 / n, t
    cdef double* row
    cdef double[:, ::1] GZ1 = np.empty((n, h1))
    cdef double* pg1 = &GZ1[0, 0]

    with nogil:
        # Forward: Z1 = tanh(X W1 + b1), Z2 = tanh(Z1 W2 + b2).
        for k in range(n):
            row = z1 + k * h1
            for j in range(h1):
                row[j] = th[ob1 + j]
        _mm(False, False, n, h1, d, &x[0, 0], th + oW1, z1, 1.0)
        for k in range(n * h1):
            z1[k] = tanh(z1[k])
        for k in range(n):
            row = z2 + k * h2
            for j in range(h2):
                row[j] = th[ob2 + j]
        _mm(False, False, n, h2, h1, z1, th + oW2, z2, 1.0)
        for k in range(n * h2):
            z2[k] = tanh(z2[k])

        for k in range(n):
            row = z2 + k * h2
            mu = th[obmu]
            v = th[obv]
            for j in range(h2):
                mu += row[j] * th[omu + j]
                v += row[j] * th[ov + j]
            diff = u[k] - mu
            logp = -0.5 * diff * diff * inv_var - log_std - LOG_SQRT_2PI
            ratio = exp(logp - logp_old[k])
            clipped = ratio
            if clipped < lo:
                clipped = lo
            elif clipped > hi:
                clipped = hi
            s1 = ratio * adv[k]
            s2 = clipped * adv[k]
            # Gradient flows only through the unclipped branch when it is the minimum.
            if s1 <= s2:
                obj_sum += s1
                g_logp = -s1 * inv_n
            else:
                obj_sum += s2
                g_logp = 0.0
            r_sum += ratio
            if ratio > r_max:
                r_max = ratio
            if fabs(ratio - 1.0) > clip_eps:
                n_clip += 1.0
            verr = v - ret[k]
            vl_sum += verr * verr
            gmu[k] = g_logp * diff * inv_var
            gv[k] = 2.0 * value_coef * inv_n * verr
            g_ls += g_logp * (diff * diff * inv_var - 1.0)

        # Heads, then dZ2 -> dA2 in place in Z2.
        for k in range(n):
            row = z2 + k * h2
            for j in range(h2):
                gp[omu + j] += gmu[k] * row[j]
                gp[ov + j] += gv[k] * row[j]
                t = row[j]
                row[j] = (gmu[k] * th[omu + j] + gv[k] * th[ov + j]) * (1.0 - t * t)
                gp[ob2 + j] += row[j]
            gp[obmu] += gmu[k]
            gp[obv] += gv[k]
        gp[ols] = g_ls - entropy_coef

        _mm(True, False, h1, h2, n, z1, z2, gp + oW2, 0.0)
        # dZ1 = dA2 W2^T, scaled by tanh' of Z1 (overwrites Z1 after its last use).
        for k in range(n * h1):
            t = z1[k]
            z1[k] = 1.0 - t * t
        _mm(False, True, n, h1, h2, z2, th + oW2, pg1, 0.0)
        for k in range(n * h1):
            pg1[k] *= z1[k]
        for k in range(n):
            row = pg1 + k * h1
            for j in range(h1):
                gp[ob1 + j] += row[j]
        _mm(True, False, d, h1, n, &x[0, 0], pg1, gp + oW1, 0.0)

    cdef double entropy = log_std + 0.5 + LOG_SQRT_2PI
    cdef double vloss = vl_sum * inv_n
    cdef double loss = -obj_sum * inv_n + value_coef * vloss - entropy_coef * entropy
    stats = np.array([obj_sum * inv_n, vloss, r_sum * inv_n, r_max, n_clip * inv_n])
    return loss, grad_arr, stats
