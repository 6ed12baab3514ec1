"""numba-compiled inference kernels, loop-for-loop equivalents of
``_kernels_numpy``."""

import numpy as np
from numba import njit

TIE_RTOL = 1e-12


@njit(cache=True)
def forward_scaled(pi, A, E):
    T, N = E.shape
    alpha = np.zeros((T, N))
    scale = np.empty(T)
    for t in range(T):
        s = 0.0
        for j in range(N):
            if t == 0:
                v = pi[j]
            else:
                v = 0.0
                for i in range(N):
                    v += alpha[t - 1, i] * A[i, j]
            v *= E[t, j]
            alpha[t, j] = v
            s += v
        if not s > 0.0:
            for u in range(t, T):
                scale[u] = np.inf
                for j in range(N):
                    alpha[u, j] = 0.0
            return alpha, scale, -np.inf
        c = 1.0 / s
        scale[t] = c
        for j in range(N):
            alpha[t, j] *= c
    loglik = 0.0
    for t in range(T):
        loglik -= np.log(scale[t])
    return alpha, scale, loglik


@njit(cache=True)
def backward_scaled(A, E, scale):
    T, N = E.shape
    beta = np.zeros((T, N))
    for t in range(T):
        if not np.isfinite(scale[t]):
            return beta
    for j in range(N):
        beta[T - 1, j] = 1.0
    w = np.empty(N)
    for t in range(T - 2, -1, -1):
        for j in range(N):
            w[j] = E[t + 1, j] * beta[t + 1, j]
        for i in range(N):
            v = 0.0
            for j in range(N):
                v += A[i, j] * w[j]
            beta[t, i] = v * scale[t + 1]
    return beta


@njit(cache=True)
def transition_counts(alpha, beta, A, E, scale):
    T, N = E.shape
    xi = np.zeros((N, N))
    for t in range(T - 1):
        for j in range(N):
            w = E[t + 1, j] * beta[t + 1, j] * scale[t + 1]
            for i in range(N):
                xi[i, j] += alpha[t, i] * w
    for i in range(N):
        for j in range(N):
            xi[i, j] *= A[i, j]
    return xi


@njit(cache=True)
def _first_max(values):
    best = -np.inf
    for v in values:
        if v > best:
            best = v
    if best == -np.inf:
        return 0, best
    tol = TIE_RTOL * max(1.0, abs(best))
    for i in range(values.shape[0]):
        if values[i] >= best - tol:
            return i, values[i]
    return 0, best


@njit(cache=True)
def viterbi_log(log_pi, log_A, log_E):
    T, N = log_E.shape
    togo = np.zeros((T, N))
    for t in range(T - 2, -1, -1):
        for i in range(N):
            best = -np.inf
            for j in range(N):
                v = log_A[i, j] + log_E[t + 1, j] + togo[t + 1, j]
                if v > best:
                    best = v
            togo[t, i] = best
    path = np.zeros(T, dtype=np.int64)
    state, score = _first_max(log_pi + log_E[0] + togo[0])
    path[0] = state
    for t in range(1, T):
        state, _ = _first_max(log_A[path[t - 1]] + log_E[t] + togo[t])
        path[t] = state
    return path, score


@njit(cache=True)
def batch_loglik_discrete(pi, A, B, symbols, bounds):
    N = pi.shape[0]
    n_seq = bounds.shape[0] - 1
    out = np.empty(n_seq)
    row = np.empty(N)
    prev = np.empty(N)
    for n in range(n_seq):
        ll = 0.0
        for t in range(bounds[n], bounds[n + 1]):
            o = symbols[t]
            s = 0.0
            for j in range(N):
                if t == bounds[n]:
                    v = pi[j]
                else:
                    v = 0.0
                    for i in range(N):
                        v += prev[i] * A[i, j]
                v *= B[j, o]
                row[j] = v
                s += v
            if not s > 0.0:
                ll = -np.inf
                break
            for j in range(N):
                prev[j] = row[j] / s
            ll += np.log(s)
        out[n] = ll
    return out
