"""Pure-numpy inference kernels.

All kernels take the per-step emission likelihood matrix ``E`` (T x N) so the
same code serves discrete and Gaussian-mixture emissions. The loop over time
stays in Python; work across states is vectorized.
"""

import numpy as np

TIE_RTOL = 1e-12


def forward_scaled(pi, A, E):
    """Scaled forward pass.

    Returns ``(alpha_hat, scale, loglik)`` where ``alpha_hat[t]`` sums to one
    and ``scale[t]`` is the multiplier that normalized step ``t``. An
    impossible sequence yields ``loglik = -inf``, zero rows from the failing
    step on and ``scale = inf`` there.
    """
    T, N = E.shape
    alpha = np.zeros((T, N))
    scale = np.empty(T)
    row = pi * E[0]
    for t in range(T):
        if t > 0:
            row = (alpha[t - 1] @ A) * E[t]
        s = row.sum()
        if not s > 0.0:
            scale[t:] = np.inf
            return alpha, scale, -np.inf
        scale[t] = 1.0 / s
        alpha[t] = row * scale[t]
    return alpha, scale, -np.log(scale).sum()


def backward_scaled(A, E, scale):
    """Scaled backward pass sharing the forward scale factors.

    With ``beta_hat[T-1] = 1`` and ``beta_hat[t] = scale[t+1] * A @ (E[t+1] *
    beta_hat[t+1])``, every row satisfies ``sum(alpha_hat[t] * beta_hat[t]) ==
    1``.
    """
    T, N = E.shape
    beta = np.zeros((T, N))
    if not np.all(np.isfinite(scale)):
        return beta
    beta[T - 1] = 1.0
    for t in range(T - 2, -1, -1):
        beta[t] = (A @ (E[t + 1] * beta[t + 1])) * scale[t + 1]
    return beta


def transition_counts(alpha, beta, A, E, scale):
    """Expected transition counts summed over time (the xi sum)."""
    T, N = E.shape
    xi = np.zeros((N, N))
    for t in range(T - 1):
        w = E[t + 1] * beta[t + 1] * scale[t + 1]
        xi += np.outer(alpha[t], w)
    return xi * A


def _first_max(values):
    best = values.max()
    if best == -np.inf:
        return 0, best
    tol = TIE_RTOL * max(1.0, abs(best))
    idx = int(np.flatnonzero(values >= best - tol)[0])
    return idx, values[idx]


def viterbi_log(log_pi, log_A, log_E):
    """Max-product decoding returning the lexicographically smallest optimum.

    A backward pass stores the best log score obtainable from each (t, state);
    the path is then traced forward taking the lowest state index among
    (near-)ties at every step.
    """
    T, N = log_E.shape
    togo = np.zeros((T, N))
    for t in range(T - 2, -1, -1):
        togo[t] = (log_A + (log_E[t + 1] + togo[t + 1])[None, :]).max(axis=1)
    path = np.zeros(T, dtype=np.int64)
    state, score = _first_max(log_pi + log_E[0] + togo[0])
    path[0] = state
    for t in range(1, T):
        state, _ = _first_max(log_A[path[t - 1]] + log_E[t] + togo[t])
        path[t] = state
    return path, score


def batch_loglik_discrete(pi, A, B, symbols, bounds):
    """Log-likelihood of every sequence packed into ``symbols``; sequence
    ``n`` spans ``symbols[bounds[n]:bounds[n+1]]``."""
    n_seq = bounds.shape[0] - 1
    out = np.empty(n_seq)
    for n in range(n_seq):
        E = B[:, symbols[bounds[n]:bounds[n + 1]]].T
        out[n] = forward_scaled(pi, A, E)[2]
    return out
