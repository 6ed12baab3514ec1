"""Exact inference: scaled forward/backward, Viterbi decoding and sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import DiscreteEmission


@dataclass(frozen=True)
class ForwardBackwardResult:
    """Scaled lattices for one observation sequence.

    ``alpha_hat[t]`` is the forward variable at ``t`` multiplied by
    ``prod(scale[:t+1])`` and sums to one. ``beta_hat[t]`` is the backward
    variable multiplied by ``prod(scale[t+1:])``, so that
    ``sum(alpha_hat[t] * beta_hat[t]) == 1`` for every ``t``.

    ``offset`` is nonzero only for continuous emissions, whose rows are shifted
    before scaling; then ``log_likelihood = -sum(log(scale)) + sum(offset)``.
    """

    alpha_hat: np.ndarray
    scale: np.ndarray
    log_likelihood: float
    offset: np.ndarray
    beta_hat: np.ndarray | None = None
    emission_matrix: np.ndarray | None = None

    @property
    def possible(self):
        return np.isfinite(self.log_likelihood)

    @property
    def posterior(self):
        """State posteriors ``gamma[t, i] = P(q_t = i | O)``."""
        if self.beta_hat is None:
            raise ValueError("backward pass not computed")
        return self.alpha_hat * self.beta_hat

    def unscaled_alpha(self):
        """Raw forward variables (underflows for long sequences)."""
        log_c = np.cumsum(np.log(self.scale) - self.offset)
        return self.alpha_hat * np.exp(-log_c)[:, None]

    def unscaled_beta(self):
        if self.beta_hat is None:
            raise ValueError("backward pass not computed")
        # product of scale and offset over s > t
        tail = np.concatenate([np.cumsum((np.log(self.scale) - self.offset)[::-1])[::-1][1:], [0.0]])
        return self.beta_hat * np.exp(-tail)[:, None]


def emission_matrix(model, obs):
    return model.emission.likelihoods(obs)


def forward(model, obs):
    E, offset = emission_matrix(model, obs)
    alpha, scale, ll = kernels.forward_scaled(model.initial, model.transition, E)
    if np.isfinite(ll):
        ll += offset.sum()
    return ForwardBackwardResult(alpha, scale, float(ll), offset, None, E)


def backward(model, obs):
    """Forward and backward lattices together; the backward pass reuses the
    forward scale factors."""
    fw = forward(model, obs)
    beta = kernels.backward_scaled(model.transition, fw.emission_matrix, fw.scale)
    return ForwardBackwardResult(
        fw.alpha_hat, fw.scale, fw.log_likelihood, fw.offset, beta, fw.emission_matrix
    )


forward_backward = backward


def log_likelihood(model, obs):
    return forward(model, obs).log_likelihood


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def viterbi(model, obs):
    """Most probable state path and its joint log probability.

    Among equally probable paths the lexicographically smallest is returned.
    Impossible sequences give ``-inf`` with an all-zero path.
    """
    logE = model.emission.log_likelihoods(obs)
    path, score = kernels.viterbi_log(_log(model.initial), _log(model.transition), logE)
    return path, float(score)


def path_log_probability(model, obs, path):
    """``log P[O, Q | lambda]`` for an explicit state path."""
    logE = model.emission.log_likelihoods(obs)
    path = np.asarray(path)
    lp = _log(model.initial[path[0]]) + logE[0, path[0]]
    if len(path) > 1:
        lp += _log(model.transition[path[:-1], path[1:]]).sum()
        lp += logE[np.arange(1, len(path)), path[1:]].sum()
    return float(lp)


def sample(model, length, rng):
    """Draw ``(states, observations)`` of the given length.

    ``rng`` is a ``numpy.random.Generator``; the same seed reproduces the same
    draw bit for bit.
    """
    if length < 1:
        raise ValueError("sample length must be >= 1")
    N = model.n_states
    states = np.empty(length, dtype=np.int64)
    cum_A = np.cumsum(model.transition, axis=1)
    u = rng.random(length)
    states[0] = min(np.searchsorted(np.cumsum(model.initial), u[0], side="right"), N - 1)
    for t in range(1, length):
        states[t] = min(np.searchsorted(cum_A[states[t - 1]], u[t], side="right"), N - 1)

    em = model.emission
    if isinstance(em, DiscreteEmission):
        cum_B = np.cumsum(em.table, axis=1)
        v = rng.random(length)
        K = em.n_symbols
        obs = np.array(
            [min(np.searchsorted(cum_B[s], x, side="right"), K - 1) for s, x in zip(states, v)],
            dtype=np.int64,
        )
        return states, obs
    cum_w = np.cumsum(em.weights, axis=1)
    v = rng.random(length)
    comps = np.array(
        [min(np.searchsorted(cum_w[s], x, side="right"), em.n_mix - 1) for s, x in zip(states, v)]
    )
    z = rng.standard_normal((length, em.dim))
    obs = em.means[states, comps] + z * np.sqrt(em.variances[states, comps])
    return states, obs
