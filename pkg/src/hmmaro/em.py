"""Baum-Welch re-estimation for discrete and Gaussian-mixture HMMs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .inference import backward
from .model import VARIANCE_FLOOR, DiscreteEmission, GaussianMixtureEmission, HmmModel

MONOTONE_SLACK = 1e-9


class ImpossibleSequenceError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 100
    loglik_tolerance: float = 1e-6
    min_row_mass: float = 1e-6
    variance_floor: float = VARIANCE_FLOOR

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.loglik_tolerance < 0:
            raise ValueError("loglik_tolerance must be >= 0")
        if self.min_row_mass < 0:
            raise ValueError("min_row_mass must be >= 0")


@dataclass(frozen=True)
class ReestimateOutput:
    model: HmmModel
    old_loglik: float
    new_loglik: float


def _posteriors(model, obs, index=None):
    fb = backward(model, obs)
    if not fb.possible:
        where = "" if index is None else f" (sequence {index})"
        raise ImpossibleSequenceError(f"impossible sequence under the model{where}")
    return fb


def mixture_responsibility(model, obs):
    """``gamma[t, j, k]``: posterior of state ``j`` and mixture component ``k``
    at time ``t``.

    The state posterior is multiplied by the component's share of the state's
    emission density at ``o_t``.
    """
    em = model.emission
    if not isinstance(em, GaussianMixtureEmission):
        raise TypeError("mixture responsibilities need Gaussian-mixture emissions")
    fb = _posteriors(model, obs)
    return _mixture_responsibility(em, obs, fb.posterior)


def _mixture_responsibility(em, obs, gamma):
    comp = em.component_log_densities(obs)
    top = comp.max(axis=2, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    share = np.exp(comp - top)
    total = share.sum(axis=2, keepdims=True)
    share = np.divide(share, total, out=np.zeros_like(share), where=total > 0)
    return gamma[:, :, None] * share


def _floored_rows(ml, old, floor):
    """Pull each re-estimated row toward the previous row just far enough that
    every entry is at least ``min(floor, previous entry)``.

    The expected complete-data log-likelihood is concave in each row, so any
    point on the segment between the maximizer and the previous row scores at
    least as well as the previous row. That keeps the likelihood monotone,
    unlike clip-and-renormalize.
    """
    if floor <= 0:
        return ml
    target = np.minimum(floor, old)
    gap = old - ml
    need = np.where((ml < target) & (gap > 0), (target - ml) / np.where(gap > 0, gap, 1.0), 0.0)
    eps = np.clip(need.max(axis=-1, keepdims=True), 0.0, 1.0)
    out = (1.0 - eps) * ml + eps * old
    return out / out.sum(axis=-1, keepdims=True)


def _normalize_or_keep(num, old):
    den = num.sum(axis=-1, keepdims=True)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, old)


def bw_step(model, dataset, config=None):
    """One Baum-Welch update over every sequence in ``dataset``.

    Expected counts are accumulated across sequences before normalizing.
    In terms of the scaled lattices (rows of ``alpha_hat * beta_hat`` sum to
    one) the updates are

    * initial:     mean over sequences of gamma_1(i)
    * transition:  sum_t xi_t(i, j) / sum_t gamma_t(i), t < T, with
      xi_t(i, j) = alpha_hat_t(i) a_ij b_j(o_t+1) beta_hat_t+1(j) scale_t+1
    * discrete:    sum_{t: o_t = v} gamma_t(j) / sum_t gamma_t(j)
    * mixtures:    weights, means and diagonal variances from the mixture
      responsibilities; variances are taken about the new means.
    """
    config = config or TrainConfig()
    if not dataset:
        raise ValueError("dataset must contain at least one sequence")
    N = model.n_states
    em = model.emission
    discrete = isinstance(em, DiscreteEmission)

    pi_num = np.zeros(N)
    A_num = np.zeros((N, N))
    if discrete:
        B_num = np.zeros((N, em.n_symbols))
    else:
        M, d = em.n_mix, em.dim
        occ = np.zeros((N, M))
        first = np.zeros((N, M, d))
        obs_list, resp_list = [], []
    old_ll = 0.0

    for n, obs in enumerate(dataset):
        fb = _posteriors(model, obs, n)
        old_ll += fb.log_likelihood
        gamma = fb.posterior
        pi_num += gamma[0]
        A_num += kernels.transition_counts(
            fb.alpha_hat, fb.beta_hat, model.transition, fb.emission_matrix, fb.scale
        )
        if discrete:
            o = em.check_observations(obs)
            np.add.at(B_num.T, o, gamma)
        else:
            o = em.check_observations(obs)
            r = _mixture_responsibility(em, o, gamma)
            occ += r.sum(axis=0)
            first += np.einsum("tjk,td->jkd", r, o)
            obs_list.append(o)
            resp_list.append(r)

    floor = config.min_row_mass
    pi_new = _floored_rows(pi_num / len(dataset), model.initial, floor)
    A_new = _floored_rows(_normalize_or_keep(A_num, model.transition), model.transition, floor)

    if discrete:
        B_new = _floored_rows(_normalize_or_keep(B_num, em.table), em.table, floor)
        emission = DiscreteEmission(B_new)
    else:
        w_new = _floored_rows(_normalize_or_keep(occ, em.weights), em.weights, floor)
        safe = np.where(occ > 0, occ, 1.0)[..., None]
        mu_new = np.where(occ[..., None] > 0, first / safe, em.means)
        second = np.zeros((N, M, d))
        for o, r in zip(obs_list, resp_list):
            diff = o[:, None, None, :] - mu_new[None]
            second += np.einsum("tjk,tjkd->jkd", r, diff * diff)
        var_ml = np.where(occ[..., None] > 0, second / safe, em.variances)
        var_new = np.maximum(var_ml, np.minimum(config.variance_floor, em.variances))
        emission = GaussianMixtureEmission(w_new, mu_new, var_new)

    new_model = model.replace(initial=pi_new, transition=A_new, emission=emission)
    new_ll = sum(backward(new_model, obs).log_likelihood for obs in dataset)
    return ReestimateOutput(new_model, float(old_ll), float(new_ll))


def train_bw(model, dataset, config=None):
    """Iterate :func:`bw_step` until the total log-likelihood gain drops below
    ``loglik_tolerance`` or ``max_iterations`` updates have been made.

    Returns ``(model, history)`` where ``history[0]`` is the starting
    log-likelihood and ``history[i]`` the value after update ``i``.
    """
    config = config or TrainConfig()
    history = []
    for _ in range(config.max_iterations):
        step = bw_step(model, dataset, config)
        if not history:
            history.append(step.old_loglik)
        history.append(step.new_loglik)
        model = step.model
        if step.new_loglik - step.old_loglik < config.loglik_tolerance:
            break
    return model, history


def history_csv(history):
    """Training history as CSV text with columns iteration,total_loglik,delta."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "total_loglik", "delta"])
    prev = None
    for i, ll in enumerate(history):
        delta = "" if prev is None else repr(ll - prev)
        w.writerow([i, repr(ll), delta])
        prev = ll
    return buf.getvalue()
