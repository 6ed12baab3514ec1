"""Bridge from real vectors to discrete HMMs scored by log-odds or
sum-of-pairs.

Vector layout: ``[pi (N), A row-major (N*N), B row-major (N*K)]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..model import HmmModel
from ..objectives import LN2, DegenerateNullError, align, null_model, sop_raw
from .base import CountingObjective
from .codec import Codec

PARAM_FLOOR = 1e-6


@dataclass(frozen=True)
class HmmShape:
    n_states: int
    n_symbols: int

    @property
    def n_params(self):
        N, K = self.n_states, self.n_symbols
        return N + N * N + N * K

    def codec(self, int_bits=1, frac_bits=10):
        """Codec whose initial draws cover ``[0, 1]`` for every parameter."""
        return Codec(self.n_params, int_bits, frac_bits, lower=0.0, upper=1.0)


def _rows(raw):
    raw = np.maximum(raw, 0.0) + PARAM_FLOOR
    return raw / raw.sum(axis=-1, keepdims=True)


def vector_to_model(x, shape, alphabet=None):
    """Clamp negatives to zero, add a small floor and renormalize each
    stochastic row. Always yields a valid model."""
    x = np.asarray(x, dtype=float)
    N, K = shape.n_states, shape.n_symbols
    if x.shape != (shape.n_params,):
        raise ValueError(f"expected {shape.n_params} parameters, got {x.shape}")
    pi = _rows(x[:N])
    A = _rows(x[N:N + N * N].reshape(N, N))
    B = _rows(x[N + N * N:].reshape(N, K))
    return HmmModel.discrete(pi, A, B, alphabet=alphabet)


def model_to_vector(model):
    return np.concatenate([model.initial, model.transition.ravel(), model.emission.table.ravel()])


def random_model(shape, rng, alphabet=None):
    """Uniform-random rows, renormalized: the initialization shared by all
    trainers."""
    return vector_to_model(rng.random(shape.n_params), shape, alphabet)


class PackedSequences:
    """Discrete sequences concatenated for the batched likelihood kernel."""

    def __init__(self, seqs, n_symbols):
        self.symbols = np.ascontiguousarray(np.concatenate(seqs), dtype=np.int64)
        if self.symbols.size and (self.symbols.min() < 0 or self.symbols.max() >= n_symbols):
            raise ValueError(f"symbol outside alphabet of size {n_symbols}")
        self.bounds = np.concatenate([[0], np.cumsum([len(s) for s in seqs])]).astype(np.int64)

    def loglik(self, model):
        return kernels.batch_loglik_discrete(
            model.initial, model.transition, model.emission.table, self.symbols, self.bounds
        )


def hmm_objective(shape, score, data, alphabet=None, null=None):
    """Counting objective over decoded vectors.

    ``score`` is ``"log_odds"`` (against ``null``, by default the unigram null
    of ``data``) or ``"sop"`` (negated raw sum-of-pairs of the Viterbi
    alignment, so that larger is better).
    """
    data = [np.asarray(o, dtype=np.int64) for o in data]
    if not data:
        raise ValueError("objective needs at least one sequence")
    if score == "log_odds":
        null = null if null is not None else null_model(data, shape.n_symbols)
        packed = PackedSequences(data, shape.n_symbols)
        null_total = packed.loglik(null).sum()
        if not np.isfinite(null_total):
            raise DegenerateNullError("degenerate null: a sequence is impossible under it")
        scale = 1.0 / (LN2 * len(data))

        def fn(x):
            total = packed.loglik(vector_to_model(x, shape)).sum()
            return (total - null_total) * scale
    elif score == "sop":
        symbols = alphabet or "".join(chr(65 + i) for i in range(shape.n_symbols))

        def fn(x):
            return -sop_raw(align(vector_to_model(x, shape), data, symbols))
    else:
        raise ValueError(f"unknown objective {score!r}")
    return CountingObjective(fn)
