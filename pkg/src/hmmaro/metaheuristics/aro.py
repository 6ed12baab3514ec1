"""Asexual reproduction optimization (ARO) and its tolerant variant (MARO)."""

from __future__ import annotations

import math

import numpy as np

from .base import OptimizeResult, Trace, as_objective, evaluate


def mutation_prob(g):
    """Per-bit flip probability for a substring of ``g`` bits: ``1/ln(g)``,
    clamped to 1 (covers the singular g = 1 and the super-unit g = 2)."""
    if g < 1:
        raise ValueError("substring length must be >= 1")
    if g <= 2:
        return 1.0
    return min(1.0, 1.0 / math.log(g))


def reproduce(parent, rng, g_range=None, flip_all=False):
    """Bud a parent chromosome.

    A larva copies the parent; a substring of ``g`` bits, ``g`` uniform on
    ``[1, g_range]`` (default: full length) at a uniform start, is mutated bit
    by bit with probability :func:`mutation_prob` (every bit when
    ``flip_all``). Inside the substring each bud bit then comes from the parent
    when a fresh uniform draw is below 0.5 and from the larva otherwise.
    """
    parent = np.asarray(parent, dtype=np.uint8)
    total = parent.shape[0]
    g_max = total if g_range is None else max(1, min(int(g_range), total))
    g = int(rng.integers(1, g_max + 1))
    start = int(rng.integers(0, total - g + 1))
    sub = slice(start, start + g)
    larva = parent.copy()
    if flip_all:
        flips = np.ones(g, dtype=bool)
    else:
        flips = rng.random(g) < mutation_prob(g)
    larva[sub] ^= flips.astype(np.uint8)
    u = rng.random(g)
    bud = parent.copy()
    bud[sub] = np.where(u < 0.5, parent[sub], larva[sub])
    return bud


def delta_t(loc, t):
    """Tolerance band ``ln(loc) / sqrt(t)``."""
    if loc < 1 or t < 1:
        raise ValueError("need loc >= 1 and t >= 1")
    return math.log(loc) / math.sqrt(t)


def _run(objective, codec, iterations, rng, tolerance, g_range, flip_all):
    if iterations < 1:
        raise ValueError("iteration budget must be >= 1")
    objective = as_objective(objective)
    parent = codec.random(rng)
    fit = evaluate(objective, codec, parent, 0)
    best, best_fit = parent, fit
    loc = 1
    trace = Trace()
    for t in range(1, iterations + 1):
        bud = reproduce(parent, rng, g_range, flip_all)
        bud_fit = evaluate(objective, codec, bud, t)
        delta = 0.0 if tolerance is None else tolerance(loc, t)
        if bud_fit > fit:
            parent, fit, accepted = bud, bud_fit, True
            loc = 1
        elif tolerance is not None and bud_fit > fit - delta:
            parent, fit, accepted = bud, bud_fit, True
        else:
            accepted = False
            if tolerance is not None:
                loc += 1
        if fit > best_fit:
            best, best_fit = parent, fit
        trace.record(t, fit, best_fit, loc, delta, accepted)
    return OptimizeResult(codec.decode(best), best_fit, trace, best, objective.evaluations)


def aro_run(objective, codec, iterations=2000, rng=None, g_range=None, flip_all=False):
    """Elitist single-parent search: the bud replaces the parent only on a
    strict improvement."""
    rng = np.random.default_rng() if rng is None else rng
    return _run(objective, codec, iterations, rng, None, g_range, flip_all)


def maro_run(objective, codec, iterations=2000, rng=None, g_range=None, flip_all=False,
             tolerance=delta_t):
    """ARO that also accepts a worse bud within ``tolerance(loc, t)`` of the
    parent.

    ``loc`` resets to 1 on strict improvement and grows by one on each full
    rejection. The best chromosome ever seen is returned, since tolerated moves
    may degrade the parent.
    """
    rng = np.random.default_rng() if rng is None else rng
    return _run(objective, codec, iterations, rng, tolerance, g_range, flip_all)
