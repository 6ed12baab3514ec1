"""Simulated annealing baseline using the ARO budding move as its neighbor."""

from __future__ import annotations

import math

import numpy as np

from .aro import reproduce
from .base import OptimizeResult, Trace, as_objective, evaluate


def acceptance_probability(worse_by, temperature):
    """Metropolis rule for a move that lowers fitness by ``worse_by >= 0``."""
    if worse_by <= 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(-worse_by / temperature)


def sa_run(objective, codec, iterations=2000, rng=None, t0=1.0, cooling=0.995,
           g_range=None, flip_all=False):
    """Metropolis acceptance with geometric cooling ``t0 * cooling**t`` at
    iteration ``t``; returns the best state ever visited."""
    if iterations < 1:
        raise ValueError("iteration budget must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    objective = as_objective(objective)
    current = codec.random(rng)
    fit = evaluate(objective, codec, current, 0)
    best, best_fit = current, fit
    trace = Trace()
    temp = t0
    for t in range(1, iterations + 1):
        temp *= cooling
        cand = reproduce(current, rng, g_range, flip_all)
        cand_fit = evaluate(objective, codec, cand, t)
        p = acceptance_probability(fit - cand_fit, temp)
        accepted = p >= 1.0 or (p > 0.0 and rng.random() < p)
        if accepted:
            current, fit = cand, cand_fit
        if fit > best_fit:
            best, best_fit = current, fit
        trace.record(t, fit, best_fit, 1, temp, accepted)
    return OptimizeResult(codec.decode(best), best_fit, trace, best, objective.evaluations)
