"""Objective wrapper, run traces and the shared single-solution loop."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


class ObjectiveError(RuntimeError):
    pass


class CountingObjective:
    """Maximization objective over decoded real vectors, counting calls."""

    def __init__(self, fn):
        self.fn = fn
        self.evaluations = 0

    def __call__(self, x):
        self.evaluations += 1
        return float(self.fn(x))


def as_objective(fn):
    return fn if isinstance(fn, CountingObjective) else CountingObjective(fn)


@dataclass
class Trace:
    t: list = field(default_factory=list)
    incumbent_fitness: list = field(default_factory=list)
    best_ever_fitness: list = field(default_factory=list)
    loc: list = field(default_factory=list)
    delta_t: list = field(default_factory=list)
    accepted: list = field(default_factory=list)

    def record(self, t, incumbent, best, loc, delta, accepted):
        self.t.append(t)
        self.incumbent_fitness.append(incumbent)
        self.best_ever_fitness.append(best)
        self.loc.append(loc)
        self.delta_t.append(delta)
        self.accepted.append(bool(accepted))

    def __len__(self):
        return len(self.t)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "incumbent_fitness", "best_ever_fitness", "loc", "delta_t", "accepted"])
        for row in zip(self.t, self.incumbent_fitness, self.best_ever_fitness,
                       self.loc, self.delta_t, self.accepted):
            t, inc, best, loc, delta, acc = row
            w.writerow([t, repr(inc), repr(best), loc, repr(delta), str(acc).lower()])
        return buf.getvalue()


@dataclass
class OptimizeResult:
    best_x: np.ndarray
    best_fitness: float
    trace: Trace
    best_chromosome: np.ndarray
    evaluations: int


def evaluate(objective, codec, chrom, t):
    try:
        return objective(codec.decode(chrom))
    except Exception as exc:
        raise ObjectiveError(f"objective evaluation failed at iteration {t}: {exc}") from exc
