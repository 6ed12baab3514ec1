"""Log-odds and sum-of-pairs scoring, the unigram null model, and alignment
construction from Viterbi paths."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .inference import log_likelihood, viterbi
from .model import HmmModel

GAP = "-"
LN2 = np.log(2.0)


class DegenerateNullError(ValueError):
    pass


def null_model(dataset, n_symbols):
    """Single-state model emitting the Laplace-smoothed symbol frequencies of
    the whole dataset (pseudocount 1 per symbol)."""
    if len(dataset) == 0:
        raise ValueError("null model needs a non-empty dataset")
    counts = np.ones(n_symbols)
    for obs in dataset:
        counts += np.bincount(np.asarray(obs, dtype=np.int64), minlength=n_symbols)[:n_symbols]
    return HmmModel.discrete([1.0], [[1.0]], [counts / counts.sum()])


def log_odds(model, null, dataset):
    """Mean per-sequence log2 likelihood ratio of ``model`` against ``null``."""
    if len(dataset) == 0:
        raise ValueError("log-odds of an empty dataset is undefined")
    diffs = []
    for n, obs in enumerate(dataset):
        ll_null = log_likelihood(null, obs)
        if not np.isfinite(ll_null):
            raise DegenerateNullError(f"degenerate null: sequence {n} impossible under null model")
        ll = log_likelihood(model, obs)
        if not np.isfinite(ll):
            return -np.inf
        diffs.append(ll - ll_null)
    return float(np.sum(diffs) / LN2 / len(diffs))


# --- alignments ----------------------------------------------------------------

@dataclass(frozen=True)
class Alignment:
    rows: tuple[str, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"seq{i}" for i in range(len(self.rows))))
        else:
            object.__setattr__(self, "names", tuple(self.names))
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError(f"alignment rows have differing widths {sorted(widths)}")
        if len(self.names) != len(self.rows):
            raise ValueError("alignment needs one name per row")

    @property
    def width(self):
        return len(self.rows[0]) if self.rows else 0

    def __len__(self):
        return len(self.rows)

    def degapped(self):
        return [r.replace(GAP, "") for r in self.rows]


def _visit_keys(path):
    seen = {}
    keys = []
    for s in path:
        s = int(s)
        k = seen.get(s, 0)
        seen[s] = k + 1
        keys.append((s, k))
    return keys


def align(model, seqs, alphabet, names=None):
    """Align sequences by synchronizing their Viterbi state visits.

    The k-th visit to state s in each decoded path maps to a shared column.
    Sequences are merged in order; a residue goes to the first column after
    the previous residue that carries its key and is still free, otherwise a
    new column is inserted there. When visit orders agree across sequences
    this shares every key; conflicting orders are split instead of reordered,
    so removing gaps always recovers the input.
    """
    if len(seqs) == 0:
        raise ValueError("nothing to align")
    names = list(names) if names is not None else [f"seq{i}" for i in range(len(seqs))]
    columns = []  # [key, {seq index: symbol}]
    for i, obs in enumerate(seqs):
        path, score = viterbi(model, obs)
        if not np.isfinite(score):
            raise ValueError(f"sequence {names[i]!r} cannot be decoded under the model")
        pos = 0
        for key, sym in zip(_visit_keys(path), obs):
            for c in range(pos, len(columns)):
                if columns[c][0] == key and i not in columns[c][1]:
                    break
            else:
                c = pos
                columns.insert(c, [key, {}])
            columns[c][1][i] = alphabet[int(sym)]
            pos = c + 1
    rows = ["".join(col[1].get(i, GAP) for col in columns) for i in range(len(seqs))]
    return Alignment(tuple(rows), tuple(names))


def column_distance(x, y):
    """Default pair distance: 1 per mismatching column, where residue vs gap
    counts as a mismatch and gap vs gap does not."""
    if len(x) != len(y):
        raise ValueError("rows must have equal width")
    return sum(1 for a, b in zip(x, y) if a != b)


def sop_raw(alignment, metric: Callable[[str, str], float] = column_distance):
    """Sum of ``metric`` over all unordered row pairs."""
    rows = alignment.rows if isinstance(alignment, Alignment) else tuple(alignment)
    if len(rows) < 2:
        raise ValueError("sum-of-pairs needs at least two rows")
    return float(sum(metric(a, b) for a, b in itertools.combinations(rows, 2)))


def _residue_pairs(rows: Sequence[str]):
    pos = []
    for r in rows:
        idx, out = 0, []
        for ch in r:
            if ch == GAP:
                out.append(-1)
            else:
                out.append(idx)
                idx += 1
        pos.append(out)
    pairs = set()
    for i, j in itertools.combinations(range(len(rows)), 2):
        for a, b in zip(pos[i], pos[j]):
            if a >= 0 and b >= 0:
                pairs.add((i, a, j, b))
    return pairs


def sop_reference(test, reference):
    """Fraction of residue pairs aligned in ``reference`` that ``test`` also
    aligns. Returns 1.0 when the reference aligns no pairs at all."""
    if test.degapped() != reference.degapped():
        raise ValueError("test and reference alignments are over different sequences")
    ref = _residue_pairs(reference.rows)
    if not ref:
        return 1.0
    hit = ref & _residue_pairs(test.rows)
    return len(hit) / len(ref)


def format_score(value):
    return f"{value:.3f}"
