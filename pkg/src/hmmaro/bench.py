"""Experiment harness: repeated seeded training runs, mean and standard error
aggregation, and comparison tables in CSV or markdown."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .em import TrainConfig, train_bw
from .metaheuristics import (
    HmmShape,
    aro_run,
    hmm_objective,
    maro_run,
    random_model,
    sa_run,
    vector_to_model,
)
from .objectives import align, log_odds, null_model, sop_raw, sop_reference
from .seqio import read_alignment, read_fasta, split

ALGORITHMS = ("bw", "sa", "aro", "maro")
OBJECTIVES = ("log_odds", "sop")
COLUMN_LABELS = {"bw": "BW", "sa": "SA", "aro": "ARO", "maro": "MARO"}
INIT_SCHEME = "uniform-random rows, renormalized"
_RUNNERS = {"sa": sa_run, "aro": aro_run, "maro": maro_run}


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[str, ...] = ()
    algorithm: str = "maro"
    objective: str = "log_odds"
    n_states: int = 4
    iterations: int = 2000
    repetitions: int = 25
    seed: int = 0
    train_size: int | None = None
    g_range: int | None = None
    int_bits: int = 1
    frac_bits: int = 10
    bw_tolerance: float = 1e-6
    min_row_mass: float = 1e-6
    reference: str | None = None
    alphabet: str | None = None
    workers: int = 1
    output_format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.n_states < 1:
            raise ValueError("n_states must be >= 1")
        if self.output_format not in ("csv", "markdown"):
            raise ValueError("output_format must be csv or markdown")

    @property
    def effective_repetitions(self):
        """BW is deterministic given its start, so it runs once."""
        return 1 if self.algorithm == "bw" else self.repetitions

    @classmethod
    def from_mapping(cls, values):
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            kw[key] = _coerce(key, types[key], raw)
        return cls(**kw)

    @classmethod
    def from_file(cls, path, **overrides):
        values = {}
        for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key=value")
            values[key.strip()] = value.strip()
        cfg = cls.from_mapping(values)
        return replace(cfg, **overrides) if overrides else cfg


def _coerce(key, type_name, raw):
    if not isinstance(raw, str):
        return raw
    if key == "datasets":
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    optional = "None" in type_name
    if optional and raw.lower() in ("", "none"):
        return None
    if type_name.startswith("int"):
        return int(raw)
    if type_name.startswith("float"):
        return float(raw)
    return raw


@dataclass(frozen=True)
class RepetitionRecord:
    seed: int
    train_score: float
    validation_score: float | None
    wall_time: float = field(compare=False)
    evaluations: int = 0


@dataclass(frozen=True)
class Aggregate:
    n: int
    mean: float
    se: float
    min: float
    max: float


def aggregate(values):
    """Mean, standard error (sample std with n-1 over sqrt(n)), min, max."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("nothing to aggregate")
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return Aggregate(int(v.size), float(v.mean()), se, float(v.min()), float(v.max()))


@dataclass
class RunReport:
    dataset: str
    algorithm: str
    objective: str
    score_label: str
    records: list[RepetitionRecord]
    init_scheme: str = INIT_SCHEME
    models: list = field(default_factory=list, repr=False, compare=False)
    traces: list = field(default_factory=list, repr=False, compare=False)

    @property
    def deterministic(self):
        return self.algorithm == "bw"

    def scores(self, split="train"):
        if split == "train":
            return [r.train_score for r in self.records]
        return [r.validation_score for r in self.records if r.validation_score is not None]

    def aggregate(self, split="train"):
        return aggregate(self.scores(split))

    def records_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["# init", self.init_scheme])
        w.writerow(["dataset", "algorithm", "score", "seed", "train", "validation", "evaluations"])
        for r in self.records:
            val = "" if r.validation_score is None else repr(r.validation_score)
            w.writerow([self.dataset, self.algorithm, self.score_label, r.seed,
                        repr(r.train_score), val, r.evaluations])
        return buf.getvalue()


# --- one repetition --------------------------------------------------------------

@dataclass
class _Prepared:
    name: str
    train: list
    validation: list
    alphabet: str
    null: object
    reference: object
    names: tuple


def _prepare(config, dataset, name):
    if config.train_size is not None:
        train_ds, val_ds = split(dataset, config.train_size, np.random.default_rng(config.seed))
    else:
        train_ds, val_ds = dataset, None
    train = train_ds.indexed
    validation = val_ds.indexed if val_ds is not None and len(val_ds) else []
    reference = read_alignment(config.reference) if config.reference else None
    return _Prepared(name, train, validation, dataset.alphabet,
                     null_model(train, dataset.n_symbols), reference, train_ds.names)


def _score(config, prep, model, seqs, names=None):
    if not seqs:
        return None
    if config.objective == "log_odds":
        return log_odds(model, prep.null, seqs)
    aln = align(model, seqs, prep.alphabet, names)
    if prep.reference is not None and names is not None:
        return sop_reference(aln, prep.reference)
    return -sop_raw(aln)


def _repetition(config, prep, rep):
    seed = config.seed + rep
    rng = np.random.default_rng(seed)
    shape = HmmShape(config.n_states, len(prep.alphabet))
    start = time.perf_counter()
    trace = None
    if config.algorithm == "bw":
        init = random_model(shape, rng, prep.alphabet)
        tc = TrainConfig(max_iterations=config.iterations, loglik_tolerance=config.bw_tolerance,
                         min_row_mass=config.min_row_mass)
        model, trace = train_bw(init, prep.train, tc)
        evaluations = len(trace) - 1
    else:
        objective = hmm_objective(shape, config.objective, prep.train, prep.alphabet, prep.null)
        codec = shape.codec(config.int_bits, config.frac_bits)
        res = _RUNNERS[config.algorithm](objective, codec, config.iterations, rng,
                                         g_range=config.g_range)
        model = vector_to_model(res.best_x, shape, prep.alphabet)
        evaluations = objective.evaluations
        trace = res.trace
    elapsed = time.perf_counter() - start
    record = RepetitionRecord(
        seed,
        _score(config, prep, model, prep.train, prep.names),
        _score(config, prep, model, prep.validation),
        elapsed,
        evaluations,
    )
    return record, model, trace


def _repetition_star(args):
    config, prep, rep = args
    try:
        return _repetition(config, prep, rep)
    except Exception as exc:
        raise RuntimeError(
            f"{config.algorithm} failed on {prep.name} with seed {config.seed + rep}: {exc}"
        ) from exc


def _score_label(config):
    if config.objective == "log_odds":
        return "log_odds"
    return "sop_reference" if config.reference else "neg_sop_raw"


def run_experiment(config, dataset=None, name=None):
    """Run every repetition of one algorithm on one dataset.

    Repetition ``r`` is seeded with ``seed + r``. The train/validation split is
    drawn once from ``seed`` so all algorithms see the same partition.
    """
    if dataset is None:
        if not config.datasets:
            raise ValueError("no dataset given")
        path = config.datasets[0]
        dataset = read_fasta(path, config.alphabet)
        name = name or Path(path).stem
    prep = _prepare(config, dataset, name or "dataset")
    reps = range(config.effective_repetitions)
    jobs = [(config, prep, r) for r in reps]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_repetition_star, jobs))
    else:
        results = [_repetition_star(job) for job in jobs]
    return RunReport(
        prep.name,
        config.algorithm,
        config.objective,
        _score_label(config),
        [r[0] for r in results],
        models=[r[1] for r in results],
        traces=[r[2] for r in results],
    )


def run_benchmark(config, algorithms=ALGORITHMS):
    reports = []
    for path in config.datasets:
        ds = read_fasta(path, config.alphabet)
        for alg in algorithms:
            reports.append(run_experiment(replace(config, algorithm=alg), ds, Path(path).stem))
    return reports


# --- tables ----------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str, ...]], ...]
    caption: str


def format_cell(agg, deterministic):
    if deterministic:
        return f"{agg.mean:.2f}"
    return f"{agg.mean:.2f}±{agg.se:.2f}"


def summarize(reports, split="train"):
    """One row per dataset, one column per algorithm (BW, SA, ARO, MARO order),
    cells ``mean±SE`` with SE dropped for deterministic BW."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to summarize")
    labels = {r.score_label for r in reports}
    if len(labels) > 1:
        raise ValueError(f"cannot mix objectives in one table: {sorted(labels)}")
    algs = [a for a in ALGORITHMS if any(r.algorithm == a for r in reports)]
    datasets = list(dict.fromkeys(r.dataset for r in reports))
    rows = []
    for ds in datasets:
        cells = []
        for a in algs:
            match = [r for r in reports if r.dataset == ds and r.algorithm == a]
            if not match or not match[0].scores(split):
                cells.append("")
            else:
                rep = match[0]
                cells.append(format_cell(rep.aggregate(split), rep.deterministic))
        rows.append((ds, tuple(cells)))
    label = labels.pop()
    caption = (f"{split} set, {label} score, mean ± standard error "
               f"over repetitions; initialization: {INIT_SCHEME}")
    return ComparisonTable(tuple(COLUMN_LABELS[a] for a in algs), tuple(rows), caption)


def emit_report(table, fmt="csv"):
    """Serialize a table; returns UTF-8 bytes."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", *table.columns])
        for name, cells in table.rows:
            w.writerow([name, *cells])
        return buf.getvalue().encode("utf-8")
    if fmt == "markdown":
        lines = ["| Family | " + " | ".join(table.columns) + " |",
                 "|---" * (len(table.columns) + 1) + "|"]
        for name, cells in table.rows:
            lines.append(f"| {name} | " + " | ".join(cells) + " |")
        lines += ["", table.caption]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")
