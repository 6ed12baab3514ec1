"""Command line entry point: ``hmmaro {train,bench,score,synth}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import model as model_io
from .bench import (
    ALGORITHMS,
    OBJECTIVES,
    ExperimentConfig,
    emit_report,
    run_benchmark,
    run_experiment,
    summarize,
)
from .em import history_csv
from .metaheuristics import HmmShape, random_model
from .objectives import align, format_score, log_odds, null_model, sop_raw, sop_reference
from .seqio import read_alignment, read_fasta, synthesize, write_alignment, write_fasta

_CONFIG_FLAGS = {
    "algorithm": "algorithm",
    "objective": "objective",
    "states": "n_states",
    "iterations": "iterations",
    "reps": "repetitions",
    "seed": "seed",
    "train_size": "train_size",
    "g_range": "g_range",
    "int_bits": "int_bits",
    "frac_bits": "frac_bits",
    "reference": "reference",
    "alphabet": "alphabet",
    "workers": "workers",
    "format": "output_format",
}


def _add_experiment_flags(p, algorithm_flag=True):
    p.add_argument("--config", help="key=value file with experiment settings")
    p.add_argument("--data", nargs="+", help="FASTA file(s)")
    if algorithm_flag:
        p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--states", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--train-size", type=int)
    p.add_argument("--g-range", type=int, help="largest budding substring (default: full)")
    p.add_argument("--int-bits", type=int)
    p.add_argument("--frac-bits", type=int)
    p.add_argument("--reference", help="reference alignment for sum-of-pairs scoring")
    p.add_argument("--alphabet", help="explicit alphabet; other symbols are rejected")


def _config_from_args(args):
    overrides = {}
    for flag, key in _CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if args.data:
        overrides["datasets"] = tuple(args.data)
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**overrides)


def cmd_train(args):
    cfg = replace(_config_from_args(args), repetitions=1)
    report = run_experiment(cfg)
    model = report.models[0]
    model_io.save(model, args.out)
    trace = report.traces[0]
    text = history_csv(trace) if cfg.algorithm == "bw" else trace.to_csv()
    if args.history:
        Path(args.history).write_text(text, encoding="utf-8")
    rec = report.records[0]
    val = "" if rec.validation_score is None else f" validation={format_score(rec.validation_score)}"
    print(f"{cfg.algorithm} {report.score_label}: train={format_score(rec.train_score)}{val}")
    return 0


def cmd_bench(args):
    cfg = _config_from_args(args)
    if not cfg.datasets:
        raise ValueError("bench needs --data or datasets= in the config file")
    algs = tuple(a.strip() for a in args.algorithms.split(",")) if args.algorithms else ALGORITHMS
    for a in algs:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    reports = run_benchmark(cfg, algs)
    splits = ["train", "validation"] if args.split == "both" else [args.split]
    chunks = [emit_report(summarize(reports, s), cfg.output_format) for s in splits]
    out = b"\n".join(chunks)
    if args.out:
        Path(args.out).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
    if args.records:
        Path(args.records).write_text("".join(r.records_csv() for r in reports), encoding="utf-8")
    return 0


def cmd_score(args):
    if args.alignment:
        aln = read_alignment(args.alignment)
        print(f"sop_raw: {format_score(sop_raw(aln))}")
        if args.reference:
            ref = read_alignment(args.reference)
            print(f"sop_reference: {format_score(sop_reference(aln, ref))}")
        return 0
    if not (args.model and args.data):
        raise ValueError("score needs --model and --data, or --alignment")
    model = model_io.load(args.model)
    ds = read_fasta(args.data, args.alphabet or model.alphabet)
    if ds.n_symbols != model.emission.n_symbols:
        raise ValueError(
            f"dataset alphabet has {ds.n_symbols} symbols, model expects {model.emission.n_symbols}"
        )
    seqs = ds.indexed
    print(f"log_odds: {format_score(log_odds(model, null_model(seqs, ds.n_symbols), seqs))}")
    aln = align(model, seqs, ds.alphabet, ds.names)
    if len(seqs) > 1:
        print(f"sop_raw: {format_score(sop_raw(aln))}")
    if args.reference:
        print(f"sop_reference: {format_score(sop_reference(aln, read_alignment(args.reference)))}")
    if args.write_alignment:
        write_alignment(aln, args.write_alignment)
    return 0


def cmd_synth(args):
    rng = np.random.default_rng(args.seed)
    if args.model:
        gen = model_io.load(args.model)
    else:
        if not (args.states and args.symbols):
            raise ValueError("synth needs --model or both --states and --symbols")
        gen = random_model(HmmShape(args.states, args.symbols), rng)
    ds = synthesize(gen, args.count, (args.min_length, args.max_length), rng, args.alphabet)
    if args.out:
        write_fasta(ds, args.out)
    else:
        sys.stdout.write(write_fasta(ds))
    print(ds.manifest(Path(args.out).stem if args.out else "synthetic"), file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hmmaro", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model")
    _add_experiment_flags(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--history", help="CSV of the likelihood history or optimizer trace")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="repeated runs and comparison table")
    _add_experiment_flags(p, algorithm_flag=False)
    p.add_argument("--algorithms", help="comma-separated subset of bw,sa,aro,maro")
    p.add_argument("--reps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("csv", "markdown"))
    p.add_argument("--split", choices=("train", "validation", "both"), default="train")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--records", help="per-repetition CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("score", help="score a model or an alignment")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--alphabet")
    p.add_argument("--alignment", help="aligned FASTA to score directly")
    p.add_argument("--reference", help="reference alignment")
    p.add_argument("--write-alignment", help="write the Viterbi alignment as aligned FASTA")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("synth", help="sample a synthetic FASTA dataset")
    p.add_argument("--model", help="generator model file")
    p.add_argument("--states", type=int)
    p.add_argument("--symbols", type=int)
    p.add_argument("--alphabet")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--min-length", type=int, default=20)
    p.add_argument("--max-length", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"hmmaro {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
