"""FASTA ingestion, alphabet indexing, train/validation splits and synthetic
datasets."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from .inference import sample
from .objectives import GAP, Alignment


class FastaError(ValueError):
    pass


@dataclass(frozen=True)
class SequenceDataset:
    names: tuple[str, ...]
    sequences: tuple[str, ...]
    alphabet: str

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "sequences", tuple(self.sequences))
        if len(self.names) != len(self.sequences):
            raise ValueError("one name per sequence required")
        allowed = set(self.alphabet)
        if len(allowed) != len(self.alphabet):
            raise ValueError(f"alphabet {self.alphabet!r} has repeated symbols")
        for name, seq in zip(self.names, self.sequences):
            extra = set(seq) - allowed
            if extra:
                raise FastaError(
                    f"record {name!r}: symbol(s) {''.join(sorted(extra))!r} not in alphabet"
                )

    def __len__(self):
        return len(self.sequences)

    @property
    def n_symbols(self):
        return len(self.alphabet)

    @property
    def indexed(self):
        lookup = {ch: i for i, ch in enumerate(self.alphabet)}
        return [np.fromiter((lookup[c] for c in s), dtype=np.int64, count=len(s))
                for s in self.sequences]

    def decode(self, obs):
        return "".join(self.alphabet[int(i)] for i in obs)

    def subset(self, idx):
        return SequenceDataset(
            [self.names[i] for i in idx], [self.sequences[i] for i in idx], self.alphabet
        )

    def manifest(self, name="dataset", train_size=None):
        """One-line summary: record count N, mean length LSEQ (min, max), training size T."""
        lengths = [len(s) for s in self.sequences]
        t = "-" if train_size is None else str(train_size)
        return (f"{name}\tN={len(lengths)}\tLSEQ={np.mean(lengths):.0f} "
                f"({min(lengths)}, {max(lengths)})\tT={t}")


def _text_lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def _records(source, keep_gaps):
    names, seqs = [], []
    for n, line in enumerate(_text_lines(source), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            names.append(line[1:].strip())
            seqs.append([])
        else:
            if not names:
                raise FastaError(f"line {n}: sequence data before any '>' header")
            seqs[-1].append("".join(line.split()).upper())
    if not names:
        raise FastaError("empty FASTA input")
    out = ["".join(parts) for parts in seqs]
    for name, s in zip(names, out):
        body = s if keep_gaps else s.replace(GAP, "")
        if not body:
            raise FastaError(f"record {name!r} is empty")
    return names, out


def read_fasta(source, alphabet=None):
    """Parse FASTA from a path, bytes, or a binary/text stream.

    Sequence lines are concatenated, whitespace stripped and upper-cased. The
    alphabet is the sorted set of observed symbols unless one is supplied, in
    which case any other symbol is an error.
    """
    names, seqs = _records(source, keep_gaps=False)
    if alphabet is None:
        alphabet = "".join(sorted(set("".join(seqs))))
    else:
        alphabet = alphabet.upper()
    return SequenceDataset(names, seqs, alphabet)


def format_fasta(names, rows, width=60):
    out = []
    for name, row in zip(names, rows):
        out.append(f">{name}")
        out.extend(row[i:i + width] for i in range(0, len(row), width))
        if not row:
            out.append("")
    return "\n".join(out) + "\n"


def write_fasta(dataset, dest=None, width=60):
    text = format_fasta(dataset.names, dataset.sequences, width)
    return _emit(text, dest)


def read_alignment(source):
    names, rows = _records(source, keep_gaps=False)
    return Alignment(tuple(rows), tuple(names))


def write_alignment(alignment, dest=None, width=60):
    return _emit(format_fasta(alignment.names, alignment.rows, width), dest)


def _emit(text, dest):
    if dest is None:
        return text
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif isinstance(dest, io.TextIOBase):
        dest.write(text)
    else:
        dest.write(text.encode("utf-8"))
    return text


def split(dataset, train_size, rng):
    """Random train/validation partition; validation is everything not drawn
    for training, kept in original order."""
    n = len(dataset)
    if not 1 <= train_size <= n:
        raise ValueError(f"train_size must be in [1, {n}], got {train_size}")
    chosen = np.sort(rng.choice(n, size=train_size, replace=False))
    rest = np.setdiff1d(np.arange(n), chosen)
    return dataset.subset(chosen), dataset.subset(rest)


def synthesize(generator, count, lengths, rng, alphabet=None):
    """Sample ``count`` sequences from a discrete HMM.

    ``lengths`` is an int or an inclusive ``(min, max)`` range drawn uniformly
    per sequence.
    """
    if count < 1:
        raise ValueError("synthetic dataset needs count >= 1")
    if not generator.is_discrete:
        raise ValueError("synthesize needs a discrete generator")
    K = generator.emission.n_symbols
    alphabet = alphabet or generator.alphabet or _default_alphabet(K)
    if len(alphabet) != K:
        raise ValueError(f"alphabet of size {len(alphabet)} for {K} symbols")
    lo, hi = (lengths, lengths) if np.isscalar(lengths) else lengths
    names, seqs = [], []
    for i in range(count):
        T = int(rng.integers(lo, hi + 1))
        _, obs = sample(generator, T, rng)
        names.append(f"syn_{i + 1:04d}")
        seqs.append("".join(alphabet[o] for o in obs))
    return SequenceDataset(names, seqs, alphabet)


PROTEIN_ALPHABET = "ACDEFGHIKLMNPQRSTVWY"


def _default_alphabet(K):
    if K <= len(PROTEIN_ALPHABET):
        return PROTEIN_ALPHABET[:K] if K != 4 else "ACGT"
    raise ValueError(f"no default alphabet for {K} symbols; pass one explicitly")
