"""Signed fixed-point binary encoding of real vectors.

Each variable occupies ``1 + int_bits + frac_bits`` bits: a sign bit (1 means
negative), the integer part big-endian, then the binary fraction. Values are
truncated toward zero onto the ``2**-frac_bits`` grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Codec:
    n_vars: int
    int_bits: int = 4
    frac_bits: int = 8
    lower: np.ndarray | float | None = None
    upper: np.ndarray | float | None = None

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("n_vars must be >= 1")
        if self.int_bits < 1 or self.frac_bits < 0:
            raise ValueError("need int_bits >= 1 and frac_bits >= 0")
        if self.int_bits + self.frac_bits > 62:
            raise ValueError("at most 62 magnitude bits per variable")
        top = self.max_value
        lo = -top if self.lower is None else self.lower
        hi = top if self.upper is None else self.upper
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.n_vars,)).copy()
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.n_vars,)).copy()
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def var_bits(self):
        return 1 + self.int_bits + self.frac_bits

    @property
    def length(self):
        return self.n_vars * self.var_bits

    @property
    def resolution(self):
        return 2.0 ** -self.frac_bits

    @property
    def max_value(self):
        return 2.0 ** self.int_bits - self.resolution

    def encode(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_vars,):
            raise ValueError(f"expected {self.n_vars} values, got shape {x.shape}")
        x = np.clip(x, self.lower, self.upper)
        mag = np.floor(np.abs(x) * 2.0 ** self.frac_bits).astype(np.int64)
        if np.any(mag >= 2 ** (self.int_bits + self.frac_bits)):
            raise OverflowError("value exceeds the integer bit width")
        width = self.int_bits + self.frac_bits
        shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
        bits = np.empty((self.n_vars, self.var_bits), dtype=np.uint8)
        bits[:, 0] = (x < 0) & (mag > 0)
        bits[:, 1:] = (mag[:, None] >> shifts) & 1
        return bits.ravel()

    def decode(self, chrom):
        bits = np.asarray(chrom)
        if bits.shape != (self.length,):
            raise ValueError(f"chromosome length {bits.shape} does not match codec {self.length}")
        bits = bits.reshape(self.n_vars, self.var_bits).astype(np.int64)
        width = self.int_bits + self.frac_bits
        weights = np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64)
        mag = bits[:, 1:] @ weights
        value = mag * 2.0 ** -self.frac_bits
        # -0.0 canonicalizes to 0.0
        return np.where(bits[:, 0] == 1, -value, value) + 0.0

    def random(self, rng):
        """Uniform draw in ``[lower, upper]`` encoded onto the grid."""
        return self.encode(rng.uniform(self.lower, self.upper))
