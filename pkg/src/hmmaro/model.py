"""HMM parameter containers, validation and the plain-text model format."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

STOCHASTIC_ATOL = 1e-9
VARIANCE_FLOOR = 1e-6
_LOG_2PI = np.log(2.0 * np.pi)


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteEmission:
    """Emission table ``table[j, o]`` = probability of symbol ``o`` in state ``j``."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(np.atleast_2d(self.table)))

    @property
    def n_states(self):
        return self.table.shape[0]

    @property
    def n_symbols(self):
        return self.table.shape[1]

    def check_observations(self, obs):
        obs = np.asarray(obs)
        if obs.ndim != 1 or obs.size == 0:
            raise ValueError("discrete observations must be a non-empty 1-d sequence")
        if not np.issubdtype(obs.dtype, np.integer):
            if not np.all(np.mod(obs, 1) == 0):
                raise ValueError("discrete observations must be integer symbol indices")
        obs = obs.astype(np.int64)
        bad = (obs < 0) | (obs >= self.n_symbols)
        if bad.any():
            t = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"symbol {obs[t]} at position {t} outside alphabet of size {self.n_symbols}"
            )
        return obs

    def likelihoods(self, obs):
        """Return ``(E, offset)`` with ``E[t, j] = b_j(o_t)`` and a zero offset."""
        obs = self.check_observations(obs)
        E = np.ascontiguousarray(self.table[:, obs].T)
        return E, np.zeros(len(obs))

    def log_likelihoods(self, obs):
        obs = self.check_observations(obs)
        with np.errstate(divide="ignore"):
            return np.ascontiguousarray(np.log(self.table[:, obs].T))


@dataclass(frozen=True)
class GaussianMixtureEmission:
    """Diagonal-covariance Gaussian mixture per state.

    ``weights`` is N x M, ``means`` and ``variances`` are N x M x d.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(np.atleast_2d(self.weights)))
        object.__setattr__(self, "means", _frozen(self.means))
        object.__setattr__(self, "variances", _frozen(self.variances))

    @property
    def n_states(self):
        return self.weights.shape[0]

    @property
    def n_mix(self):
        return self.weights.shape[1]

    @property
    def dim(self):
        return self.means.shape[2]

    def check_observations(self, obs):
        obs = np.asarray(obs, dtype=float)
        if obs.ndim == 1 and self.dim == 1:
            obs = obs[:, None]
        if obs.ndim != 2 or obs.shape[0] == 0 or obs.shape[1] != self.dim:
            raise ValueError(
                f"continuous observations must have shape (T, {self.dim}) with T >= 1"
            )
        return obs

    def component_log_densities(self, obs):
        """``out[t, j, k] = log c_jk + log G(o_t; mu_jk, U_jk)``."""
        obs = self.check_observations(obs)
        diff = obs[:, None, None, :] - self.means[None]
        var = self.variances[None]
        logg = -0.5 * (
            self.dim * _LOG_2PI + np.log(self.variances).sum(axis=-1)[None]
            + (diff * diff / var).sum(axis=-1)
        )
        with np.errstate(divide="ignore"):
            return np.log(self.weights)[None] + logg

    def log_likelihoods(self, obs):
        comp = self.component_log_densities(obs)
        top = comp.max(axis=2, keepdims=True)
        top = np.where(np.isfinite(top), top, 0.0)
        with np.errstate(divide="ignore"):
            return top[..., 0] + np.log(np.exp(comp - top).sum(axis=2))

    def likelihoods(self, obs):
        """Return ``(E, offset)`` with ``E[t, j] * exp(offset[t]) = b_j(o_t)``.

        Each row is shifted by its largest log density so densities far from
        every mean do not underflow to zero.
        """
        logE = self.log_likelihoods(obs)
        offset = logE.max(axis=1)
        offset = np.where(np.isfinite(offset), offset, 0.0)
        return np.exp(logE - offset[:, None]), offset


@dataclass(frozen=True)
class HmmModel:
    """lambda = (A, B, pi). Arrays are copied and made read-only."""

    transition: np.ndarray
    initial: np.ndarray
    emission: DiscreteEmission | GaussianMixtureEmission
    alphabet: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "transition", _frozen(np.atleast_2d(self.transition)))
        object.__setattr__(self, "initial", _frozen(np.atleast_1d(self.initial)))

    @property
    def n_states(self):
        return self.initial.shape[0]

    @property
    def is_discrete(self):
        return isinstance(self.emission, DiscreteEmission)

    @classmethod
    def discrete(cls, initial, transition, emission, alphabet=None):
        return cls(transition, initial, DiscreteEmission(emission), alphabet)

    @classmethod
    def gaussian_mixture(cls, initial, transition, weights, means, variances):
        return cls(transition, initial, GaussianMixtureEmission(weights, means, variances))

    def replace(self, **changes):
        kw = dict(
            transition=self.transition,
            initial=self.initial,
            emission=self.emission,
            alphabet=self.alphabet,
        )
        kw.update(changes)
        return HmmModel(**kw)

    def allclose(self, other, atol):
        """Parameter-wise comparison with absolute tolerance."""
        if type(self.emission) is not type(other.emission):
            return False
        pairs = [(self.initial, other.initial), (self.transition, other.transition)]
        if self.is_discrete:
            pairs.append((self.emission.table, other.emission.table))
        else:
            e, f = self.emission, other.emission
            pairs += [(e.weights, f.weights), (e.means, f.means), (e.variances, f.variances)]
        return all(a.shape == b.shape and np.allclose(a, b, rtol=0, atol=atol) for a, b in pairs)


@dataclass(frozen=True)
class Verdict:
    violations: tuple[str, ...] = ()

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def _check_rows(name, mat, out, constraint):
    for r, row in enumerate(mat):
        if not np.all(np.isfinite(row)):
            out.append(f"{name} row {r}: non-finite entry")
            continue
        neg = np.flatnonzero(row < 0)
        if neg.size:
            out.append(f"{name} row {r}: negative entry at column {int(neg[0])} ({constraint})")
        s = row.sum()
        if abs(s - 1.0) > STOCHASTIC_ATOL:
            out.append(f"{name} row {r}: sums to {s:.12g}, expected 1 ({constraint})")


def validate(model):
    """Check every stochastic constraint; returns a :class:`Verdict`."""
    out = []
    A, pi = model.transition, model.initial
    N = pi.shape[0]
    if N < 1:
        out.append("model must have at least one state")
    if A.shape != (N, N):
        out.append(f"transition shape {A.shape} inconsistent with {N} states")
    else:
        _check_rows("transition", A, out, "rows must be stochastic")
    _check_rows("initial", pi[None, :], out, "initial distribution")

    em = model.emission
    if isinstance(em, DiscreteEmission):
        if em.table.shape[0] != N:
            out.append(f"emission table has {em.table.shape[0]} rows for {N} states")
        else:
            _check_rows("emission", em.table, out, "rows must be stochastic")
    else:
        M = em.weights.shape[1] if em.weights.ndim == 2 else 0
        if em.weights.shape[0] != N:
            out.append(f"mixture weights have {em.weights.shape[0]} rows for {N} states")
        else:
            _check_rows("mixture weights", em.weights, out, "mixture weights must sum to 1")
        if em.means.ndim != 3 or em.means.shape[:2] != (N, M):
            out.append(f"mixture means shape {em.means.shape} inconsistent with ({N}, {M}, d)")
        if em.variances.shape != em.means.shape:
            out.append("mixture variances shape differs from means shape")
        else:
            low = np.argwhere(~(em.variances >= VARIANCE_FLOOR))
            if low.size:
                j, k, d = (int(v) for v in low[0])
                out.append(
                    f"variance state {j} component {k} dim {d} below floor {VARIANCE_FLOOR:g}"
                )
    return Verdict(tuple(out))


# --- plain-text model format -------------------------------------------------

def _fmt(values):
    return " ".join(repr(float(v)) for v in np.ravel(values))


def dumps(model):
    lines = []
    N = model.n_states
    em = model.emission
    if model.is_discrete:
        lines += ["kind = discrete", f"n_states = {N}", f"n_symbols = {em.n_symbols}"]
        if model.alphabet is not None:
            lines.append(f"alphabet = {model.alphabet}")
    else:
        lines += [
            "kind = gaussian_mixture",
            f"n_states = {N}",
            f"n_mix = {em.n_mix}",
            f"dim = {em.dim}",
        ]
    lines.append(f"initial = {_fmt(model.initial)}")
    for i in range(N):
        lines.append(f"transition.{i} = {_fmt(model.transition[i])}")
    if model.is_discrete:
        for j in range(N):
            lines.append(f"emission.{j} = {_fmt(em.table[j])}")
    else:
        for j in range(N):
            lines.append(f"weights.{j} = {_fmt(em.weights[j])}")
        for j in range(N):
            for k in range(em.n_mix):
                lines.append(f"means.{j}.{k} = {_fmt(em.means[j, k])}")
                lines.append(f"variances.{j}.{k} = {_fmt(em.variances[j, k])}")
    return "\n".join(lines) + "\n"


def loads(text):
    kv = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"model file line {n}: expected 'key = value'")
        kv[key.strip()] = value.strip()

    def get(key):
        try:
            return kv[key]
        except KeyError:
            raise ValueError(f"model file missing key '{key}'") from None

    def floats(key):
        return np.array([float(v) for v in get(key).split()])

    kind = get("kind")
    N = int(get("n_states"))
    pi = floats("initial")
    A = np.array([floats(f"transition.{i}") for i in range(N)])
    if kind == "discrete":
        B = np.array([floats(f"emission.{j}") for j in range(N)])
        if B.shape[1] != int(get("n_symbols")):
            raise ValueError("emission rows disagree with n_symbols")
        return HmmModel.discrete(pi, A, B, alphabet=kv.get("alphabet"))
    if kind == "gaussian_mixture":
        M, d = int(get("n_mix")), int(get("dim"))
        w = np.array([floats(f"weights.{j}") for j in range(N)])
        mu = np.array([[floats(f"means.{j}.{k}") for k in range(M)] for j in range(N)])
        var = np.array([[floats(f"variances.{j}.{k}") for k in range(M)] for j in range(N)])
        if mu.shape != (N, M, d):
            raise ValueError("mixture means disagree with n_mix/dim")
        return HmmModel.gaussian_mixture(pi, A, w, mu, var)
    raise ValueError(f"unknown model kind '{kind}'")


def save(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def load(path_or_file):
    if isinstance(path_or_file, (str, os.PathLike)):
        with open(path_or_file, encoding="utf-8") as fh:
            return loads(fh.read())
    if isinstance(path_or_file, io.TextIOBase):
        return loads(path_or_file.read())
    return loads(path_or_file.read().decode("utf-8"))
