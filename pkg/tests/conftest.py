import sys

import numpy as np
import pytest

from hmmaro import HmmModel


def random_stochastic(rng, shape):
    m = rng.random(shape) + 0.05
    return m / m.sum(axis=-1, keepdims=True)


def random_discrete(rng, N, K):
    return HmmModel.discrete(
        random_stochastic(rng, N), random_stochastic(rng, (N, N)), random_stochastic(rng, (N, K))
    )


def random_gmm(rng, N, M, d):
    return HmmModel.gaussian_mixture(
        random_stochastic(rng, N),
        random_stochastic(rng, (N, N)),
        random_stochastic(rng, (N, M)),
        rng.normal(0, 2, (N, M, d)),
        rng.uniform(0.5, 2.0, (N, M, d)),
    )


@pytest.fixture
def toy2():
    """Two-state, two-symbol model with P(obs=(0,1)) = 0.209."""
    return HmmModel.discrete([0.6, 0.4], [[0.7, 0.3], [0.4, 0.6]], [[0.9, 0.1], [0.2, 0.8]])


@pytest.fixture
def chain():
    """Deterministic alternating chain emitting its own state."""
    return HmmModel.discrete([1.0, 0.0], [[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
