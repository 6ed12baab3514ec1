import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmmaro import validate
from hmmaro.metaheuristics import (
    Codec,
    CountingObjective,
    HmmShape,
    ObjectiveError,
    acceptance_probability,
    aro_run,
    delta_t,
    hmm_objective,
    maro_run,
    model_to_vector,
    mutation_prob,
    reproduce,
    sa_run,
    vector_to_model,
)
from hmmaro.objectives import align, log_odds, null_model, sop_raw

from conftest import random_discrete


def bits(s):
    return np.array([int(c) for c in s if c in "01"], dtype=np.uint8)


def sphere(x):
    return -float(np.sum(np.asarray(x) ** 2))


class ScriptedRng:
    """Stand-in generator returning scripted draws."""

    def __init__(self, g, start, flips, u):
        self._ints = [g, start]
        self._floats = [np.asarray(u, float)]
        if flips is not None:
            self._floats.insert(0, np.asarray(flips, float))

    def integers(self, lo, hi):
        v = self._ints.pop(0)
        assert lo <= v < hi
        return v

    def random(self, n):
        out = self._floats.pop(0)
        assert out.shape == (n,)
        return out


# --- codec -----------------------------------------------------------------------

def test_encode_examples():
    c = Codec(1, 3, 2)
    assert np.array_equal(c.encode([2.75]), bits("0|010|11"))
    assert np.array_equal(c.encode([-1.5]), bits("1|001|10"))
    assert np.array_equal(c.encode([0.0]), np.zeros(6, np.uint8))


def test_decode_examples():
    c = Codec(1, 3, 2)
    assert c.decode(bits("0|010|11"))[0] == 2.75
    assert c.decode(c.encode([0.3]))[0] == 0.25
    z = c.decode(bits("1|000|00"))[0]
    assert z == 0.0 and math.copysign(1.0, z) == 1.0


def test_encode_truncates_toward_zero():
    c = Codec(2, 3, 2)
    np.testing.assert_array_equal(c.decode(c.encode([-0.3, -2.9])), [-0.25, -2.75])


def test_encode_clamps_to_bounds():
    c = Codec(1, 3, 2, lower=-1.0, upper=2.0)
    assert c.decode(c.encode([5.0]))[0] == 2.0
    assert c.decode(c.encode([-5.0]))[0] == -1.0


def test_codec_lengths_and_errors():
    c = Codec(3, 4, 8)
    assert c.var_bits == 13 and c.length == 39
    with pytest.raises(ValueError):
        Codec(1, 0, 2)
    with pytest.raises(ValueError):
        c.decode(np.zeros(5, np.uint8))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 10), st.data())
def test_codec_roundtrip_property(n, l1, l2, data):
    c = Codec(n, l1, l2)
    chrom = np.array(data.draw(st.lists(st.integers(0, 1), min_size=c.length, max_size=c.length)),
                     dtype=np.uint8)
    x = c.decode(chrom)
    back = c.encode(x)
    # encode(decode(c)) equals c except that -0 becomes +0
    canon = chrom.reshape(n, -1).copy()
    canon[canon[:, 1:].sum(axis=1) == 0, 0] = 0
    assert np.array_equal(back, canon.ravel())
    assert np.array_equal(c.decode(back), x)


# --- reproduction ----------------------------------------------------------------

def test_mutation_prob_values():
    assert mutation_prob(1) == 1.0
    assert mutation_prob(2) == 1.0
    assert mutation_prob(3) == pytest.approx(1 / math.log(3))
    assert mutation_prob(3) == pytest.approx(0.9102, abs=1e-4)
    assert all(0 < mutation_prob(g) <= 1 for g in range(1, 500))


def test_reproduce_complement_when_forced():
    parent = bits("0110100111")
    rng = ScriptedRng(10, 0, np.zeros(10), np.full(10, 0.9))
    assert np.array_equal(reproduce(parent, rng), 1 - parent)


def test_reproduce_identity_when_all_from_parent():
    parent = bits("0110100111")
    rng = ScriptedRng(4, 3, np.zeros(4), np.full(4, 0.1))
    assert np.array_equal(reproduce(parent, rng), parent)


def test_reproduce_only_touches_substring():
    parent = bits("0000000000")
    rng = ScriptedRng(3, 5, np.zeros(3), np.full(3, 0.9))
    bud = reproduce(parent, rng)
    assert np.array_equal(bud, bits("0000011100"))


def test_reproduce_flip_all_ignores_probability():
    parent = bits("00000000")
    rng = ScriptedRng(8, 0, None, np.full(8, 0.9))
    assert np.array_equal(reproduce(parent, rng, flip_all=True), np.ones(8, np.uint8))


def test_reproduce_changed_fraction_matches_expectation():
    L = 40
    rng = np.random.default_rng(0)
    parent = rng.integers(0, 2, L).astype(np.uint8)
    changed = np.array([np.sum(reproduce(parent, rng) != parent) for _ in range(10_000)]) / L
    # a bit changes iff it is in the substring, flipped, and taken from the larva
    expected = sum(g * mutation_prob(g) * 0.5 for g in range(1, L + 1)) / L / L
    sigma = changed.std(ddof=1) / np.sqrt(len(changed))
    assert abs(changed.mean() - expected) <= 3 * sigma


def test_reproduce_changed_fraction_monte_carlo_oracle():
    """Simulate the budding steps with scalar draws and compare means."""
    L, n = 24, 10_000
    sim = np.random.default_rng(1)
    total = 0
    for _ in range(n):
        g = sim.integers(1, L + 1)
        p = mutation_prob(g)
        total += sum(1 for _ in range(g) if sim.random() < p and sim.random() >= 0.5)
    oracle = total / n / L
    rng = np.random.default_rng(2)
    parent = np.zeros(L, np.uint8)
    ours = np.mean([np.sum(reproduce(parent, rng)) for _ in range(n)]) / L
    assert ours == pytest.approx(oracle, abs=0.01)


# --- tolerance -------------------------------------------------------------------

def test_delta_t_values():
    assert delta_t(1, 17) == 0.0
    assert delta_t(2, 4) == pytest.approx(math.log(2) / 2)
    assert delta_t(2, 4) == pytest.approx(0.3466, abs=1e-4)
    assert delta_t(5, 400) == pytest.approx(delta_t(5, 100) / 2)
    # parent 10, bud 9.9, loc 8, t 36: accepted since the band exceeds 0.1
    assert delta_t(8, 36) == pytest.approx(math.log(8) / 6)
    assert 9.9 > 10 - delta_t(8, 36)


# --- optimizer loops -------------------------------------------------------------

def test_aro_constant_objective_never_replaces():
    codec = Codec(2, 3, 4)
    res = aro_run(lambda x: 1.0, codec, 200, np.random.default_rng(0))
    assert not any(res.trace.accepted)
    init = codec.random(np.random.default_rng(0))
    assert np.array_equal(res.best_chromosome, init)


@pytest.mark.parametrize("run", [aro_run, maro_run, sa_run])
def test_evaluation_count_and_determinism(run):
    codec = Codec(3, 4, 8)
    obj = CountingObjective(sphere)
    a = run(obj, codec, 150, np.random.default_rng(4))
    assert obj.evaluations == 151 == a.evaluations
    b = run(sphere, codec, 150, np.random.default_rng(4))
    assert a.trace.incumbent_fitness == b.trace.incumbent_fitness
    assert np.array_equal(a.best_x, b.best_x)


def test_aro_trace_non_decreasing():
    codec = Codec(3, 4, 8)
    for seed in range(10):
        tr = aro_run(sphere, codec, 300, np.random.default_rng(seed)).trace
        assert np.all(np.diff(tr.incumbent_fitness) >= 0)


def test_maro_best_ever_monotone_and_dip_bound():
    codec = Codec(3, 4, 8)
    for seed in range(10):
        tr = maro_run(sphere, codec, 300, np.random.default_rng(seed)).trace
        assert np.all(np.diff(tr.best_ever_fitness) >= 0)
        inc = np.array(tr.incumbent_fitness)
        drops = inc[:-1] - inc[1:]
        band = np.array(tr.delta_t[1:])
        assert np.all(drops < band + 1e-12)


def test_maro_loc_resets_and_counts_rejections():
    codec = Codec(1, 4, 4)
    tr = maro_run(sphere, codec, 400, np.random.default_rng(3)).trace
    prev_fit, prev_loc = None, 1
    for fit, loc, acc in zip(tr.incumbent_fitness, tr.loc, tr.accepted):
        if prev_fit is not None:
            if acc and fit > prev_fit:
                assert loc == 1
            elif not acc:
                assert loc == prev_loc + 1
            else:
                assert loc == prev_loc
        prev_fit, prev_loc = fit, loc


def test_maro_with_zero_tolerance_equals_aro():
    codec = Codec(3, 4, 8)
    for seed in range(5):
        a = aro_run(sphere, codec, 200, np.random.default_rng(seed))
        m = maro_run(sphere, codec, 200, np.random.default_rng(seed), tolerance=lambda l, t: 0.0)
        assert a.trace.incumbent_fitness == m.trace.incumbent_fitness
        assert a.trace.accepted == m.trace.accepted


def two_basins(x):
    # poor peak of height 1 at 0, good peak of height 2 at 6
    x = x[0]
    return float(np.exp(-x * x) + 2 * np.exp(-((x - 6) ** 2) / 0.5))


def test_maro_escapes_poor_basin_more_often_than_aro():
    codec = Codec(1, 4, 8, lower=-0.5, upper=0.5)
    aro = sum(aro_run(two_basins, codec, 300, np.random.default_rng(s)).best_fitness > 1.5
              for s in range(50))
    maro = sum(maro_run(two_basins, codec, 300, np.random.default_rng(s)).best_fitness > 1.5
               for s in range(50))
    assert maro > aro


def test_objective_failure_reports_iteration():
    calls = {"n": 0}

    def flaky(x):
        calls["n"] += 1
        if calls["n"] == 6:
            raise RuntimeError("boom")
        return 0.0

    with pytest.raises(ObjectiveError, match="iteration 5"):
        aro_run(flaky, Codec(1, 2, 2), 10, np.random.default_rng(0))


def test_sa_acceptance_rule():
    assert acceptance_probability(0.0, 0.5) == 1.0
    assert acceptance_probability(0.0, 0.0) == 1.0
    assert acceptance_probability(1.0, 0.0) == 0.0
    assert acceptance_probability(1.0, 2.0) == pytest.approx(math.exp(-0.5))


def test_sa_zero_temperature_is_hill_climbing():
    codec = Codec(3, 4, 8)
    tr = sa_run(sphere, codec, 300, np.random.default_rng(1), cooling=0.0).trace
    assert np.all(np.diff(tr.incumbent_fitness) >= 0)


def test_sa_reaches_bowl_optimum():
    res = sa_run(sphere, Codec(3, 4, 8), 2000, np.random.default_rng(0))
    assert res.best_fitness >= -0.1


# --- HMM objective ---------------------------------------------------------------

def test_vector_to_model_always_valid():
    shape = HmmShape(3, 4)
    rng = np.random.default_rng(0)
    codec = shape.codec()
    for seed in range(10_000):
        x = codec.decode(np.random.default_rng(seed).integers(0, 2, codec.length).astype(np.uint8))
        assert validate(vector_to_model(x, shape)).ok
    assert validate(vector_to_model(rng.normal(size=shape.n_params), shape)).ok


def test_equal_values_give_uniform_model_and_zero_log_odds():
    shape = HmmShape(2, 4)
    m = vector_to_model(np.full(shape.n_params, 0.5), shape)
    np.testing.assert_allclose(m.emission.table, 0.25)
    rng = np.random.default_rng(0)
    data = [np.arange(4).repeat(3)[rng.permutation(12)] for _ in range(3)]
    obj = hmm_objective(shape, "log_odds", data)
    assert obj(np.full(shape.n_params, 0.5)) == pytest.approx(0.0, abs=1e-9)


def test_objective_matches_direct_evaluation():
    rng = np.random.default_rng(2)
    model = random_discrete(rng, 3, 5)
    shape = HmmShape(3, 5)
    x = model_to_vector(model)
    rebuilt = vector_to_model(x, shape)
    assert rebuilt.allclose(model, atol=1e-5)
    data = [rng.integers(0, 5, 12) for _ in range(4)]
    lo = hmm_objective(shape, "log_odds", data)
    assert lo(x) == pytest.approx(log_odds(rebuilt, null_model(data, 5), data), abs=1e-9)
    sop = hmm_objective(shape, "sop", data, alphabet="ABCDE")
    assert sop(x) == -sop_raw(align(rebuilt, data, "ABCDE"))
    with pytest.raises(ValueError):
        hmm_objective(shape, "nope", data)
