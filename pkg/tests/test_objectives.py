import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmmaro import HmmModel
from hmmaro.objectives import (
    Alignment,
    DegenerateNullError,
    align,
    column_distance,
    format_score,
    log_odds,
    null_model,
    sop_raw,
    sop_reference,
)

from conftest import random_discrete


# --- null model / log-odds ------------------------------------------------------

def test_null_model_pseudocounts():
    data = [np.zeros(3, int), np.zeros(5, int)]
    null = null_model(data, 2)
    np.testing.assert_allclose(null.emission.table[0], [0.9, 0.1])
    assert null.n_states == 1
    assert np.array_equal(null.transition, [[1.0]])


def test_null_model_single_symbol():
    assert null_model([np.zeros(4, int)], 1).emission.table[0, 0] == 1.0


def test_null_model_uniform_data_within_3_sigma():
    rng = np.random.default_rng(0)
    K, n = 5, 20_000
    data = [rng.integers(0, K, 100) for _ in range(n // 100)]
    b = null_model(data, K).emission.table[0]
    sigma = np.sqrt((1 / K) * (1 - 1 / K) / n)
    assert np.all(np.abs(b - 1 / K) <= 3 * sigma)


def test_null_model_empty():
    with pytest.raises(ValueError):
        null_model([], 3)


def test_log_odds_self_is_zero(rng):
    m = random_discrete(rng, 3, 4)
    data = [rng.integers(0, 4, 10) for _ in range(5)]
    assert log_odds(m, m, data) == 0.0


def one_state(p0):
    return HmmModel.discrete([1.0], [[1.0]], [[p0, 1 - p0]])


def test_log_odds_ratio_two_is_one_bit():
    # P(model) = 0.5, P(null) = 0.25
    assert log_odds(one_state(0.5), one_state(0.25), [np.array([0])]) == pytest.approx(1.0)


def test_log_odds_mean_of_ratios():
    # ratios 2 and 8
    data = [np.array([0]), np.array([0, 0, 0])]
    assert log_odds(one_state(0.5), one_state(0.25), data) == pytest.approx(2.0)


def test_log_odds_invariant_under_duplication(rng):
    m, null = random_discrete(rng, 2, 3), random_discrete(rng, 1, 3)
    data = [rng.integers(0, 3, 8) for _ in range(4)]
    assert log_odds(m, null, data + data) == pytest.approx(log_odds(m, null, data), abs=1e-12)


def test_log_odds_impossible_cases():
    impossible = one_state(1.0)
    assert log_odds(impossible, one_state(0.5), [np.array([1])]) == -np.inf
    with pytest.raises(DegenerateNullError, match="degenerate null"):
        log_odds(one_state(0.5), impossible, [np.array([1])])


# --- alignment construction -----------------------------------------------------

def test_align_identical_sequences_gap_free(rng):
    m = random_discrete(rng, 3, 4)
    s = rng.integers(0, 4, 9)
    aln = align(m, [s, s.copy(), s.copy()], "ACGT")
    assert len(set(aln.rows)) == 1
    assert "-" not in aln.rows[0] and aln.width == 9


def test_align_single_sequence(rng):
    m = random_discrete(rng, 2, 4)
    aln = align(m, [np.array([0, 1, 2, 3, 3])], "ACGT")
    assert aln.rows == ("ACGTT",)


def test_align_left_to_right_hand_trace():
    # state 0 emits A, state 1 emits C; left-to-right topology
    m = HmmModel.discrete([1.0, 0.0], [[0.5, 0.5], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]])
    a = np.array([0, 0, 1])  # path 0 0 1 -> keys (0,0) (0,1) (1,0)
    b = np.array([0, 1, 1])  # path 0 1 1 -> keys (0,0) (1,0) (1,1)
    aln = align(m, [a, b], "AC")
    assert aln.rows == ("AAC-", "A-CC")


def test_align_conflicting_orders_split_columns():
    # paths [0,1] and [1,0]: visit orders conflict
    m = HmmModel.discrete([0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]])
    aln = align(m, [np.array([0, 1]), np.array([1, 0])], "AC")
    assert aln.degapped() == ["AC", "CA"]


def test_align_degapping_recovers_inputs():
    rng = np.random.default_rng(4)
    for _ in range(30):
        m = random_discrete(rng, 3, 4)
        seqs = [rng.integers(0, 4, rng.integers(1, 15)) for _ in range(5)]
        aln = align(m, seqs, "ACGT")
        assert aln.degapped() == ["".join("ACGT"[i] for i in s) for s in seqs]


def test_align_undecodable(chain):
    with pytest.raises(ValueError, match="seq1"):
        align(chain, [np.array([0, 1]), np.array([1, 1])], "AB")


# --- sum of pairs ---------------------------------------------------------------

def test_column_distance_rules():
    assert column_distance("AC-G", "AC-G") == 0
    assert column_distance("A-", "C-") == 1
    assert column_distance("A", "-") == 1
    assert column_distance("--", "--") == 0


def test_sop_raw_examples():
    assert sop_raw(Alignment(("ACGT", "ACGT"))) == 0
    # pairwise distances 1, 2, 3
    assert sop_raw(Alignment(("AAAA", "CAAA", "CCCA"))) == 1 + 3 + 2
    with pytest.raises(ValueError):
        sop_raw(Alignment(("A",)))


def test_sop_raw_matches_double_loop():
    rng = np.random.default_rng(9)
    rows = ["".join(rng.choice(list("AC-"), 12)) for _ in range(5)]
    expected = 0
    for i in range(5):
        for j in range(i + 1, 5):
            expected += sum(1 for a, b in zip(rows[i], rows[j]) if a != b)
    assert sop_raw(Alignment(tuple(rows))) == expected


@settings(max_examples=50, deadline=None)
@given(st.lists(st.text("AC-", min_size=6, max_size=6), min_size=2, max_size=6), st.randoms())
def test_sop_raw_row_order_invariant(rows, rnd):
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    assert sop_raw(Alignment(tuple(rows))) == sop_raw(Alignment(tuple(shuffled)))


def test_sop_reference_identity_and_zero():
    ref = Alignment(("AC-GT", "ACCGT", "-CCG-"))
    assert sop_reference(ref, ref) == 1.0
    # no column holds residues from two rows
    test = Alignment(("ACGT" + "-" * 8, "----ACCGT---", "---------CCG"))
    assert sop_reference(test, ref) == 0.0


def test_sop_reference_half():
    ref = Alignment(("AC", "AC"))  # pairs (0,0) and (1,1)
    test = Alignment(("AC-", "A-C"))  # keeps only the first
    assert sop_reference(test, ref) == 0.5


def test_sop_reference_mismatch():
    with pytest.raises(ValueError):
        sop_reference(Alignment(("AC", "AC")), Alignment(("AC", "AG")))


def _random_alignment(rng, seqs):
    width = max(len(s) for s in seqs) + 3
    rows = []
    for s in seqs:
        slots = np.sort(rng.choice(width, len(s), replace=False))
        row = ["-"] * width
        for c, ch in zip(slots, s):
            row[c] = ch
        rows.append("".join(row))
    return Alignment(tuple(rows))


def test_sop_reference_bounded_on_random_pairs():
    rng = np.random.default_rng(10)
    for _ in range(200):
        seqs = ["".join(rng.choice(list("ACGT"), rng.integers(1, 7))) for _ in range(3)]
        a, b = _random_alignment(rng, seqs), _random_alignment(rng, seqs)
        assert 0.0 <= sop_reference(a, b) <= 1.0


def test_alignment_invariants():
    with pytest.raises(ValueError):
        Alignment(("AC", "A"))
    assert format_score(0.5) == "0.500"


def test_pair_enumeration_is_consistent():
    ref = Alignment(("ABC", "ABC", "ABC"))
    # three sequences, three columns, three pairs per column
    n = sum(1 for _ in itertools.combinations(range(3), 2)) * 3
    half = Alignment(("ABC---", "ABC---", "---ABC"))
    assert sop_reference(half, ref) == pytest.approx(3 / n)
