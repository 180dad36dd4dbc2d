"""C4 code algebra: syndromes, logical bits, benign/harmful pairs."""
import itertools

import pytest

from artifact.c4 import (
    BENIGN_PAIRS,
    GAUGE_X_SUPPORT,
    GAUGE_Z_SUPPORT,
    LOGICAL_X_SUPPORT,
    LOGICAL_Z_SUPPORT,
    ErrorType,
    MeasurementBasis,
    classify_pair,
    is_benign_pair,
    logical_bit,
    syndrome,
)

ALL_PAIRS = [frozenset(p) for p in itertools.combinations(range(1, 5), 2)]


def test_operator_supports():
    assert LOGICAL_Z_SUPPORT == frozenset({1, 3})
    assert LOGICAL_X_SUPPORT == frozenset({1, 2})
    assert GAUGE_Z_SUPPORT == frozenset({3, 4})
    assert GAUGE_X_SUPPORT == frozenset({1, 3})


def test_basis_detection():
    assert MeasurementBasis.ZBasis.detects is ErrorType.X
    assert MeasurementBasis.XBasis.detects is ErrorType.Z


@pytest.mark.parametrize(
    "bits,expected",
    [([0, 0, 0, 0], 0), ([1, 0, 0, 0], 1), ([1, 1, 0, 0], 0)],
)
def test_syndrome_examples(bits, expected):
    assert syndrome(bits) == expected


@pytest.mark.parametrize(
    "bits,basis,expected",
    [
        ([0, 0, 0, 0], MeasurementBasis.ZBasis, 0),
        ([1, 1, 0, 0], MeasurementBasis.ZBasis, 1),
        ([1, 1, 0, 0], MeasurementBasis.XBasis, 0),
    ],
)
def test_logical_bit_examples(bits, basis, expected):
    assert logical_bit(bits, basis) == expected


@pytest.mark.parametrize(
    "pair,basis,expected",
    [
        ((1, 3), MeasurementBasis.ZBasis, True),
        ((2, 4), MeasurementBasis.ZBasis, True),
        ((1, 2), MeasurementBasis.ZBasis, False),
        ((1, 2), MeasurementBasis.XBasis, True),
        ((3, 4), MeasurementBasis.XBasis, True),
        ((1, 3), MeasurementBasis.XBasis, False),
    ],
)
def test_benign_pair_examples(pair, basis, expected):
    assert is_benign_pair(pair, basis) is expected


@pytest.mark.parametrize("pair", [(1, 1), (0, 2), (3, 5), (1,), (1, 2, 3)])
def test_benign_pair_rejects_bad_indices(pair):
    with pytest.raises(ValueError):
        is_benign_pair(pair, MeasurementBasis.ZBasis)


def test_exactly_four_harmful_pairs_per_basis():
    for basis in MeasurementBasis:
        harmful = [p for p in ALL_PAIRS if not is_benign_pair(tuple(p), basis)]
        assert len(harmful) == 4


def test_classify_pair_matches_benign_table():
    for pair in ALL_PAIRS:
        cls = classify_pair(tuple(pair))
        assert cls.harmful_z_basis == (pair not in BENIGN_PAIRS[MeasurementBasis.ZBasis])
        assert cls.harmful_x_basis == (pair not in BENIGN_PAIRS[MeasurementBasis.XBasis])


def test_benign_iff_logical_preserved_on_trivial_syndrome_strings():
    # A weight-2 error pattern is benign exactly when applying it to any
    # 4-bit string with trivial syndrome leaves the logical bit unchanged.
    for basis in MeasurementBasis:
        for pair in ALL_PAIRS:
            preserved = True
            for bits in itertools.product((0, 1), repeat=4):
                if syndrome(bits) != 0:
                    continue
                flipped = [b ^ (i + 1 in pair) for i, b in enumerate(bits)]
                if logical_bit(flipped, basis) != logical_bit(bits, basis):
                    preserved = False
            assert is_benign_pair(tuple(pair), basis) is preserved


def test_weight4_error_acts_trivially():
    for basis in MeasurementBasis:
        for bits in itertools.product((0, 1), repeat=4):
            flipped = [b ^ 1 for b in bits]
            assert syndrome(flipped) == syndrome(bits)
            assert logical_bit(flipped, basis) == logical_bit(bits, basis)


def test_logicals_commute_with_checks_and_gauges():
    # Supports viewed as F2 vectors: an x-type operator anticommutes with a
    # z-type one iff their supports overlap oddly.
    assert len(LOGICAL_Z_SUPPORT) % 2 == 0  # commutes with the sigma-x check
    assert len(LOGICAL_X_SUPPORT) % 2 == 0  # commutes with the sigma-z check
    assert len(LOGICAL_Z_SUPPORT & GAUGE_X_SUPPORT) % 2 == 0
    assert len(LOGICAL_X_SUPPORT & GAUGE_Z_SUPPORT) % 2 == 0
