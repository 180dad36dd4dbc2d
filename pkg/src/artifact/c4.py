"""The C4 code algebra.

The code is the 4-qubit error-detecting code with check operators
``σz⊗σz⊗σz⊗σz`` and ``σx⊗σx⊗σx⊗σx``.  It encodes one protected
("logical") qubit and one irrelevant ("gauge") qubit.  Everything in this
module works on classical 4-bit measurement records; qubit positions are
1-indexed throughout, matching the usual presentation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import FrozenSet, Sequence, Tuple


class ErrorType(enum.Enum):
    """Pauli error types.  X anticommutes with σz measurements, Z with σx."""

    X = "x"
    Z = "z"


class MeasurementBasis(enum.Enum):
    """Transversal measurement bases.

    A z-basis measurement detects type-X errors; an x-basis measurement
    detects type-Z errors.
    """

    ZBasis = "z"
    XBasis = "x"

    @property
    def detects(self) -> ErrorType:
        return ErrorType.X if self is MeasurementBasis.ZBasis else ErrorType.Z


# Support sets of the encoded Pauli operators, 1-indexed.
LOGICAL_Z_SUPPORT: FrozenSet[int] = frozenset({1, 3})
LOGICAL_X_SUPPORT: FrozenSet[int] = frozenset({1, 2})
GAUGE_Z_SUPPORT: FrozenSet[int] = frozenset({3, 4})
GAUGE_X_SUPPORT: FrozenSet[int] = frozenset({1, 3})

# Pairs of same-type errors that act at most on the gauge qubit, i.e. are
# harmless to the logical qubit.  Keyed by the basis that detects them.
BENIGN_PAIRS = {
    MeasurementBasis.ZBasis: (frozenset({1, 3}), frozenset({2, 4})),
    MeasurementBasis.XBasis: (frozenset({1, 2}), frozenset({3, 4})),
}


@dataclass(frozen=True)
class C4Operators:
    """Descriptor bundle for the code's checks and encoded operators."""

    checks: Tuple[str, str] = ("zzzz", "xxxx")
    logical_z: FrozenSet[int] = field(default=LOGICAL_Z_SUPPORT)
    logical_x: FrozenSet[int] = field(default=LOGICAL_X_SUPPORT)
    gauge_z: FrozenSet[int] = field(default=GAUGE_Z_SUPPORT)
    gauge_x: FrozenSet[int] = field(default=GAUGE_X_SUPPORT)


@dataclass(frozen=True)
class PairClass:
    """Classification of an unordered index pair as benign or harmful."""

    pair: FrozenSet[int]
    harmful_z_basis: bool
    harmful_x_basis: bool


def _check_bits(bits: Sequence[int]) -> None:
    if len(bits) != 4:
        raise ValueError(f"expected 4 bits, got {len(bits)}")
    for b in bits:
        if b not in (0, 1, False, True):
            raise ValueError(f"bit values must be 0/1, got {b!r}")


def syndrome(bits: Sequence[int]) -> int:
    """Parity of a transversally measured block: the eigenvalue bit of the
    basis-matching check operator."""
    _check_bits(bits)
    return (bits[0] ^ bits[1] ^ bits[2] ^ bits[3]) & 1


def logical_bit(bits: Sequence[int], basis: MeasurementBasis) -> int:
    """The encoded logical qubit's measurement outcome.

    In the z basis the logical value is read off positions 1 and 3
    (support of the encoded σz); in the x basis positions 1 and 2.
    """
    _check_bits(bits)
    if basis is MeasurementBasis.ZBasis:
        return (bits[0] ^ bits[2]) & 1
    return (bits[0] ^ bits[1]) & 1


def is_benign_pair(pair: Sequence[int], basis: MeasurementBasis) -> bool:
    """Whether a pair of same-type errors is gauge-equivalent to an
    operator acting only on the gauge qubit (and hence harmless).

    For x errors (z-basis measurement) the benign pairs are {1,3} and
    {2,4}; for z errors (x-basis measurement) they are {1,2} and {3,4}.
    """
    idx = frozenset(pair)
    if len(idx) != 2:
        raise ValueError(f"expected two distinct indices, got {tuple(pair)}")
    if not idx <= {1, 2, 3, 4}:
        raise ValueError(f"indices must lie in 1..4, got {tuple(pair)}")
    return idx in BENIGN_PAIRS[basis]


def classify_pair(pair: Sequence[int]) -> PairClass:
    """PairClass record for an index pair, covering both bases."""
    idx = frozenset(pair)
    return PairClass(
        pair=idx,
        harmful_z_basis=not is_benign_pair(pair, MeasurementBasis.ZBasis),
        harmful_x_basis=not is_benign_pair(pair, MeasurementBasis.XBasis),
    )
