"""Flag-based recursive decoder for measured concatenated-C4 blocks.

A level-j block is measured transversally; the 4^j outcome bits are decoded
bottom-up, four at a time.  Decoding a C4 group yields one corrected bit
plus a flag; the flags feed into the parent group's decoding, where flagged
positions mark located errors that can be corrected using the syndrome.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .c4 import MeasurementBasis, is_benign_pair, logical_bit, syndrome


@dataclass(frozen=True)
class FlaggedBits:
    """Four outcome bits with per-position flags."""

    bits: Tuple[int, int, int, int]
    flags: Tuple[bool, bool, bool, bool]

    def __post_init__(self) -> None:
        if len(self.bits) != 4 or len(self.flags) != 4:
            raise ValueError("FlaggedBits requires exactly 4 bits and 4 flags")


@dataclass(frozen=True)
class DecodeResult:
    value: int
    flagged: bool


@dataclass(frozen=True)
class MeasurementRecord:
    """Raw transversal measurement of a level-`level` block."""

    level: int
    basis: MeasurementBasis
    leaves: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if len(self.leaves) != 4 ** self.level:
            raise ValueError(
                f"level {self.level} requires {4 ** self.level} leaves, "
                f"got {len(self.leaves)}"
            )


def decode_block(inp: FlaggedBits, basis: MeasurementBasis) -> DecodeResult:
    """Decode one C4 group of four (possibly flagged) bits.

    Three cases, by the number of flagged positions:

    (a) none flagged: a nontrivial syndrome indicates an unlocated error;
        flip bit 1 by convention and flag the block.
    (b) exactly one flagged: the error, if any, is located; flip the
        flagged bit when the syndrome is nontrivial.  Never flag.
    (c) two or more flagged: flag unless the flagged positions form a
        benign pair (acting only on the gauge qubit); on a nontrivial
        syndrome flip the lowest-indexed flagged bit by convention.
    """
    bits = list(inp.bits)
    flags = inp.flags
    s = syndrome(bits)
    flagged_positions = [i for i, fl in enumerate(flags) if fl]
    n_flagged = len(flagged_positions)

    if n_flagged == 0:
        if s:
            bits[0] ^= 1
        out_flag = bool(s)
    elif n_flagged == 1:
        if s:
            bits[flagged_positions[0]] ^= 1
        out_flag = False
    else:
        harmful = any(
            not is_benign_pair((i + 1, k + 1), basis)
            for a, i in enumerate(flagged_positions)
            for k in flagged_positions[a + 1 :]
        )
        if s:
            bits[flagged_positions[0]] ^= 1
        out_flag = harmful

    return DecodeResult(value=logical_bit(bits, basis), flagged=out_flag)


def decode_recursive(record: MeasurementRecord) -> DecodeResult:
    """Decode a full level-j measurement record bottom-up.

    Leaves enter unflagged; each level's DecodeResults become the flagged
    bits of the next level up.  Returns the top-level result.
    """
    n = len(record.leaves)
    level_bits: List[int] = [int(b) & 1 for b in record.leaves]
    level_flags: List[bool] = [False] * n

    while len(level_bits) > 1:
        next_bits: List[int] = []
        next_flags: List[bool] = []
        for g in range(0, len(level_bits), 4):
            res = decode_block(
                FlaggedBits(
                    bits=tuple(level_bits[g : g + 4]),
                    flags=tuple(level_flags[g : g + 4]),
                ),
                record.basis,
            )
            next_bits.append(res.value)
            next_flags.append(res.flagged)
        level_bits, level_flags = next_bits, next_flags

    return DecodeResult(value=level_bits[0], flagged=level_flags[0])


def decode_leaves(level: int, basis: MeasurementBasis, leaves: Sequence[int]) -> DecodeResult:
    """Convenience wrapper building the MeasurementRecord inline."""
    return decode_recursive(MeasurementRecord(level=level, basis=basis, leaves=tuple(leaves)))
