"""Gate operators shared by netlists and Boolean circuits.

Besides single-bit semantics this module holds the packed evaluator used for
truth tables and netlist simulation: every signal is a ``uint64`` array in
which bit ``b`` of word ``w`` is the signal's value on input vector
``64 * w + b``.
"""

from __future__ import annotations

import enum
from functools import reduce
from typing import Sequence

import numpy as np

ALL_ONES = np.uint64(0xFFFF_FFFF_FFFF_FFFF)

# Bit patterns of the first six inputs inside one 64-vector word.
_LOW_PATTERNS = (
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
)


class Op(str, enum.Enum):
    AND = "AND"
    OR = "OR"
    NAND = "NAND"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"

    @property
    def unary(self) -> bool:
        return self in (Op.NOT, Op.BUF)

    def check_arity(self, n: int) -> None:
        if self.unary and n != 1:
            raise ArityError(f"{self.value} takes exactly 1 input, got {n}")
        if not self.unary and n < 2:
            raise ArityError(f"{self.value} takes at least 2 inputs, got {n}")

    @classmethod
    def parse(cls, name: str) -> "Op":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ValueError(f"unknown operator {name!r}") from None

    def __str__(self) -> str:
        return self.value


# Canonical ordering used wherever sets of operators are listed.
OP_ORDER = {op: i for i, op in enumerate(Op)}


class ArityError(ValueError):
    """Operator applied to the wrong number of inputs."""


def gate_semantics(op: Op, bits: Sequence[int]) -> int:
    """Evaluate one gate on single bits.

    XOR and XNOR of more than two inputs are parity and inverted parity.
    """
    op.check_arity(len(bits))
    if op is Op.AND:
        return int(all(bits))
    if op is Op.OR:
        return int(any(bits))
    if op is Op.NAND:
        return int(not all(bits))
    if op is Op.NOR:
        return int(not any(bits))
    if op is Op.XOR:
        return sum(bits) & 1
    if op is Op.XNOR:
        return 1 - (sum(bits) & 1)
    if op is Op.NOT:
        return 1 - bits[0]
    return bits[0]


def apply_packed(op: Op, args: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``op`` over packed vectors, 64 input vectors per word."""
    op.check_arity(len(args))
    if op is Op.BUF:
        return args[0].copy()
    if op is Op.NOT:
        return ~args[0]
    if op in (Op.AND, Op.NAND):
        out = reduce(np.bitwise_and, args)
    elif op in (Op.OR, Op.NOR):
        out = reduce(np.bitwise_or, args)
    else:
        out = reduce(np.bitwise_xor, args)
    if op in (Op.NAND, Op.NOR, Op.XNOR):
        return ~out
    return out


def n_words(n_inputs: int) -> int:
    return max(1, (1 << n_inputs) >> 6)


def valid_mask(n_inputs: int) -> np.ndarray:
    """Mask of the word bits that correspond to real vectors."""
    mask = np.full(n_words(n_inputs), ALL_ONES, dtype=np.uint64)
    if n_inputs < 6:
        mask[0] = np.uint64((1 << (1 << n_inputs)) - 1)
    return mask


def exhaustive_patterns(
    n_inputs: int, start_word: int = 0, count: int | None = None
) -> list[np.ndarray]:
    """Packed values of every input over all ``2**n_inputs`` vectors.

    Input ``i`` takes bit ``i`` of the vector index, input 0 least significant.
    ``start_word``/``count`` select a block of words for chunked sweeps.
    """
    words = n_words(n_inputs) - start_word if count is None else count
    index = np.arange(start_word, start_word + words, dtype=np.uint64)
    patterns = []
    for i in range(n_inputs):
        if i < 6:
            pat = np.full(words, np.uint64(_LOW_PATTERNS[i]), dtype=np.uint64)
        else:
            bit = (index >> np.uint64(i - 6)) & np.uint64(1)
            pat = np.where(bit == 1, ALL_ONES, np.uint64(0)).astype(np.uint64)
        patterns.append(pat)
    return patterns


def unpack_bits(packed: np.ndarray, count: int) -> np.ndarray:
    """Expand packed words into ``count`` individual bits (vector order)."""
    as_bytes = packed.astype("<u8").view(np.uint8)
    return np.unpackbits(as_bytes, bitorder="little")[:count]


def first_set_bit(packed: np.ndarray) -> int | None:
    """Index of the lowest set bit across the packed array, if any."""
    nz = np.flatnonzero(packed)
    if nz.size == 0:
        return None
    w = int(nz[0])
    word = int(packed[w])
    return 64 * w + ((word & -word).bit_length() - 1)
