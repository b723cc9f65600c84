import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netrewrite.ops import (
    ArityError,
    Op,
    apply_packed,
    exhaustive_patterns,
    first_set_bit,
    gate_semantics,
    n_words,
    unpack_bits,
    valid_mask,
)


def test_parse_is_case_insensitive():
    assert Op.parse("nand") is Op.NAND
    assert Op.parse(" Xnor ") is Op.XNOR
    with pytest.raises(ValueError):
        Op.parse("MUX")


def test_arity_rules():
    Op.NOT.check_arity(1)
    Op.AND.check_arity(5)
    with pytest.raises(ArityError):
        Op.NOT.check_arity(2)
    with pytest.raises(ArityError):
        Op.NAND.check_arity(1)


def test_two_input_truth_tables():
    expect = {
        Op.AND: [0, 0, 0, 1],
        Op.OR: [0, 1, 1, 1],
        Op.NAND: [1, 1, 1, 0],
        Op.NOR: [1, 0, 0, 0],
        Op.XOR: [0, 1, 1, 0],
        Op.XNOR: [1, 0, 0, 1],
    }
    for op, col in expect.items():
        got = [gate_semantics(op, (a, b)) for a, b in [(0, 0), (0, 1), (1, 0), (1, 1)]]
        assert got == col, op


def test_multi_input_xor_is_parity():
    for bits in itertools.product((0, 1), repeat=4):
        assert gate_semantics(Op.XOR, bits) == sum(bits) % 2
        assert gate_semantics(Op.XNOR, bits) == 1 - sum(bits) % 2


@pytest.mark.parametrize("n", [0, 1, 3, 6, 7, 9])
def test_exhaustive_patterns_enumerate_every_vector(n):
    pats = exhaustive_patterns(n)
    count = 1 << n
    bits = np.array([unpack_bits(p, count) for p in pats]) if n else np.zeros((0, count))
    for idx in range(count):
        assert [int(bits[i, idx]) for i in range(n)] == [(idx >> i) & 1 for i in range(n)]
    assert len(valid_mask(n)) == n_words(n)


def test_chunked_patterns_match_full():
    full = exhaustive_patterns(10)
    part = exhaustive_patterns(10, start_word=4, count=6)
    for f, p in zip(full, part):
        assert np.array_equal(f[4:10], p)


@given(st.sampled_from([o for o in Op if not o.unary]), st.lists(st.integers(0, 2**64 - 1), min_size=2, max_size=5))
def test_packed_agrees_with_scalar(op, words):
    args = [np.array([w], dtype=np.uint64) for w in words]
    out = int(apply_packed(op, args)[0])
    for bit in range(0, 64, 7):
        bits = [(w >> bit) & 1 for w in words]
        assert (out >> bit) & 1 == gate_semantics(op, bits)


def test_first_set_bit():
    assert first_set_bit(np.zeros(3, dtype=np.uint64)) is None
    arr = np.array([0, 0b1000, 1], dtype=np.uint64)
    assert first_set_bit(arr) == 64 + 3
