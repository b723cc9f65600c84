import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netrewrite.boolexpr import (
    MAX_INPUTS,
    Assignment,
    BooleanCircuit,
    CircuitSyntaxError,
    compare,
    equivalent,
    evaluate,
    operators_used,
    parse_boolean_circuit,
    truth_table,
)
from netrewrite.ops import Op


def test_parse_and_emit_round_trip():
    text = "N1 = NAND(A1, A2)\nY = NAND(N1, N1)"
    c = parse_boolean_circuit(text)
    assert c.inputs == ("A1", "A2")
    assert c.output == "Y"
    assert c.text == text
    assert parse_boolean_circuit(c.text) == c


def test_parse_tolerates_spacing_and_case():
    c = parse_boolean_circuit("  y=nand( a ,b )  \n\n")
    assert c.statements == (Assignment("y", Op.NAND, ("a", "b")),)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("Y = NAND(A1, A2);", 1, "expected"),
        ("N1 = NAND(A1, A2)\nY = MUX(N1, A1)", 2, "unknown operator"),
        ("Y = NOT(A1, A2)", 1, "exactly 1"),
        ("Y = AND(A1)", 1, "at least 2"),
        ("N1 = AND(A1, A2)\nN1 = OR(A1, A2)", 2, "assigned"),
        ("N1 = AND(A1, N2)\nN2 = OR(A1, A2)", 2, ""),
        ("", None, "no assignment"),
        ("here is your circuit", 1, "expected"),
    ],
)
def test_syntax_errors(text, line, fragment):
    with pytest.raises(CircuitSyntaxError) as info:
        parse_boolean_circuit(text)
    if line is not None:
        assert info.value.line is not None
    assert fragment in str(info.value)


def test_output_is_y_when_present_else_last():
    assert parse_boolean_circuit("Y = AND(a, b)\nZ = OR(Y, a)").output == "Y"
    assert parse_boolean_circuit("P = AND(a, b)\nQ = OR(P, a)").output == "Q"


def test_truth_table_bit_order():
    c = parse_boolean_circuit("Y = AND(A1, A2)")
    assert truth_table(c).bitstring() == "0001"
    c = parse_boolean_circuit("Y = NOT(A1)")
    assert truth_table(c).bitstring() == "10"


def test_input_cap():
    args = ", ".join(f"x{i}" for i in range(MAX_INPUTS + 1))
    with pytest.raises(ValueError):
        truth_table(parse_boolean_circuit(f"Y = AND({args})"))


def test_counterexample_is_real():
    a = parse_boolean_circuit("Y = AND(a, b)")
    b = parse_boolean_circuit("Y = OR(a, b)")
    res = compare(a, b)
    assert not res.equivalent and res.reason == "outputs differ"
    assert evaluate(a, res.counterexample) != evaluate(b, res.counterexample)


def test_input_mismatch_is_not_equivalent():
    res = compare(parse_boolean_circuit("Y = AND(a, b)"), parse_boolean_circuit("Y = AND(a, c)"))
    assert not res.equivalent and res.reason.startswith("input mismatch")


def test_and_of_inverted_inputs_is_not_nand():
    wrong = parse_boolean_circuit("N1 = NOT(a)\nN2 = NOT(b)\nY = AND(N1, N2)")
    assert not equivalent(wrong, parse_boolean_circuit("Y = NAND(a, b)"))
    # it is NOR instead
    assert equivalent(wrong, parse_boolean_circuit("Y = NOR(a, b)"))


def _inverted(names):
    lines = [f"I{i} = NOT({n})" for i, n in enumerate(names)]
    return lines, [f"I{i}" for i in range(len(names))]


@pytest.mark.parametrize("n", range(2, 9))
def test_de_morgan_identities(n):
    xs = [f"x{i}" for i in range(n)]
    inv, ixs = _inverted(xs)
    j = ", ".join(xs)
    ij = ", ".join(ixs)
    pairs = [
        (f"Y = NAND({j})", "\n".join(inv + [f"Y = OR({ij})"])),
        (f"Y = NOR({j})", "\n".join(inv + [f"Y = AND({ij})"])),
        (f"Y = AND({j})", "\n".join(inv + [f"Y = NOR({ij})"])),
        (f"Y = OR({j})", "\n".join(inv + [f"Y = NAND({ij})"])),
    ]
    for lhs, rhs in pairs:
        assert equivalent(parse_boolean_circuit(lhs), parse_boolean_circuit(rhs)), lhs


def test_operators_used():
    c = parse_boolean_circuit("N1 = NOT(a)\nY = AND(N1, b)")
    assert operators_used(c) == {Op.NOT, Op.AND}


@st.composite
def circuits(draw):
    n_in = draw(st.integers(1, 5))
    names = [f"i{k}" for k in range(n_in)]
    sts = []
    for k in range(draw(st.integers(1, 8))):
        op = draw(st.sampled_from(list(Op)))
        arity = 1 if op.unary else draw(st.integers(2, 3))
        args = tuple(draw(st.sampled_from(names)) for _ in range(arity))
        target = f"t{k}"
        sts.append(Assignment(target, op, args))
        names.append(target)
    return BooleanCircuit.from_statements(sts)


@settings(max_examples=200)
@given(circuits())
def test_packed_truth_table_matches_scalar_evaluation(c):
    tt = truth_table(c).bits
    for idx, vec in enumerate(itertools.product((0, 1), repeat=len(c.inputs))):
        assign = {name: (idx >> i) & 1 for i, name in enumerate(c.inputs)}
        assert tt[idx] == evaluate(c, assign)


@settings(max_examples=100)
@given(circuits())
def test_text_round_trip(c):
    assert parse_boolean_circuit(c.text) == c
