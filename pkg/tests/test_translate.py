import pytest

from netrewrite.boolexpr import parse_boolean_circuit
from netrewrite.netlist import GateInstance, GateType, parse_netlist
from netrewrite.ops import Op
from netrewrite.pipeline import verify_equivalence
from netrewrite.translate import (
    ALLOWED_OPERATOR_SETS,
    NameAllocator,
    OperatorSet,
    allowed_operator_sets,
    instantiate_transformation,
    netlist_to_statements,
    representative_circuit,
    statements_to_netlist,
)


def test_operator_set_parsing_and_display():
    s = OperatorSet.parse("[OR, NOT]")
    assert s.operators == (Op.OR, Op.NOT)
    assert str(s) == "[OR, NOT]"
    assert Op.NOT in s and Op.AND not in s
    assert OperatorSet.parse("nand") == OperatorSet.of("NAND")
    with pytest.raises(ValueError):
        OperatorSet(())
    with pytest.raises(ValueError):
        OperatorSet.of("AND", "AND")


def test_allowed_table_has_extension_rows():
    assert allowed_operator_sets(GateType(Op.NOT, 1)) == (OperatorSet.of("NAND"), OperatorSet.of("NOR"))
    assert allowed_operator_sets(GateType(Op.BUF, 1)) == (OperatorSet.of("NAND"), OperatorSet.of("NOR"))
    assert set(ALLOWED_OPERATOR_SETS) == set(Op)


def test_no_set_contains_its_own_operator():
    for op, sets in ALLOWED_OPERATOR_SETS.items():
        for s in sets:
            assert op not in s, (op, s)


def test_representative_circuit():
    c = representative_circuit(GateType(Op.XNOR, 3))
    assert c.text == "Y = XNOR(A1, A2, A3)"
    assert c.inputs == ("A1", "A2", "A3")


def test_allocator_skips_taken_names():
    alloc = NameAllocator({"llmp_w0", "llmp_g2"})
    assert [alloc.wire(), alloc.instance(), alloc.wire()] == ["llmp_w1", "llmp_g3", "llmp_w4"]


def test_instantiate_binds_positionally():
    t = parse_boolean_circuit("N1 = NAND(A1, A2)\nY = NAND(N1, N1)")
    gate = GateInstance(Op.AND, "u7", "out", ("p", "q"))
    gates, fresh = instantiate_transformation(t, gate, NameAllocator({"out", "p", "q", "u7"}))
    assert fresh == ["llmp_w0"]
    assert [(g.op, g.output, g.inputs) for g in gates] == [
        (Op.NAND, "llmp_w0", ("p", "q")),
        (Op.NAND, "out", ("llmp_w0", "llmp_w0")),
    ]
    assert len({g.name for g in gates}) == 2


def test_instantiate_rejects_wrong_fan_in():
    t = parse_boolean_circuit("Y = NAND(A1, A2, A3)")
    with pytest.raises(ValueError):
        instantiate_transformation(t, GateInstance(Op.AND, "u", "y", ("a", "b")), NameAllocator())


def test_whole_netlist_statements_round_trip(small):
    text = netlist_to_statements(small)
    assert text.splitlines()[0] == "t = AND(a, b)"
    rebuilt = statements_to_netlist(text, small)
    assert verify_equivalence(small, rebuilt).status == "equivalent"


def test_escaped_names_have_no_statement_form():
    nl = parse_netlist("module m (a, y); input a; output y; wire \\w$1 ; not g (\\w$1 , a); not h (y, \\w$1 ); endmodule")
    with pytest.raises(ValueError):
        netlist_to_statements(nl)
