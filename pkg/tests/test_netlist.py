import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netrewrite.netlist import (
    GateInstance,
    GateType,
    Netlist,
    NetlistError,
    NetlistSyntaxError,
    characterize,
    critical_path_depth,
    emit_netlist,
    overhead,
    parse_netlist,
    scan_interface,
    simulate,
)
from netrewrite.ops import Op, exhaustive_patterns, unpack_bits


def test_parse_small(small):
    assert small.inputs == ("a", "b", "c")
    assert small.outputs == ("y", "z")
    assert [g.name for g in small.gates] == ["g1", "g2", "g3"]
    assert small.driver("t").op is Op.AND


def test_ansi_style_header():
    nl = parse_netlist(
        "module m (input a, input b, output y);\n  nand u (y, a, b);\nendmodule\n"
    )
    assert nl.inputs == ("a", "b") and nl.outputs == ("y",)


def test_comments_and_escaped_names():
    nl = parse_netlist(
        "// top\nmodule m (a, b, y); /* block\ncomment */\n input a, b; output y;\n"
        " wire \\n[0] ;\n and g1 (\\n[0] , a, b);\n not g2 (y, \\n[0] );\nendmodule"
    )
    assert nl.driver("\\n[0]").op is Op.AND
    assert parse_netlist(emit_netlist(nl)) == nl


def test_constants():
    nl = parse_netlist("module m (a, y); input a; output y; and g (y, a, 1'b1); endmodule")
    stim = {"a": np.array([0b10], dtype=np.uint64)}
    assert int(simulate(nl, stim, ["y"])["y"][0]) & 0b11 == 0b10


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("module m (a, y); input a; output y; and g (y, a, q); endmodule", "undeclared"),
        ("module m (a, y); input a; output y; not g (y, a); not h (y, a); endmodule", "driv"),
        ("module m (a, y); input a; output y; wire p, q; and g (p, q, a); and h (q, p, a); buf k (y, p); endmodule", "cycle"),
        ("module m (a, y); input [3:0] a; output y; endmodule", "vector"),
        ("module m (a, y); input a; output y; nand (y, a, a); endmodule", "instance name"),
        ("module m (a, y); input a; output y; not g (a, y); endmodule", "input"),
        ("module m (a, y); input a; output y; not g (y, a, a); endmodule", "exactly 1"),
        ("module m (a, y); input a; output y; endmodule module n (a); input a; endmodule", "module"),
        ("module m (a, y); input a; output y; and g (y, a a); endmodule", ""),
    ],
)
def test_rejections(src, fragment):
    with pytest.raises(NetlistError) as info:
        parse_netlist(src)
    assert fragment in str(info.value)


def test_syntax_error_has_position():
    with pytest.raises(NetlistSyntaxError) as info:
        parse_netlist("module m (a, y);\n input a;\n output y\n and g (y, a, a);\nendmodule")
    assert info.value.line >= 3


def test_unknown_cells_are_kept_opaque(fixtures):
    nl = fixtures["count2"]
    assert len(nl.opaque_items) == 2
    assert all(item.startswith("DFF_X1") for item in nl.opaque_items)
    again = parse_netlist(emit_netlist(nl))
    assert again == nl


def test_emit_round_trip_for_every_fixture(fixtures):
    for name, nl in fixtures.items():
        assert parse_netlist(emit_netlist(nl)) == nl, name


def test_characterize(fixtures):
    assert characterize(fixtures["c17"]) == [GateType(Op.NAND, 2)]
    merged = characterize(fixtures["c17"], fixtures["parity16"])
    assert merged == [GateType(Op.NAND, 2), GateType(Op.XOR, 2)]
    assert characterize() == []
    assert fixtures["c17"].gate_counts() == {GateType(Op.NAND, 2): 6}


def _longest_path_by_enumeration(nl):
    """Walk every input-to-output path explicitly."""
    best = 0

    def walk(net, seen):
        nonlocal best
        g = nl.driver(net)
        if g is None:
            best = max(best, seen)
            return
        for n in g.inputs:
            walk(n, seen + 1)

    for out in nl.outputs:
        walk(out, 0)
    return best


def test_critical_path_depth(fixtures):
    assert critical_path_depth(fixtures["c17"]) == 3
    assert critical_path_depth(fixtures["parity16"]) == 4
    for name in ("c17", "adder8", "parity16", "count2"):
        nl = fixtures[name]
        assert critical_path_depth(nl) == _longest_path_by_enumeration(nl), name


def test_overhead(small):
    rep = overhead(small, small)
    assert rep.gate_count_overhead_pct == 0.0 and rep.depth_overhead_pct == 0.0
    empty = parse_netlist("module e (a, y); input a; output y; endmodule")
    assert overhead(empty, empty).gate_count_overhead_pct is None


def test_scan_interface_with_flip_flops(fixtures):
    ins, obs = scan_interface(fixtures["count2"])
    assert ins == ("clk", "rst", "en", "q0", "q1")
    assert obs[:3] == ("q0", "q1", "wrap")
    assert set(obs[3:]) == {"d0r", "d1r"}


def _run(nl, values):
    stim = {k: np.array([np.uint64(v)], dtype=np.uint64) for k, v in values.items()}
    out = simulate(nl, stim, nl.outputs)
    return {k: int(v[0]) & 1 for k, v in out.items()}


def _word(nl, prefix, width, out):
    return sum(out[f"{prefix}{i}"] << i for i in range(width))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 1))
def test_adder_fixture_adds(fixtures, a, b, cin):
    nl = fixtures["adder8"]
    vals = {f"a{i}": (a >> i) & 1 for i in range(8)}
    vals |= {f"b{i}": (b >> i) & 1 for i in range(8)}
    vals["cin"] = cin
    out = _run(nl, vals)
    assert _word(nl, "s", 8, out) + (out["cout"] << 8) == a + b + cin


def test_multiplier_fixture_multiplies(fixtures):
    nl = fixtures["mult5"]
    for x in range(32):
        for y in range(32):
            vals = {f"x{i}": (x >> i) & 1 for i in range(5)} | {f"y{i}": (y >> i) & 1 for i in range(5)}
            assert _word(nl, "p", 10, _run(nl, vals)) == x * y


def test_parity_fixture(fixtures):
    nl = fixtures["parity16"]
    pats = exhaustive_patterns(16)
    got = unpack_bits(simulate(nl, dict(zip(nl.inputs, pats)), ["p"])["p"], 1 << 16)
    expect = np.array([bin(i).count("1") & 1 for i in range(1 << 16)], dtype=np.uint8)
    assert np.array_equal(got, expect)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 127), st.integers(0, 127), st.integers(0, 3), st.integers(0, 1), st.integers(0, 1))
def test_alu_fixture(fixtures, a, b, op, cin, en):
    nl = fixtures["alu7"]
    vals = {f"a{i}": (a >> i) & 1 for i in range(7)} | {f"b{i}": (b >> i) & 1 for i in range(7)}
    vals |= {"op0": op & 1, "op1": op >> 1, "cin": cin, "en": en}
    out = _run(nl, vals)
    r = _word(nl, "r", 7, out)
    if not en:
        expect = 0
    elif op == 0:
        expect = (a + b + cin) & 0x7F
    elif op == 1:
        expect = a & b
    elif op == 2:
        expect = ~(a ^ b) & 0x7F
    else:
        expect = 0 if cin else ~(a | b) & 0x7F
    assert r == expect
    assert out["zero"] == int(r == 0)
    assert out["par"] == bin(r).count("1") & 1
    assert out["cout"] == (((a + b + cin) >> 7) & 1 if en and op == 0 else 0)


def test_direct_construction_validates():
    with pytest.raises(NetlistError):
        Netlist("m", (("a", "input"), ("y", "output")), (), (GateInstance(Op.NOT, "g", "y", ("q",)),))
