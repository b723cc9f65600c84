"""Regenerate the bundled fixture netlists in src/netrewrite/data/.

Run from the repository root: python3 tools/gen_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

from netrewrite.netlist import GateInstance, Netlist, emit_netlist, parse_netlist
from netrewrite.ops import Op

DATA = Path(__file__).resolve().parents[1] / "src" / "netrewrite" / "data"


class Builder:
    def __init__(self, name: str):
        self.name = name
        self.ports: list[tuple[str, str]] = []
        self.wires: list[str] = []
        self.gates: list[GateInstance] = []
        self.k = 0

    def inp(self, *names: str) -> list[str]:
        self.ports += [(n, "input") for n in names]
        return list(names)

    def out(self, *names: str) -> None:
        self.ports += [(n, "output") for n in names]

    def gate(self, op: Op, *ins: str, y: str | None = None) -> str:
        self.k += 1
        if y is None:
            y = f"n{self.k}"
            self.wires.append(y)
        self.gates.append(GateInstance(op, f"U{self.k}", y, tuple(ins)))
        return y

    def full_adder(self, a, b, c, s=None, co=None):
        t = self.gate(Op.XOR, a, b)
        s = self.gate(Op.XOR, t, c, y=s)
        g1 = self.gate(Op.AND, a, b)
        g2 = self.gate(Op.AND, t, c)
        co = self.gate(Op.OR, g1, g2, y=co)
        return s, co

    def half_adder(self, a, b, s=None, co=None):
        return self.gate(Op.XOR, a, b, y=s), self.gate(Op.AND, a, b, y=co)

    def netlist(self) -> Netlist:
        return Netlist(self.name, tuple(self.ports), tuple(self.wires), tuple(self.gates), ())


def adder8() -> Netlist:
    b = Builder("adder8")
    a_ = b.inp(*(f"a{i}" for i in range(8)))
    b_ = b.inp(*(f"b{i}" for i in range(8)))
    (c,) = b.inp("cin")
    b.out(*(f"s{i}" for i in range(8)), "cout")
    for i in range(8):
        _, c = b.full_adder(a_[i], b_[i], c, s=f"s{i}", co="cout" if i == 7 else None)
    return b.netlist()


def mult5() -> Netlist:
    """5x5 unsigned array multiplier."""
    n = 5
    b = Builder("mult5")
    x = b.inp(*(f"x{i}" for i in range(n)))
    y = b.inp(*(f"y{i}" for i in range(n)))
    b.out(*(f"p{i}" for i in range(2 * n)))
    pp = [[b.gate(Op.AND, x[j], y[i]) for j in range(n)] for i in range(n)]
    # row-by-row carry-save accumulation, ripple on the last row
    acc = pp[0][:]  # weights 0..n-1
    outs = {0: acc[0]}
    acc = acc[1:]  # weights 1..n-1 (relative to row 1)
    for i in range(1, n):
        row = pp[i]
        nxt = []
        carry = None
        for j in range(n):
            a = acc[j] if j < len(acc) else None
            p = row[j]
            if a is None and carry is None:
                s = p
            elif a is None:
                s, carry = b.half_adder(p, carry)
                nxt.append(s)
                continue
            elif carry is None:
                s, carry = b.half_adder(a, p)
            else:
                s, carry = b.full_adder(a, p, carry)
            nxt.append(s)
        nxt.append(carry)
        outs[i] = nxt[0]
        acc = nxt[1:]
    for k, net in enumerate(acc, start=n):
        outs[k] = net
    # tie results to output ports through buffers
    for k in range(2 * n):
        b.gate(Op.BUF, outs[k], y=f"p{k}")
    return b.netlist()


def alu7() -> Netlist:
    """7-bit ALU: add, and, xnor, nor3-masked pass, selected by op1 op0."""
    w = 7
    b = Builder("alu7")
    a = b.inp(*(f"a{i}" for i in range(w)))
    bb = b.inp(*(f"b{i}" for i in range(w)))
    op0, op1, cin, en = b.inp("op0", "op1", "cin", "en")
    b.out(*(f"r{i}" for i in range(w)), "cout", "zero", "par")
    nop0 = b.gate(Op.NOT, op0)
    nop1 = b.gate(Op.NOT, op1)
    sel = [
        b.gate(Op.AND, nop1, nop0, en),
        b.gate(Op.AND, nop1, op0, en),
        b.gate(Op.AND, op1, nop0, en),
        b.gate(Op.NOR, nop1, nop0, b.gate(Op.NOT, en)),
    ]
    c = cin
    res = []
    for i in range(w):
        s, c = b.full_adder(a[i], bb[i], c)
        f_and = b.gate(Op.AND, a[i], bb[i])
        f_xn = b.gate(Op.XNOR, a[i], bb[i])
        f_pass = b.gate(Op.NOR, a[i], bb[i], b.gate(Op.BUF, cin))
        terms = [
            b.gate(Op.NAND, sel[0], s),
            b.gate(Op.NAND, sel[1], f_and),
            b.gate(Op.NAND, sel[2], f_xn),
            b.gate(Op.NAND, sel[3], f_pass),
        ]
        res.append(b.gate(Op.NAND, *terms, y=f"r{i}"))
    b.gate(Op.AND, c, sel[0], y="cout")
    lo = b.gate(Op.NOR, res[0], res[1], res[2])
    hi = b.gate(Op.NOR, res[3], res[4], res[5], res[6])
    b.gate(Op.AND, lo, hi, y="zero")
    px = b.gate(Op.XOR, res[0], res[1], res[2])
    py = b.gate(Op.XNOR, res[3], res[4], res[5], res[6])
    b.gate(Op.XNOR, px, py, y="par")
    return b.netlist()


def parity16() -> Netlist:
    b = Builder("parity16")
    level = b.inp(*(f"d{i}" for i in range(16)))
    b.out("p")
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level), 2):
            y = "p" if len(level) == 2 else None
            nxt.append(b.gate(Op.XOR, level[i], level[i + 1], y=y))
        level = nxt
    return b.netlist()


C17 = """\
// ISCAS-85 c17
module c17 (N1, N2, N3, N6, N7, N22, N23);
  input N1, N2, N3, N6, N7;
  output N22, N23;
  wire N10, N11, N16, N19;

  nand NAND2_1 (N10, N1, N3);
  nand NAND2_2 (N11, N3, N6);
  nand NAND2_3 (N16, N2, N11);
  nand NAND2_4 (N19, N11, N7);
  nand NAND2_5 (N22, N10, N16);
  nand NAND2_6 (N23, N16, N19);
endmodule
"""

SEQ = """\
// 2-bit counter with enable; the flip-flops are kept as opaque cells
module count2 (clk, rst, en, q0, q1, wrap);
  input clk, rst, en;
  output q0, q1, wrap;
  wire d0, d1, t1, nrst, d0r, d1r;

  not U1 (nrst, rst);
  xor U2 (d0, q0, en);
  and U3 (t1, q0, en);
  xor U4 (d1, q1, t1);
  and U5 (d0r, d0, nrst);
  and U6 (d1r, d1, nrst);
  and U7 (wrap, q0, q1, en);
  DFF_X1 r0 (.D(d0r), .CK(clk), .Q(q0));
  DFF_X1 r1 (.D(d1r), .CK(clk), .Q(q1));
endmodule
"""


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "c17.v").write_text(C17)
    (DATA / "count2.v").write_text(SEQ)
    for fn in (adder8, mult5, alu7, parity16):
        nl = fn()
        text = emit_netlist(nl)
        assert parse_netlist(text) == nl
        (DATA / f"{nl.module_name}.v").write_text(text)
        print(f"{nl.module_name}: {len(nl.gates)} gates, {len(nl.inputs)} inputs")
    for name in ("c17", "count2"):
        parse_netlist((DATA / f"{name}.v").read_text())


if __name__ == "__main__":
    main()
