"""Canonical rewrites for every gate type and allowed operator set.

The table is built by structural recursion, so it covers any fan-in. It
stands in for a model during offline runs and doubles as a constructive
proof that every operator set in the allowed table is complete for its
gate.
"""

from __future__ import annotations

from functools import lru_cache

from netrewrite.boolexpr import (
    Assignment,
    BooleanCircuit,
    compare,
    operators_used,
    parse_boolean_circuit,
)
from netrewrite.netlist import GateType
from netrewrite.ops import Op
from netrewrite.translate import (
    ALLOWED_OPERATOR_SETS,
    OperatorSet,
    representative_circuit,
    template_inputs,
)


class _Builder:
    """Straight-line program under construction, intermediates N1, N2, ..."""

    def __init__(self) -> None:
        self.statements: list[Assignment] = []

    def gate(self, op: Op, *args: str) -> str:
        name = f"N{len(self.statements) + 1}"
        self.statements.append(Assignment(name, op, tuple(args)))
        return name

    def finish(self, result: str) -> BooleanCircuit:
        last = self.statements[-1]
        assert last.target == result, "result must be produced last"
        renamed = [*self.statements[:-1], Assignment("Y", last.op, last.args)]
        return BooleanCircuit.from_statements(renamed)


class _Basis:
    """Gate constructions over one operator set.

    Subclasses provide ``inv``, ``and_``, ``or_``; the rest derive from those
    unless a cheaper native form exists.
    """

    def __init__(self, b: _Builder):
        self.b = b

    def inv(self, x: str) -> str:
        raise NotImplementedError

    def and_(self, xs) -> str:
        raise NotImplementedError

    def or_(self, xs) -> str:
        raise NotImplementedError

    def nand_(self, xs) -> str:
        return self.inv(self.and_(xs))

    def nor_(self, xs) -> str:
        return self.inv(self.or_(xs))

    def buf(self, x: str) -> str:
        return self.inv(self.inv(x))

    def xor2(self, a: str, b: str) -> str:
        # (a AND NOT b) OR (NOT a AND b)
        na, nb = self.inv(a), self.inv(b)
        return self.or_([self.and_([a, nb]), self.and_([na, b])])

    def xnor2(self, a: str, b: str) -> str:
        return self.inv(self.xor2(a, b))

    def xor_(self, xs) -> str:
        acc = xs[0]
        for x in xs[1:]:
            acc = self.xor2(acc, x)
        return acc

    def xnor_(self, xs) -> str:
        if len(xs) == 2:
            return self.xnor2(*xs)
        return self.xnor2(self.xor_(xs[:-1]), xs[-1])

    def build(self, op: Op, xs) -> str:
        return {
            Op.AND: self.and_,
            Op.OR: self.or_,
            Op.NAND: self.nand_,
            Op.NOR: self.nor_,
            Op.XOR: self.xor_,
            Op.XNOR: self.xnor_,
            Op.NOT: lambda v: self.inv(v[0]),
            Op.BUF: lambda v: self.buf(v[0]),
        }[op](list(xs))


class _NandBasis(_Basis):
    def inv(self, x):
        return self.b.gate(Op.NAND, x, x)

    def nand_(self, xs):
        return self.b.gate(Op.NAND, *xs)

    def and_(self, xs):
        return self.inv(self.nand_(xs))

    def or_(self, xs):
        return self.b.gate(Op.NAND, *(self.inv(x) for x in xs))

    def xor2(self, a, b):
        t = self.b.gate(Op.NAND, a, b)
        u = self.b.gate(Op.NAND, a, t)
        v = self.b.gate(Op.NAND, b, t)
        return self.b.gate(Op.NAND, u, v)


class _NorBasis(_Basis):
    def inv(self, x):
        return self.b.gate(Op.NOR, x, x)

    def nor_(self, xs):
        return self.b.gate(Op.NOR, *xs)

    def or_(self, xs):
        return self.inv(self.nor_(xs))

    def and_(self, xs):
        return self.b.gate(Op.NOR, *(self.inv(x) for x in xs))

    def xnor2(self, a, b):
        t = self.b.gate(Op.NOR, a, b)
        u = self.b.gate(Op.NOR, a, t)
        v = self.b.gate(Op.NOR, b, t)
        return self.b.gate(Op.NOR, u, v)

    def xor2(self, a, b):
        return self.inv(self.xnor2(a, b))


class _AndNotBasis(_Basis):
    def inv(self, x):
        return self.b.gate(Op.NOT, x)

    def and_(self, xs):
        return self.b.gate(Op.AND, *xs)

    def nor_(self, xs):
        return self.and_([self.inv(x) for x in xs])

    def or_(self, xs):
        return self.inv(self.nor_(xs))


class _OrNotBasis(_Basis):
    def inv(self, x):
        return self.b.gate(Op.NOT, x)

    def or_(self, xs):
        return self.b.gate(Op.OR, *xs)

    def nand_(self, xs):
        return self.or_([self.inv(x) for x in xs])

    def and_(self, xs):
        return self.inv(self.nand_(xs))


_BASES = {
    (Op.NAND,): _NandBasis,
    (Op.NOR,): _NorBasis,
    (Op.AND, Op.NOT): _AndNotBasis,
    (Op.OR, Op.NOT): _OrNotBasis,
}


class CanonicalTableError(AssertionError):
    pass


@lru_cache(maxsize=None)
def canonical_transformation(gate_type: GateType, ops: OperatorSet) -> BooleanCircuit:
    """Verified rewrite of ``gate_type`` using only ``ops``.

    Every entry is checked on creation exactly like a model response: it must
    re-parse from its text, stay inside ``ops``, and match the gate's truth
    table.
    """
    try:
        basis_cls = _BASES[ops.operators]
    except KeyError:
        raise ValueError(f"no canonical construction for operator set {ops}") from None
    b = _Builder()
    circuit = b.finish(basis_cls(b).build(gate_type.op, template_inputs(gate_type.fan_in)))
    reparsed = parse_boolean_circuit(circuit.text)
    if reparsed != circuit:
        raise CanonicalTableError(f"{gate_type} {ops}: text does not round-trip")
    if not operators_used(circuit) <= set(ops.operators):
        raise CanonicalTableError(f"{gate_type} {ops}: uses {operators_used(circuit)}")
    result = compare(representative_circuit(gate_type), circuit)
    if not result.equivalent:
        raise CanonicalTableError(f"{gate_type} {ops}: {result.reason}")
    return circuit


def self_check(max_fan_in: int = 4) -> int:
    """Build and verify every table entry up to ``max_fan_in``; return count."""
    count = 0
    for op, sets in ALLOWED_OPERATOR_SETS.items():
        fan_ins = [1] if op.unary else range(2, max_fan_in + 1)
        for n in fan_ins:
            for ops in sets:
                canonical_transformation(GateType(op, n), ops)
                count += 1
    return count
