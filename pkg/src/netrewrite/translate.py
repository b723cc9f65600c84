"""Moving between netlist gates and template Boolean circuits.

A gate type becomes a one-line template circuit over inputs ``A1..An`` and
output ``Y``. A verified rewrite of that template is spliced back into a
netlist by binding the template names to the gate's nets and giving every
intermediate variable a fresh wire.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from netrewrite.boolexpr import ASSIGNMENT_RE, Assignment, BooleanCircuit, CircuitSyntaxError
from netrewrite.netlist import GateInstance, GateType, Netlist, topological_gates
from netrewrite.ops import Op


@dataclass(frozen=True)
class OperatorSet:
    operators: tuple[Op, ...]

    def __post_init__(self) -> None:
        if not self.operators:
            raise ValueError("operator set must not be empty")
        if len(set(self.operators)) != len(self.operators):
            raise ValueError(f"duplicate operator in {self.operators}")

    @classmethod
    def of(cls, *names: str | Op) -> "OperatorSet":
        return cls(tuple(Op.parse(n) if isinstance(n, str) else n for n in names))

    @classmethod
    def parse(cls, text: str) -> "OperatorSet":
        """Parse ``"[OR, NOT]"`` or ``"OR,NOT"``."""
        return cls.of(*(p.strip() for p in text.strip("[] ").split(",") if p.strip()))

    def __contains__(self, op: object) -> bool:
        return op in self.operators

    def __iter__(self):
        return iter(self.operators)

    def __str__(self) -> str:
        return "[" + ", ".join(op.value for op in self.operators) + "]"


_NAND = OperatorSet((Op.NAND,))
_NOR = OperatorSet((Op.NOR,))
_AND_NOT = OperatorSet((Op.AND, Op.NOT))
_OR_NOT = OperatorSet((Op.OR, Op.NOT))

# Table order is treated as canonical. NOT/BUF rows extend the table: both
# are expressible with NAND(a, a) / NOR(a, a) inversions.
ALLOWED_OPERATOR_SETS: dict[Op, tuple[OperatorSet, ...]] = {
    Op.AND: (_NAND, _NOR, _OR_NOT),
    Op.OR: (_NAND, _NOR, _AND_NOT),
    Op.NAND: (_NOR, _AND_NOT, _OR_NOT),
    Op.NOR: (_NAND, _AND_NOT, _OR_NOT),
    Op.XOR: (_NAND, _NOR),
    Op.XNOR: (_NAND, _NOR),
    Op.NOT: (_NAND, _NOR),
    Op.BUF: (_NAND, _NOR),
}


def template_inputs(n: int) -> tuple[str, ...]:
    return tuple(f"A{i}" for i in range(1, n + 1))


def representative_circuit(gate_type: GateType) -> BooleanCircuit:
    """``Y = OP(A1, ..., An)`` for the given gate type."""
    st = Assignment("Y", gate_type.op, template_inputs(gate_type.fan_in))
    return BooleanCircuit((st,), st.args, "Y")


def allowed_operator_sets(gate_type: GateType) -> tuple[OperatorSet, ...]:
    try:
        return ALLOWED_OPERATOR_SETS[gate_type.op]
    except KeyError:
        raise ValueError(f"unsupported gate operator {gate_type.op}") from None


class NameAllocator:
    """Issues wire/instance names that do not clash with ``taken``."""

    def __init__(self, taken: Iterable[str] = (), prefix: str = "llmp_"):
        self.taken = set(taken)
        self.prefix = prefix
        self.counter = 0

    @classmethod
    def for_netlist(cls, netlist: Netlist, prefix: str = "llmp_") -> "NameAllocator":
        taken = {n for n, _ in netlist.ports} | set(netlist.wires)
        taken |= {g.name for g in netlist.gates}
        return cls(taken, prefix)

    def _fresh(self, kind: str) -> str:
        while True:
            name = f"{self.prefix}{kind}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name

    def wire(self) -> str:
        return self._fresh("w")

    def instance(self) -> str:
        return self._fresh("g")


def instantiate_transformation(
    transformation: BooleanCircuit,
    gate: GateInstance,
    alloc: NameAllocator,
) -> tuple[list[GateInstance], list[str]]:
    """Replacement gates for ``gate`` plus the fresh wires they introduce.

    Template inputs bind positionally (``A1`` to the first gate input), the
    circuit output binds to the gate output.
    """
    n = len(gate.inputs)
    expected = set(template_inputs(n))
    if set(transformation.inputs) != expected:
        raise ValueError(
            f"transformation inputs {transformation.inputs} do not fit "
            f"{n}-input gate {gate.name}"
        )
    binding = dict(zip(template_inputs(n), gate.inputs))
    binding[transformation.output] = gate.output
    fresh: list[str] = []
    gates: list[GateInstance] = []
    for st in transformation.statements:
        if st.target not in binding:
            binding[st.target] = alloc.wire()
            fresh.append(binding[st.target])
        gates.append(
            GateInstance(
                st.op,
                alloc.instance(),
                binding[st.target],
                tuple(binding[a] for a in st.args),
            )
        )
    return gates, fresh


# -- whole-netlist translation (ablation without per-gate characterization) --

_SIMPLE_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def netlist_to_statements(netlist: Netlist) -> str:
    """All gates as ``out = OP(in, ...)`` lines in dependency order."""
    lines = []
    for g in topological_gates(netlist):
        for net in (g.output, *g.inputs):
            if not _SIMPLE_ID.match(net):
                raise ValueError(f"net {net!r} has no Boolean-format spelling")
        lines.append(f"{g.output} = {g.op.value}({', '.join(g.inputs)})")
    return "\n".join(lines)


def statements_to_netlist(text: str, template: Netlist) -> Netlist:
    """Rebuild a netlist from assignment lines, keeping the template's ports
    and opaque items. Every assigned name that is not a port becomes a wire.
    """
    ports = {n for n, _ in template.ports}
    gates: list[GateInstance] = []
    wires: list[str] = []
    alloc = NameAllocator(ports | {m.group(1) for m in _TARGET_RE.finditer(text)})
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = ASSIGNMENT_RE.match(line)
        if m is None:
            raise CircuitSyntaxError(lineno, f"expected `name = OP(arg, ...)`, got {line.strip()!r}")
        try:
            op = Op.parse(m["op"])
            args = tuple(a.strip() for a in m["args"].split(","))
            gates.append(GateInstance(op, alloc.instance(), m["target"], args))
        except ValueError as exc:
            raise CircuitSyntaxError(lineno, str(exc)) from None
        if m["target"] not in ports:
            wires.append(m["target"])
    wires.extend(w for w in template.wires if w not in wires)
    return Netlist(
        template.module_name,
        template.ports,
        tuple(dict.fromkeys(wires)),
        tuple(gates),
        template.opaque_items,
    )


_TARGET_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=", re.MULTILINE)
